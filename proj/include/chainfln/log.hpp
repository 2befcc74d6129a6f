// log.hpp — Minimal warning channel shared by all modules.

#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace chainfln::log {

using Sink = std::function<void(std::string_view)>;

// Emits a warning line. Thread-safe. Default sink writes "[warn] ..." to stderr.
void warn(std::string_view message);

// Replaces the sink; returns the previous one. Passing an empty sink restores stderr.
Sink set_sink(Sink sink);

} // namespace chainfln::log
