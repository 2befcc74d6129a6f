// config.hpp — Run configuration: JSON file plus dotted-path overrides.
//
// Every field is optional; defaults are a desk-scale run
// (N = 200, h = 1.1, T_L = 10, T_R = 15, mu_L = 1, mu_R = 1.5, gamma = 0.2, Omega = 10).

#pragma once

#include "chainfln/analysis.hpp"
#include "chainfln/bath.hpp"
#include "chainfln/generators.hpp"
#include "chainfln/model.hpp"
#include "chainfln/steady_state.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chainfln {

std::string_view version();

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EllGridSpec {
    std::vector<int> values;   // explicit cuts; overrides everything else when non-empty
    std::optional<int> min;    // inclusive bounds applied to the default grid
    std::optional<int> max;
};

struct FitSettings {
    std::optional<FitWindow> window;       // default [20, N/2]
    std::optional<FitWindow> small_window; // default [20, N/4]
    std::optional<FitWindow> large_window; // default [N/3, N/2]
    bool include_flagged{false};
};

struct OutputSettings {
    std::string dir{"out"};
    std::string prefix{"sweep"};
    std::string dump_gamma; // directory for Gamma dumps; empty disables
};

struct EvolveSettings {
    double t_final{200.0};
    double dt{0.05};
    int record_every{100};
    std::string initial{"zero"}; // "zero" or "ground"
    EquationKind kind{EquationKind::NonlocalLindblad};
};

struct RunConfig {
    ChainSpec chain{200, 1.1};
    BathSpec left{10.0, 1.0, 0.2, 10.0};
    BathSpec right{15.0, 1.5, 0.2, 10.0};
    std::vector<EquationKind> kinds{EquationKind::NonlocalLindblad, EquationKind::Redfield, EquationKind::ULE};
    EllGridSpec ell;
    QuadratureConfig quad;
    SolveOptions solver;
    FitSettings fit;
    OutputSettings output;
    EvolveSettings evolve;
    unsigned threads{0};

    // Throws ConfigError naming the offending field.
    void validate() const;

    std::vector<int> cuts() const;
    FitWindow fit_window() const;
    FitWindow small_window() const;
    FitWindow large_window() const;
};

nlohmann::json default_config_json();
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

// Applies "a.b.c=value"; value is parsed as JSON, falling back to a string.
void apply_override(nlohmann::json& j, std::string_view assignment);

// Defaults, then the optional file, then the overrides in order; validated.
RunConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides);

} // namespace chainfln
