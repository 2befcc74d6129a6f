#include "chainfln/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#ifndef CHAINFLN_VERSION
#define CHAINFLN_VERSION "unknown"
#endif

namespace chainfln {

using nlohmann::json;

std::string_view version() { return CHAINFLN_VERSION; }

namespace {

json window_json(const std::optional<FitWindow>& w) {
    if (!w) return nullptr;
    return json::array({w->lo, w->hi});
}

json optional_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

void merge(json& target, const json& src, const std::string& path) {
    if (!src.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected an object");
    for (auto it = src.begin(); it != src.end(); ++it) {
        const std::string field = path.empty() ? it.key() : path + "." + it.key();
        if (!target.contains(it.key())) throw ConfigError("unknown field '" + field + "'");
        json& t = target[it.key()];
        if (t.is_object()) {
            merge(t, it.value(), field);
        } else {
            t = it.value();
        }
    }
}

// Typed accessors that report the dotted field path on mismatch.
class Reader {
public:
    explicit Reader(const json& root) : root_(root) {}

    const json& at(const std::string& path) const {
        const json* node = &root_;
        std::size_t start = 0;
        while (true) {
            const std::size_t dot = path.find('.', start);
            const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (!node->is_object() || !node->contains(key)) throw ConfigError("missing field '" + path + "'");
            node = &(*node)[key];
            if (dot == std::string::npos) return *node;
            start = dot + 1;
        }
    }

    double number(const std::string& path) const {
        const json& v = at(path);
        if (!v.is_number()) throw ConfigError("field '" + path + "' must be a number");
        return v.get<double>();
    }

    std::optional<double> optional_number(const std::string& path) const {
        const json& v = at(path);
        if (v.is_null()) return std::nullopt;
        return number(path);
    }

    long long integer(const std::string& path) const {
        const json& v = at(path);
        if (v.is_number_integer()) return v.get<long long>();
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
        }
        throw ConfigError("field '" + path + "' must be an integer");
    }

    std::optional<int> optional_int(const std::string& path) const {
        if (at(path).is_null()) return std::nullopt;
        return static_cast<int>(integer(path));
    }

    bool boolean(const std::string& path) const {
        const json& v = at(path);
        if (!v.is_boolean()) throw ConfigError("field '" + path + "' must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& path) const {
        const json& v = at(path);
        if (!v.is_string()) throw ConfigError("field '" + path + "' must be a string");
        return v.get<std::string>();
    }

    std::optional<FitWindow> window(const std::string& path) const {
        const json& v = at(path);
        if (v.is_null()) return std::nullopt;
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw ConfigError("field '" + path + "' must be null or a pair [l_min, l_max]");
        }
        return FitWindow{v[0].get<double>(), v[1].get<double>()};
    }

private:
    const json& root_;
};

BathSpec read_bath(const Reader& r, const std::string& p) {
    return {r.number(p + ".T"), r.number(p + ".mu"), r.number(p + ".gamma"), r.number(p + ".Omega")};
}

json bath_json(const BathSpec& b) { return {{"T", b.T}, {"mu", b.mu}, {"gamma", b.gamma}, {"Omega", b.Omega}}; }

void check_window(const std::optional<FitWindow>& w, const char* name) {
    if (w && !(w->lo <= w->hi)) throw ConfigError(std::string("field '") + name + "' requires l_min <= l_max");
}

} // namespace

json to_json(const RunConfig& c) {
    json kinds = json::array();
    for (EquationKind k : c.kinds) kinds.push_back(std::string(to_string(k)));
    return {
        {"chain", {{"N", c.chain.N}, {"h", c.chain.h}}},
        {"bath_left", bath_json(c.left)},
        {"bath_right", bath_json(c.right)},
        {"kinds", kinds},
        {"ell", {{"values", c.ell.values}, {"min", optional_json(c.ell.min)}, {"max", optional_json(c.ell.max)}}},
        {"quadrature",
         {{"rel_tol", c.quad.rel_tol},
          {"abs_tol", c.quad.abs_tol},
          {"pv_window", c.quad.pv_window ? json(*c.quad.pv_window) : json(nullptr)},
          {"x_max_factor", c.quad.x_max_factor},
          {"max_intervals", c.quad.max_intervals}}},
        {"solver",
         {{"method", std::string(to_string(c.solver.solver))},
          {"uniqueness_tol", c.solver.uniqueness_tol},
          {"residual_tol", c.solver.residual_tol}}},
        {"fit",
         {{"window", window_json(c.fit.window)},
          {"small_window", window_json(c.fit.small_window)},
          {"large_window", window_json(c.fit.large_window)},
          {"include_flagged", c.fit.include_flagged}}},
        {"output", {{"dir", c.output.dir}, {"prefix", c.output.prefix}, {"dump_gamma", c.output.dump_gamma}}},
        {"evolve",
         {{"t_final", c.evolve.t_final},
          {"dt", c.evolve.dt},
          {"record_every", c.evolve.record_every},
          {"initial", c.evolve.initial},
          {"kind", std::string(to_string(c.evolve.kind))}}},
        {"threads", c.threads},
    };
}

json default_config_json() { return to_json(RunConfig{}); }

RunConfig config_from_json(const json& j) {
    json full = default_config_json();
    merge(full, j, "");
    const Reader r(full);

    RunConfig c;
    c.chain.N = static_cast<int>(r.integer("chain.N"));
    c.chain.h = r.number("chain.h");
    c.left = read_bath(r, "bath_left");
    c.right = read_bath(r, "bath_right");

    const json& kinds = r.at("kinds");
    if (!kinds.is_array()) throw ConfigError("field 'kinds' must be an array of names");
    c.kinds.clear();
    for (const auto& k : kinds) {
        if (!k.is_string()) throw ConfigError("field 'kinds' must contain strings");
        try {
            c.kinds.push_back(parse_kind(k.get<std::string>()));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("field 'kinds': ") + e.what());
        }
    }

    const json& values = r.at("ell.values");
    if (!values.is_array()) throw ConfigError("field 'ell.values' must be an array of integers");
    for (const auto& v : values) {
        if (!v.is_number_integer()) throw ConfigError("field 'ell.values' must contain integers");
        c.ell.values.push_back(v.get<int>());
    }
    c.ell.min = r.optional_int("ell.min");
    c.ell.max = r.optional_int("ell.max");

    c.quad.rel_tol = r.number("quadrature.rel_tol");
    c.quad.abs_tol = r.number("quadrature.abs_tol");
    c.quad.pv_window = r.optional_number("quadrature.pv_window");
    c.quad.x_max_factor = r.number("quadrature.x_max_factor");
    const long long intervals = r.integer("quadrature.max_intervals");
    if (intervals < 16) throw ConfigError("field 'quadrature.max_intervals' must be >= 16");
    c.quad.max_intervals = static_cast<std::size_t>(intervals);

    const std::string method = r.string("solver.method");
    if (method == "bartels-stewart") {
        c.solver.solver = SolverKind::BartelsStewart;
    } else if (method == "kronecker-dense") {
        c.solver.solver = SolverKind::KroneckerDense;
    } else {
        throw ConfigError("field 'solver.method' must be \"bartels-stewart\" or \"kronecker-dense\"");
    }
    c.solver.uniqueness_tol = r.number("solver.uniqueness_tol");
    c.solver.residual_tol = r.number("solver.residual_tol");

    c.fit.window = r.window("fit.window");
    c.fit.small_window = r.window("fit.small_window");
    c.fit.large_window = r.window("fit.large_window");
    c.fit.include_flagged = r.boolean("fit.include_flagged");

    c.output.dir = r.string("output.dir");
    c.output.prefix = r.string("output.prefix");
    c.output.dump_gamma = r.string("output.dump_gamma");

    c.evolve.t_final = r.number("evolve.t_final");
    c.evolve.dt = r.number("evolve.dt");
    c.evolve.record_every = static_cast<int>(r.integer("evolve.record_every"));
    c.evolve.initial = r.string("evolve.initial");
    try {
        c.evolve.kind = parse_kind(r.string("evolve.kind"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field 'evolve.kind': ") + e.what());
    }

    const long long threads = r.integer("threads");
    if (threads < 0) throw ConfigError("field 'threads' must be >= 0");
    c.threads = static_cast<unsigned>(threads);
    return c;
}

void RunConfig::validate() const {
    if (chain.N < 2) throw ConfigError("field 'chain.N' must be >= 2");
    if (!std::isfinite(chain.h)) throw ConfigError("field 'chain.h' must be finite");
    try {
        left.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bath_left: ") + e.what());
    }
    try {
        right.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bath_right: ") + e.what());
    }
    try {
        quad.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("quadrature: ") + e.what());
    }
    if (kinds.empty()) throw ConfigError("field 'kinds' must name at least one equation kind");
    std::set<EquationKind> seen(kinds.begin(), kinds.end());
    if (seen.size() != kinds.size()) throw ConfigError("field 'kinds' contains duplicates");
    for (int l : ell.values) {
        if (l < 1 || l > chain.N - 1) {
            throw ConfigError("field 'ell.values': cut " + std::to_string(l) + " outside 1.." +
                              std::to_string(chain.N - 1));
        }
    }
    if (ell.min && ell.max && *ell.min > *ell.max) throw ConfigError("field 'ell': min > max");
    if (!(solver.uniqueness_tol >= 0.0)) throw ConfigError("field 'solver.uniqueness_tol' must be >= 0");
    if (!(solver.residual_tol > 0.0)) throw ConfigError("field 'solver.residual_tol' must be positive");
    check_window(fit.window, "fit.window");
    check_window(fit.small_window, "fit.small_window");
    check_window(fit.large_window, "fit.large_window");
    if (output.prefix.empty()) throw ConfigError("field 'output.prefix' must not be empty");
    if (!(evolve.dt > 0.0) || !std::isfinite(evolve.dt)) throw ConfigError("field 'evolve.dt' must be positive");
    if (!(evolve.t_final >= 0.0) || !std::isfinite(evolve.t_final)) {
        throw ConfigError("field 'evolve.t_final' must be >= 0");
    }
    if (evolve.record_every < 1) throw ConfigError("field 'evolve.record_every' must be >= 1");
    if (evolve.initial != "zero" && evolve.initial != "ground") {
        throw ConfigError("field 'evolve.initial' must be \"zero\" or \"ground\"");
    }
}

std::vector<int> RunConfig::cuts() const {
    std::vector<int> out;
    if (!ell.values.empty()) {
        out = ell.values;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    for (int l : default_ell_grid(chain.N)) {
        if (ell.min && l < *ell.min) continue;
        if (ell.max && l > *ell.max) continue;
        out.push_back(l);
    }
    return out;
}

FitWindow RunConfig::fit_window() const { return fit.window.value_or(FitWindow{20.0, chain.N / 2.0}); }
FitWindow RunConfig::small_window() const { return fit.small_window.value_or(FitWindow{20.0, chain.N / 4.0}); }
FitWindow RunConfig::large_window() const {
    return fit.large_window.value_or(FitWindow{chain.N / 3.0, chain.N / 2.0});
}

void apply_override(json& j, std::string_view assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "' must have the form key=value");
    }
    const std::string path(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));

    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty() || !node->is_object() || !node->contains(key)) {
            throw ConfigError("override: unknown field '" + path + "'");
        }
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    *node = std::move(value);
}

RunConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides) {
    json j = default_config_json();
    if (file) {
        std::ifstream is(*file);
        if (!is) throw ConfigError("cannot open config file '" + file->string() + "'");
        json user;
        try {
            user = json::parse(is, nullptr, true, true);
        } catch (const json::parse_error& e) {
            throw ConfigError("config file '" + file->string() + "' is not valid JSON: " + e.what());
        }
        merge(j, user, "");
    }
    for (const auto& o : overrides) apply_override(j, o);
    RunConfig cfg = config_from_json(j);
    cfg.validate();
    return cfg;
}

} // namespace chainfln
