// chainfln.cpp — Command-line driver: check, sweep, fit, evolve.

#include "chainfln/analysis.hpp"
#include "chainfln/config.hpp"
#include "chainfln/entanglement.hpp"
#include "chainfln/io.hpp"
#include "chainfln/log.hpp"
#include "chainfln/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chainfln;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<unsigned> threads;
};

RunConfig load(const CommonOptions& o) {
    std::optional<fs::path> file;
    if (!o.config_path.empty()) file = o.config_path;
    RunConfig cfg = load_config(file, o.overrides);
    if (o.threads) cfg.threads = *o.threads;
    set_thread_count(cfg.threads);
    return cfg;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json fit_json(const LogFit& f) {
    return {{"c_tilde", f.c_tilde},
            {"b", f.b},
            {"r_squared", f.r_squared},
            {"window", {f.window.lo, f.window.hi}},
            {"n_points", f.n_points}};
}

std::vector<std::string> advisories(const RunConfig& cfg) {
    std::vector<std::string> notes;
    for (const auto& n : cfg.left.advisories()) notes.push_back("bath_left: " + n);
    for (const auto& n : cfg.right.advisories()) notes.push_back("bath_right: " + n);
    if (!cfg.chain.critical()) notes.push_back("chain: |h| > 2, the chain is gapped");
    return notes;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir.string() + "'");
}

int cmd_check(const CommonOptions& o) {
    const RunConfig cfg = load(o);
    std::cout << "chainfln " << version() << " check: N = " << cfg.chain.N << ", h = " << cfg.chain.h << "\n";
    for (const auto& n : advisories(cfg)) std::cout << "advisory: " << n << "\n";

    bool ok = true;
    for (EquationKind kind : cfg.kinds) {
        try {
            const GeneratorMatrices gen = build_generators(kind, cfg.chain, cfg.left, cfg.right, cfg.quad);
            const UniquenessReport u = uniqueness_report(gen.P_tilde);
            const bool unique = u.margin > cfg.solver.uniqueness_tol;
            ok = ok && unique;
            std::cout << to_string(kind) << ": uniqueness margin " << u.margin << (unique ? " (ok)" : " (DEGENERATE)")
                      << ", max quadrature error estimate " << gen.quadrature_error << "\n";
        } catch (const std::exception& e) {
            ok = false;
            std::cout << to_string(kind) << ": FAILED: " << e.what() << "\n";
        }
    }
    return ok ? kExitOk : kExitRuntime;
}

int cmd_sweep(const CommonOptions& o, const std::string& dump_dir, bool include_flagged) {
    RunConfig cfg = load(o);
    if (!dump_dir.empty()) cfg.output.dump_gamma = dump_dir;
    if (include_flagged) cfg.fit.include_flagged = true;

    const fs::path out_dir(cfg.output.dir);
    ensure_dir(out_dir);
    if (!cfg.output.dump_gamma.empty()) ensure_dir(cfg.output.dump_gamma);
    for (const auto& n : advisories(cfg)) log::warn(n);

    const std::vector<int> cuts = cfg.cuts();
    const std::vector<KindOutcome> outcomes =
        sweep(cfg.chain, cfg.left, cfg.right, cfg.kinds, cuts, cfg.quad, SweepOptions{cfg.solver});

    json meta;
    meta["version"] = std::string(version());
    meta["command"] = "sweep";
    meta["config"] = to_json(cfg);
    meta["cuts"] = cuts;
    meta["threads"] = thread_count();
    meta["advisories"] = advisories(cfg);
    meta["csv_header"] = kScalingCsvHeader;
    meta["kinds"] = json::object();

    int succeeded = 0;
    for (const KindOutcome& oc : outcomes) {
        const std::string name(to_string(oc.record.kind));
        json k;
        k["status"] = oc.ok() ? "ok" : "failed";
        k["wall_seconds"] = {{"build", oc.build_seconds},
                             {"solve", oc.solve_seconds},
                             {"entanglement", oc.entanglement_seconds}};
        if (!oc.ok()) {
            k["error"] = oc.error;
            std::cerr << name << ": " << oc.error << "\n";
            meta["kinds"][name] = k;
            continue;
        }
        ++succeeded;
        const fs::path csv = out_dir / (cfg.output.prefix + "_" + name + ".csv");
        write_scaling_csv(csv, oc.record.rows);
        k["csv"] = csv.string();
        k["quadrature_error"] = oc.quadrature_error;
        k["max_nu"] = oc.max_nu;
        k["positivity_violation"] = oc.max_nu > 1.0 + 1e-8;
        if (oc.steady) {
            k["residual"] = oc.steady->residual;
            k["uniqueness_margin"] = oc.steady->uniqueness_margin;
            k["antisymmetry_residual"] = oc.steady->antisymmetry_residual;
            k["solver"] = std::string(to_string(oc.steady->solver));
            if (!cfg.output.dump_gamma.empty()) {
                const fs::path dump = fs::path(cfg.output.dump_gamma) / (cfg.output.prefix + "_" + name + ".gamma");
                write_gamma_dump(dump, oc.steady->correlation.gamma);
                k["gamma_dump"] = dump.string();
            }
        }
        int flagged = 0;
        for (const auto& r : oc.record.rows) flagged += r.flags != 0;
        k["flagged_rows"] = flagged;
        k["row_errors"] = oc.row_errors;
        try {
            k["fit"] = fit_json(fit_log(oc.record, cfg.fit_window(), cfg.fit.include_flagged));
        } catch (const FitError& e) {
            k["fit"] = nullptr;
            k["fit_error"] = e.what();
        }
        meta["kinds"][name] = k;
        std::cout << name << ": " << oc.record.rows.size() << " rows -> " << csv.string() << "\n";
    }

    const fs::path meta_path = out_dir / (cfg.output.prefix + "_metadata.json");
    std::ofstream(meta_path) << meta.dump(2) << "\n";
    std::cout << "metadata -> " << meta_path.string() << "\n";
    return (succeeded > 0 || outcomes.empty()) ? kExitOk : kExitRuntime;
}

int cmd_fit(const CommonOptions& o, const std::string& csv, const std::vector<double>& window,
            const std::vector<double>& small, const std::vector<double>& large, bool include_flagged) {
    const RunConfig cfg = load(o);
    std::vector<ScalingRow> rows;
    try {
        rows = read_scaling_csv(fs::path(csv));
    } catch (const CsvFormatError& e) {
        std::cerr << "error: " << csv << ": " << e.what() << "\n";
        return kExitUsage;
    }
    int max_l = 0;
    int min_l = rows.empty() ? 0 : rows.front().l;
    for (const auto& r : rows) {
        max_l = std::max(max_l, r.l);
        min_l = std::min(min_l, r.l);
    }
    // The sweep grid ends at N/2, so the largest cut stands in for N/2 here. Grids too short
    // for a small window starting at l = 20 start their windows at the smallest cut instead.
    const double lo = max_l / 2.0 > 20.0 ? 20.0 : static_cast<double>(min_l);

    auto pick = [](const std::vector<double>& flag, const std::optional<FitWindow>& configured, FitWindow fallback) {
        if (flag.size() == 2) return FitWindow{flag[0], flag[1]};
        return configured.value_or(fallback);
    };
    const FitWindow w = pick(window, cfg.fit.window, {lo, static_cast<double>(max_l)});
    const FitWindow ws = pick(small, cfg.fit.small_window, {lo, max_l / 2.0});
    const FitWindow wl = pick(large, cfg.fit.large_window, {2.0 * max_l / 3.0, static_cast<double>(max_l)});
    const bool flagged = include_flagged || cfg.fit.include_flagged;

    const LogFit fit = fit_log(rows, w, flagged);
    json out = fit_json(fit);
    try {
        out["superlog_excess"] = number_or_null(superlog_score(rows, ws, wl, flagged));
    } catch (const FitError&) {
        out["superlog_excess"] = nullptr;
    }
    out["small_window"] = {ws.lo, ws.hi};
    out["large_window"] = {wl.lo, wl.hi};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_evolve(const CommonOptions& o) {
    const RunConfig cfg = load(o);
    const fs::path out_dir(cfg.output.dir);
    ensure_dir(out_dir);
    const EvolveSettings& ev = cfg.evolve;

    const GeneratorMatrices gen = build_generators(ev.kind, cfg.chain, cfg.left, cfg.right, cfg.quad);
    std::optional<Eigen::MatrixXd> steady;
    try {
        steady = solve_steady(gen, cfg.solver).correlation.gamma;
    } catch (const std::exception& e) {
        log::warn(std::string("evolve: no steady-state reference: ") + e.what());
    }
    MajoranaCorrelation g0;
    if (ev.initial == "ground") {
        g0 = ground_state(cfg.chain);
    } else {
        g0.gamma = Eigen::MatrixXd::Zero(2 * cfg.chain.N, 2 * cfg.chain.N);
    }
    const Trajectory traj = evolve(gen, g0, ev.t_final, ev.dt, ev.record_every);

    const fs::path csv = out_dir / (cfg.output.prefix + "_evolve_" + std::string(to_string(ev.kind)) + ".csv");
    std::ofstream os(csv, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + csv.string() + "' for writing");
    os << "t,distance_to_steady,fln_half\n";
    const int half = cfg.chain.N / 2;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double dist = steady ? (traj.states[i].gamma - *steady).cwiseAbs().maxCoeff()
                                   : std::numeric_limits<double>::quiet_NaN();
        double f = std::numeric_limits<double>::quiet_NaN();
        try {
            f = fln(traj.states[i], half).fln;
        } catch (const std::exception&) {
        }
        os << format_double(traj.times[i]) << ',' << format_double(dist) << ',' << format_double(f) << '\n';
    }
    std::cout << "evolve: " << traj.times.size() << " states -> " << csv.string() << "\n";
    return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--set", o.overrides, "Override a field, e.g. --set chain.N=100 (repeatable)");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state entanglement of a boundary-driven tight-binding chain"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version()));

    CommonOptions common;
    std::string dump_dir;
    bool include_flagged = false;
    std::string csv;
    std::vector<double> window, small, large;

    CLI::App* check = app.add_subcommand("check", "Uniqueness margins, quadrature residuals and advisories");
    add_common(check, common);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Solve every kind and write one CSV per kind plus metadata");
    add_common(sweep_cmd, common);
    sweep_cmd->add_option("--dump-gamma", dump_dir, "Directory for binary correlation-matrix dumps");
    sweep_cmd->add_flag("--include-flagged", include_flagged, "Keep flagged rows in the metadata fits");

    CLI::App* fit = app.add_subcommand("fit", "Logarithmic fit of a sweep CSV");
    add_common(fit, common);
    fit->add_option("csv", csv, "Sweep CSV file")->required();
    fit->add_option("--window", window, "Fit window l_min l_max")->expected(2);
    fit->add_option("--small-window", small, "Calibration window for the superlog score")->expected(2);
    fit->add_option("--large-window", large, "Evaluation window for the superlog score")->expected(2);
    fit->add_flag("--include-flagged", include_flagged, "Use rows with positivity flags");

    CLI::App* evolve_cmd = app.add_subcommand("evolve", "Integrate the transient correlation-matrix dynamics");
    add_common(evolve_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (check->parsed()) return cmd_check(common);
        if (sweep_cmd->parsed()) return cmd_sweep(common, dump_dir, include_flagged);
        if (fit->parsed()) return cmd_fit(common, csv, window, small, large, include_flagged);
        if (evolve_cmd->parsed()) return cmd_evolve(common);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CsvFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
