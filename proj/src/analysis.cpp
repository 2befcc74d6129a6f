#include "chainfln/analysis.hpp"

#include "chainfln/parallel.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace chainfln {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool usable(const ScalingRow& r, FitWindow w, bool include_flagged) {
    return r.l >= w.lo && r.l <= w.hi && (include_flagged || r.flags == 0) && std::isfinite(r.fln) &&
           std::isfinite(r.chord) && r.chord > 0.0;
}

} // namespace

double chord_length(int ell, int N) {
    if (N < 1 || ell < 1 || ell > N) {
        throw std::out_of_range("chord_length: require 1 <= l <= N (l = " + std::to_string(ell) +
                                ", N = " + std::to_string(N) + ")");
    }
    if (ell == N) return 0.0;
    return N / std::numbers::pi * std::sin(std::numbers::pi * ell / N);
}

std::vector<int> default_ell_grid(int N) {
    std::vector<int> grid;
    const int top = N / 2;
    if (top < 2) return grid;
    if (N <= 200) {
        for (int l = 2; l <= top; ++l) grid.push_back(l);
        return grid;
    }
    constexpr std::size_t target = 60;
    for (int count = static_cast<int>(target); grid.size() < target && count < 4 * top; ++count) {
        std::set<int> cuts;
        const double ratio = std::log(static_cast<double>(top) / 2.0);
        for (int i = 0; i < count; ++i) {
            const double x = 2.0 * std::exp(ratio * i / (count - 1));
            cuts.insert(std::clamp(static_cast<int>(std::lround(x)), 2, top));
        }
        grid.assign(cuts.begin(), cuts.end());
    }
    return grid;
}

std::vector<ScalingRow> scaling_rows(const MajoranaCorrelation& corr, const std::vector<int>& ells,
                                     std::vector<std::string>* row_errors) {
    const EntanglementAnalyzer analyzer(corr);
    const int n = analyzer.sites();
    std::vector<ScalingRow> rows(ells.size());
    std::vector<std::string> errors(ells.size());
    parallel_for(ells.size(), [&](std::size_t i) {
        ScalingRow& row = rows[i];
        row.l = ells[i];
        row.chord = chord_length(ells[i], n);
        try {
            const EntanglementReport r = analyzer.report(ells[i]);
            row.fln = r.fln;
            row.mutual_info = r.mutual_information;
            row.s_a = r.s_a;
            row.s_b = r.s_b;
            row.s_full = r.s_full;
            row.flags = r.positivity_flags;
        } catch (const std::out_of_range&) {
            throw;
        } catch (const std::exception& e) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.fln = row.mutual_info = row.s_a = row.s_b = row.s_full = nan;
            row.flags = 1;
            errors[i] = "l = " + std::to_string(ells[i]) + ": " + e.what();
        }
    });
    if (row_errors) {
        for (auto& e : errors) {
            if (!e.empty()) row_errors->push_back(std::move(e));
        }
    }
    return rows;
}

std::vector<KindOutcome> sweep(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                               const std::vector<EquationKind>& kinds, const std::vector<int>& ells,
                               const QuadratureConfig& quad, const SweepOptions& options) {
    for (std::size_t i = 0; i < ells.size(); ++i) {
        if (ells[i] < 1 || ells[i] > chain.N - 1) {
            throw std::out_of_range("sweep: cut l = " + std::to_string(ells[i]) + " outside 1.." +
                                    std::to_string(chain.N - 1));
        }
        if (i > 0 && ells[i] <= ells[i - 1]) throw std::invalid_argument("sweep: cuts must be strictly increasing");
    }

    std::vector<KindOutcome> out;
    for (EquationKind kind : kinds) {
        KindOutcome o;
        o.record.kind = kind;
        o.record.N = chain.N;
        if (ells.empty()) {
            out.push_back(std::move(o));
            continue;
        }
        try {
            auto t0 = std::chrono::steady_clock::now();
            const GeneratorMatrices gen = build_generators(kind, chain, left, right, quad);
            o.quadrature_error = gen.quadrature_error;
            o.build_seconds = seconds_since(t0);

            t0 = std::chrono::steady_clock::now();
            o.steady = solve_steady(gen, options.solve);
            o.solve_seconds = seconds_since(t0);

            const PairedSpectrum full = antisymmetric_spectrum(o.steady->correlation.gamma);
            for (double nu : full.nus) o.max_nu = std::max(o.max_nu, nu);

            t0 = std::chrono::steady_clock::now();
            o.record.rows = scaling_rows(o.steady->correlation, ells, &o.row_errors);
            o.entanglement_seconds = seconds_since(t0);
        } catch (const std::exception& e) {
            o.error = e.what();
            o.record.rows.clear();
        }
        out.push_back(std::move(o));
    }
    return out;
}

LogFit fit_log(const std::vector<ScalingRow>& rows, FitWindow window, bool include_flagged) {
    std::vector<const ScalingRow*> pts;
    for (const auto& r : rows) {
        if (usable(r, window, include_flagged)) pts.push_back(&r);
    }
    if (pts.size() < 3) {
        std::ostringstream os;
        os << "fit_log: " << pts.size() << " usable point(s) in window [" << window.lo << ", " << window.hi
           << "], need at least 3";
        throw FitError(os.str());
    }
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = std::log(pts[static_cast<std::size_t>(i)]->chord);
        A(i, 1) = 1.0;
        y(i) = pts[static_cast<std::size_t>(i)]->fln;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < 2) throw FitError("fit_log: all usable points share one chord length");
    const Eigen::Vector2d coef = qr.solve(y);

    LogFit fit;
    fit.c_tilde = coef(0);
    fit.b = coef(1);
    fit.window = window;
    fit.n_points = static_cast<int>(n);
    const double ss_res = (A * coef - y).squaredNorm();
    const double ss_tot = (y.array() - y.mean()).square().sum();
    fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    return fit;
}

double superlog_score(const std::vector<ScalingRow>& rows, FitWindow small, FitWindow large, bool include_flagged) {
    const LogFit fit = fit_log(rows, small, include_flagged);
    double sum = 0.0;
    int count = 0;
    for (const auto& r : rows) {
        if (!usable(r, large, include_flagged)) continue;
        const double pred = fit.c_tilde * std::log(r.chord) + fit.b;
        sum += (r.fln - pred) / pred;
        ++count;
    }
    if (count < 3) {
        std::ostringstream os;
        os << "superlog_score: " << count << " usable point(s) in the large window [" << large.lo << ", "
           << large.hi << "], need at least 3";
        throw FitError(os.str());
    }
    return sum / count;
}

} // namespace chainfln
