// analysis.hpp — l-sweeps over the three master equations, chord lengths and
// logarithmic scaling fits E_F = c ln X_l + b.

#pragma once

#include "chainfln/entanglement.hpp"
#include "chainfln/generators.hpp"
#include "chainfln/steady_state.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainfln {

// X_l = (N / pi) sin(pi l / N), for 1 <= l <= N.
double chord_length(int ell, int N);

// Every l in 2..N/2 for N <= 200, otherwise about 60 geometrically spaced cuts.
std::vector<int> default_ell_grid(int N);

struct ScalingRow {
    int l{0};
    double chord{0.0};
    double fln{0.0};
    double mutual_info{0.0};
    double s_a{0.0};
    double s_b{0.0};
    double s_full{0.0};
    int flags{0};
};

struct ScalingRecord {
    EquationKind kind{EquationKind::NonlocalLindblad};
    int N{0};
    std::vector<ScalingRow> rows;
};

struct KindOutcome {
    ScalingRecord record;
    std::optional<SteadyStateReport> steady;
    double quadrature_error{0.0};
    double max_nu{0.0}; // largest |nu| of the full steady state
    double build_seconds{0.0};
    double solve_seconds{0.0};
    double entanglement_seconds{0.0};
    std::string error;                 // empty on success
    std::vector<std::string> row_errors;

    bool ok() const noexcept { return error.empty(); }
};

struct SweepOptions {
    SolveOptions solve;
};

// One steady-state solve per kind followed by one entanglement evaluation per
// cut. A failing kind is reported in its outcome and the remaining kinds still
// run. Rows are produced in the order of `ells`, which must be strictly increasing.
std::vector<KindOutcome> sweep(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                               const std::vector<EquationKind>& kinds, const std::vector<int>& ells,
                               const QuadratureConfig& quad, const SweepOptions& options = {});

// Rows for an already solved real-space state.
std::vector<ScalingRow> scaling_rows(const MajoranaCorrelation& corr, const std::vector<int>& ells,
                                     std::vector<std::string>* row_errors = nullptr);

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitWindow {
    double lo{0.0};
    double hi{0.0};
};

struct LogFit {
    double c_tilde{0.0};
    double b{0.0};
    double r_squared{0.0};
    FitWindow window;
    int n_points{0};
};

// Least squares of fln against ln(chord) over rows with lo <= l <= hi. Rows with
// flags are skipped unless include_flagged; non-finite rows are always skipped.
LogFit fit_log(const std::vector<ScalingRow>& rows, FitWindow window, bool include_flagged = false);
inline LogFit fit_log(const ScalingRecord& record, FitWindow window, bool include_flagged = false) {
    return fit_log(record.rows, window, include_flagged);
}

// Fits on `small`, extrapolates to the rows in `large` and returns the mean of
// (observed - predicted) / predicted there.
double superlog_score(const std::vector<ScalingRow>& rows, FitWindow small, FitWindow large,
                      bool include_flagged = false);
inline double superlog_score(const ScalingRecord& record, FitWindow small, FitWindow large,
                             bool include_flagged = false) {
    return superlog_score(record.rows, small, large, include_flagged);
}

} // namespace chainfln
