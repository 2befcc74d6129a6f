#include "chainfln/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>

namespace chainfln {

void QuadratureConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("QuadratureConfig: ") + name + " must be positive");
        }
    };
    positive(rel_tol, "rel_tol");
    positive(abs_tol, "abs_tol");
    positive(x_max_factor, "x_max_factor");
    if (pv_window) positive(*pv_window, "pv_window");
    if (max_intervals < 16) throw std::invalid_argument("QuadratureConfig: max_intervals must be >= 16");
}

namespace {

enum class Map { Finite, Linear, UpperTail, LowerTail };

struct Segment {
    const RealFunction* f;
    Map map;
    double a;
    double b;
};

double eval_segment(const Segment& s, double t) {
    switch (s.map) {
    case Map::Finite: {
        const double len = s.b - s.a;
        const double x = s.a + len * t * t * (3.0 - 2.0 * t);
        const double w = 6.0 * len * t * (1.0 - t);
        return w == 0.0 ? 0.0 : w * (*s.f)(x);
    }
    case Map::Linear:
        return (s.b - s.a) * (*s.f)(s.a + (s.b - s.a) * t);
    case Map::UpperTail:
        return (*s.f)(s.a / t) * s.a / (t * t);
    case Map::LowerTail:
        return (*s.f)(-s.a / t) * s.a / (t * t);
    }
    return 0.0;
}

struct WorkspaceDeleter {
    void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

gsl_integration_workspace* workspace(std::size_t limit) {
    thread_local std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws;
    thread_local std::size_t capacity = 0;
    if (!ws || capacity < limit) {
        ws.reset(gsl_integration_workspace_alloc(limit));
        capacity = limit;
    }
    return ws.get();
}

void disable_gsl_abort() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

QuadResult integrate_segments(const std::vector<Segment>& segs, const QuadratureConfig& cfg) {
    if (segs.empty()) return {};
    disable_gsl_abort();

    gsl_function F;
    F.function = [](double t, void* p) -> double { return eval_segment(*static_cast<const Segment*>(p), t); };

    const double seg_abs = cfg.abs_tol / static_cast<double>(segs.size());
    QuadResult total;
    for (const Segment& s : segs) {
        F.params = const_cast<Segment*>(&s);
        double result = 0.0;
        double abserr = 0.0;
        const int status = gsl_integration_qag(&F, 0.0, 1.0, seg_abs, cfg.rel_tol, cfg.max_intervals,
                                               GSL_INTEG_GAUSS21, workspace(cfg.max_intervals), &result, &abserr);
        if (!std::isfinite(result)) {
            throw QuadratureError("quadrature produced a non-finite value", abserr);
        }
        if (status != GSL_SUCCESS) {
            const double target = std::max(seg_abs, cfg.rel_tol * std::abs(result));
            if (!(abserr <= 10.0 * target)) {
                std::ostringstream msg;
                msg << "quadrature did not converge on [" << s.a << ", " << s.b << "] (" << gsl_strerror(status)
                    << "): estimate " << result << ", residual " << abserr << ", target " << target;
                throw QuadratureError(msg.str(), abserr);
            }
        }
        total.value += result;
        total.error += abserr;
    }
    return total;
}

// Sorted points strictly inside (lo, hi) with near-duplicates removed.
std::vector<double> interior_points(std::vector<double> pts, double lo, double hi) {
    std::vector<double> out;
    std::sort(pts.begin(), pts.end());
    for (double p : pts) {
        if (!std::isfinite(p)) continue;
        const double tol = 1e-9 * std::max(1.0, std::abs(p));
        if (p <= lo + tol || p >= hi - tol) continue;
        if (!out.empty() && p - out.back() <= tol) continue;
        out.push_back(p);
    }
    return out;
}

void append_finite(std::vector<Segment>& segs, const RealFunction* f, double lo, double hi,
                   const std::vector<double>& pts, Map map = Map::Finite) {
    double left = lo;
    for (double p : interior_points(pts, lo, hi)) {
        segs.push_back({f, map, left, p});
        left = p;
    }
    segs.push_back({f, map, left, hi});
}

// Geometric breakpoints between the feature scale and x_max so that the slowly
// decaying tails are not resolved by one oversized panel.
void add_geometric(std::vector<double>& pts, double x_max) {
    double scale = 1.0;
    for (double p : pts) scale = std::max(scale, std::abs(p));
    for (double s = 4.0 * scale; s < x_max; s *= 4.0) {
        pts.push_back(s);
        pts.push_back(-s);
    }
}

double line_extent(const std::vector<double>& pts, double x_max) {
    double ext = x_max;
    for (double p : pts) ext = std::max(ext, 1.5 * std::abs(p));
    return ext;
}

} // namespace

QuadResult integrate_line(const RealFunction& g, std::vector<double> breakpoints, double x_max,
                          const QuadratureConfig& cfg) {
    const double X = line_extent(breakpoints, x_max);
    add_geometric(breakpoints, X);
    std::vector<Segment> segs;
    segs.push_back({&g, Map::LowerTail, X, 0.0});
    append_finite(segs, &g, -X, X, breakpoints);
    segs.push_back({&g, Map::UpperTail, X, 0.0});
    return integrate_segments(segs, cfg);
}

QuadResult integrate_interval(const RealFunction& g, double a, double b, std::vector<double> breakpoints,
                              const QuadratureConfig& cfg) {
    if (!(a < b)) throw std::invalid_argument("integrate_interval: require a < b");
    std::vector<Segment> segs;
    append_finite(segs, &g, a, b, breakpoints);
    return integrate_segments(segs, cfg);
}

QuadResult principal_value(const RealFunction& g, double pole, std::vector<double> breakpoints, double window,
                           double x_max, const QuadratureConfig& cfg) {
    if (!(window > 0.0)) throw std::invalid_argument("principal_value: window must be positive");

    const RealFunction outer = [&](double x) { return g(x) / (x - pole); };
    const RealFunction folded = [&](double t) { return (g(pole + t) - g(pole - t)) / t; };

    std::vector<double> window_pts;
    for (double p : breakpoints) {
        const double d = std::abs(p - pole);
        if (d > 0.0 && d < window) window_pts.push_back(d);
    }

    breakpoints.push_back(pole - window);
    breakpoints.push_back(pole + window);
    const double X = std::max(line_extent(breakpoints, x_max), std::abs(pole) + 2.0 * window);
    add_geometric(breakpoints, X);

    std::vector<Segment> segs;
    segs.push_back({&outer, Map::LowerTail, X, 0.0});
    append_finite(segs, &outer, -X, pole - window, breakpoints);
    append_finite(segs, &folded, 0.0, window, window_pts, Map::Linear);
    append_finite(segs, &outer, pole + window, X, breakpoints);
    segs.push_back({&outer, Map::UpperTail, X, 0.0});
    return integrate_segments(segs, cfg);
}

} // namespace chainfln
