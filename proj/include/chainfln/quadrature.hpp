// quadrature.hpp — Real-line and Cauchy principal-value quadrature.
//
// The real line is cut into panels at caller-supplied breakpoints inside
// [-x_max, x_max]; each finite panel is integrated through a smoothstep change
// of variables (kills integrable square-root endpoint behaviour), and the two
// tails are mapped onto (0, 1] by x = +-x_max / t. Every panel gets its own
// adaptive Gauss-Kronrod run (GSL QAG, 21 points) with the relative tolerance
// applied per panel and the absolute tolerance shared between panels.
//
// Principal values P int g(x)/(x - x0) dx use a symmetric window
// [x0 - w, x0 + w] on which the integrand is folded into
// (g(x0 + t) - g(x0 - t)) / t, t in (0, w], integrated on a plain linear map;
// the pure-pole part of the window vanishes by symmetry.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainfln {

struct QuadratureConfig {
    double rel_tol{1e-8};
    double abs_tol{1e-12};
    std::optional<double> pv_window; // half-width of the PV window; unset means Omega / 10
    double x_max_factor{200.0};      // finite panels extend to x_max_factor * Omega
    std::size_t max_intervals{4000};

    void validate() const; // throws std::invalid_argument on non-positive fields
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    // Achieved absolute error estimate when the requested tolerance was missed.
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

struct QuadResult {
    double value{0.0};
    double error{0.0};
};

using RealFunction = std::function<double(double)>;

// int_{-inf}^{inf} g(x) dx.
QuadResult integrate_line(const RealFunction& g, std::vector<double> breakpoints, double x_max,
                          const QuadratureConfig& cfg);

// int_a^b g(x) dx with interior breakpoints (a < b, both finite).
QuadResult integrate_interval(const RealFunction& g, double a, double b,
                              std::vector<double> breakpoints, const QuadratureConfig& cfg);

// P int_{-inf}^{inf} g(x) / (x - pole) dx.
QuadResult principal_value(const RealFunction& g, double pole, std::vector<double> breakpoints,
                           double window, double x_max, const QuadratureConfig& cfg);

} // namespace chainfln
