#include "chainfln/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace chainfln;

TEST_SUITE("quadrature") {

TEST_CASE("config validation") {
    QuadratureConfig q;
    CHECK_NOTHROW(q.validate());
    q.rel_tol = 0.0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = {};
    q.pv_window = -1.0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = {};
    q.max_intervals = 4;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("finite interval with breakpoints") {
    const QuadratureConfig q;
    const RealFunction f = [](double x) { return std::abs(x - 0.3) + x * x; };
    const QuadResult r = integrate_interval(f, -1.0, 2.0, {0.3}, q);
    // int |x - 0.3| = (1.3^2 + 1.7^2)/2, int x^2 = (8 + 1)/3
    CHECK(std::abs(r.value - ((1.69 + 2.89) / 2.0 + 3.0)) < 1e-12);
    CHECK_THROWS_AS(integrate_interval(f, 1.0, 1.0, {}, q), std::invalid_argument);
}

TEST_CASE("whole line with algebraic tails") {
    const QuadratureConfig q;
    const RealFunction lorentz = [](double x) { return 1.0 / (1.0 + x * x); };
    CHECK(std::abs(integrate_line(lorentz, {0.0}, 50.0, q).value - M_PI) < 1e-10);
    const RealFunction gauss = [](double x) { return std::exp(-x * x); };
    CHECK(std::abs(integrate_line(gauss, {}, 10.0, q).value - std::sqrt(M_PI)) < 1e-12);
}

TEST_CASE("principal value of a Lorentzian") {
    const QuadratureConfig q;
    const double a = 0.7;
    const RealFunction g = [a](double x) { return a / (M_PI * (x * x + a * a)); };
    for (double pole : {-3.0, -0.4, 0.0, 0.25, 2.0}) {
        // P int g(x) / (x - pole) dx = -pole / (pole^2 + a^2)
        const QuadResult r = principal_value(g, pole, {0.0}, 0.1, 100.0, q);
        CHECK(std::abs(r.value + pole / (pole * pole + a * a)) < 1e-9);
    }
    CHECK_THROWS_AS(principal_value(g, 0.0, {}, 0.0, 100.0, q), std::invalid_argument);
}

TEST_CASE("unreachable tolerance raises QuadratureError") {
    QuadratureConfig q;
    q.rel_tol = 1e-14;
    q.abs_tol = 1e-16;
    q.max_intervals = 16;
    const RealFunction wild = [](double x) { return std::sin(1e4 * x * x); };
    CHECK_THROWS_AS(integrate_interval(wild, 0.0, 30.0, {}, q), QuadratureError);
}

}
