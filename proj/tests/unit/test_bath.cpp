#include "chainfln/bath.hpp"
#include "chainfln/model.hpp"
#include "oracles/time_domain.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace chainfln;

namespace {
const BathSpec kLeft{10.0, 1.0, 0.2, 10.0};
const oracle::Bath kLeftOracle{10.0, 1.0, 0.2, 10.0};
} // namespace

TEST_SUITE("bath") {

TEST_CASE("Fermi-Dirac distribution") {
    CHECK(fermi_dirac(kLeft, kLeft.mu) == 0.5);
    CHECK(std::abs(fermi_dirac({1e-6, 1.0, 0.2, 10.0}, 2.0)) < 1e-12);
    const double x = 3.0;
    const double tanh_form = 0.5 * (1.0 - std::tanh((x - 1.0) / (2.0 * 10.0)));
    const double exp_form = 1.0 / (1.0 + std::exp((x - 1.0) / 10.0));
    CHECK(std::abs(fermi_dirac(kLeft, x) - exp_form) < 1e-15);
    CHECK(std::abs(fermi_dirac(kLeft, x) - tanh_form) < 1e-15);
    for (double d : {0.1, 3.0, 40.0, 1e4}) CHECK(fermi_dirac(kLeft, 1.0 + d) + fermi_dirac(kLeft, 1.0 - d) == 1.0);
    CHECK(fermi_dirac(kLeft, 1e9) == 0.0);
    CHECK(fermi_dirac(kLeft, -1e9) == 1.0);
}

TEST_CASE("Ohmic spectral density") {
    CHECK(spectral_density(kLeft, -1.0) == 0.0);
    CHECK(spectral_density(kLeft, 0.0) == 0.0);
    CHECK(std::abs(spectral_density(kLeft, 10.0) - 0.01) < 1e-17);
}

TEST_CASE("bath spectrum") {
    CHECK(bath_spectrum(kLeft, 0.0) == 0.0);
    const double J2 = 0.2 * 2.0 / (4.0 + 100.0);
    const double f2 = 1.0 / (1.0 + std::exp((2.0 - 1.0) / 10.0));
    CHECK(std::abs(bath_spectrum(kLeft, 2.0) - J2 * (1.0 - f2)) < 1e-16);
    for (double w = 0.05; w < 60.0; w *= 1.3) {
        const double ratio = bath_spectrum(kLeft, w) / bath_spectrum(kLeft, -w);
        CHECK(ratio == doctest::Approx(std::exp((w - kLeft.mu) / kLeft.T)).epsilon(1e-12));
    }
    for (double w = -200.0; w <= 200.0; w += 0.37) CHECK(bath_spectrum(kLeft, w) >= 0.0);
}

TEST_CASE("jump spectrum") {
    CHECK(jump_spectrum(kLeft, 0.0) == 0.0);
    for (double w = -30.0; w <= 30.0; w += 0.7) {
        const double g = jump_spectrum(kLeft, w);
        CHECK(2.0 * M_PI * g * g == doctest::Approx(bath_spectrum(kLeft, w)).epsilon(1e-14));
    }
    // Positive-frequency tail; the negative side is suppressed by the Fermi factor.
    for (double w : {1e4, 1e5}) {
        CHECK(jump_spectrum(kLeft, w) / std::sqrt(kLeft.gamma / (2.0 * M_PI * w)) == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK(bath_spectrum(kLeft, -2000.0) < 1e-80);
}

TEST_CASE("validation and advisories") {
    CHECK_THROWS_AS(BathSpec({0.0, 1.0, 0.2, 10.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(BathSpec({1.0, 1.0, -0.2, 10.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(BathSpec({1.0, 1.0, 0.2, 0.0}).validate(), std::invalid_argument);
    CHECK(kLeft.advisories().empty());
    CHECK(BathSpec({10.0, 1.0, 10.0, 1.0}).advisories().size() == 1);
}

TEST_CASE("gamma: real part and Lorentzian Hilbert transform") {
    const QuadratureConfig q;
    for (double w = -25.0; w <= 25.0; w += 1.9) CHECK(half_fourier_gamma(kLeft, w, q).real() == M_PI * bath_spectrum(kLeft, w));

    const double a = 1.3;
    SpectralFunction lorentz{[a](double x) { return a / (M_PI * (x * x + a * a)); }, {0.0}, 1.0};
    for (double w : {-4.0, -1.0, -0.1, 0.0, 0.6, 2.5, 12.0}) {
        const SpectralValue v = half_fourier_transform(lorentz, w, q);
        CHECK(std::abs(v.value.imag() - w / (w * w + a * a)) < 1e-8);
    }
}

TEST_CASE("gamma matches the damped time-domain integral at w = 1.5") {
    const QuadratureConfig q;
    const std::complex<double> lib = half_fourier_gamma(kLeft, 1.5, q);
    const std::complex<double> ref = oracle::gamma_oracle(kLeftOracle, 1.5);
    CHECK(std::abs(lib - ref) < 1e-6);
}

TEST_CASE("Im gamma has no quadrature jumps along a fine grid") {
    const QuadratureConfig q;
    const double step = 1e-3;
    for (double start : {-3.0, 0.1}) {
        std::vector<double> v;
        for (int i = 0; i <= 2900; ++i) v.push_back(half_fourier_gamma(kLeft, start + i * step, q).imag());
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < v.size(); ++i) worst = std::max(worst, std::abs(v[i + 1] - 2.0 * v[i] + v[i - 1]));
        CHECK(worst < 10.0 * q.rel_tol);
    }
}

TEST_CASE("pair integral: real part, symmetry and time-domain value") {
    const QuadratureConfig q;
    for (double w = -4.0; w <= 4.0; w += 0.9) {
        for (double wp = -4.0; wp <= 4.0; wp += 1.1) {
            const std::complex<double> v = ule_pair_integral(kLeft, w, wp, q);
            CHECK(v.real() == M_PI * std::sqrt(bath_spectrum(kLeft, -w) * bath_spectrum(kLeft, wp)));
            const std::complex<double> mirror = ule_pair_integral(kLeft, -wp, -w, q);
            CHECK(std::abs(v - mirror) < 1e-10);
        }
    }
    const ChainSpec chain{10, 1.1};
    const double e1 = dispersion(chain, 1);
    const double e2 = dispersion(chain, 2);
    const std::complex<double> lib = ule_pair_integral(kLeft, e1, e2, q);
    const std::complex<double> ref = oracle::pair_oracle(kLeftOracle, e1, e2);
    CHECK(std::abs(lib - ref) < 1e-5);
}

}
