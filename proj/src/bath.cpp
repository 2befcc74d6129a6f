#include "chainfln/bath.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace chainfln {

namespace {

void require_computable(const BathSpec& b) {
    if (!(b.T > 0.0) || !(b.Omega > 0.0) || !(b.gamma >= 0.0) || !std::isfinite(b.mu)) {
        throw std::invalid_argument("BathSpec: require T > 0, Omega > 0, gamma >= 0 and finite mu");
    }
}

double pv_window(const QuadratureConfig& quad, double scale) {
    return quad.pv_window ? *quad.pv_window : scale / 10.0;
}

} // namespace

void BathSpec::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("BathSpec: ") + name + " must be positive and finite");
        }
    };
    positive(T, "T");
    positive(gamma, "gamma");
    positive(Omega, "Omega");
    if (!std::isfinite(mu)) throw std::invalid_argument("BathSpec: mu must be finite");
}

std::vector<std::string> BathSpec::advisories() const {
    std::vector<std::string> notes;
    if (gamma >= Omega) {
        std::ostringstream os;
        os << "weak-coupling advisory: gamma = " << gamma << " >= Omega = " << Omega
           << "; the Born-Markov regime assumes gamma << Omega";
        notes.push_back(os.str());
    }
    return notes;
}

double fermi_dirac(const BathSpec& bath, double x) {
    const double y = (x - bath.mu) / bath.T;
    if (y >= 0.0) {
        const double e = std::exp(-y);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(y));
}

double spectral_density(const BathSpec& bath, double x) {
    if (x <= 0.0) return 0.0;
    return bath.gamma * x / (x * x + bath.Omega * bath.Omega);
}

double bath_spectrum(const BathSpec& bath, double omega) {
    // 1 - f(w) is f evaluated at the mirrored point 2 mu - w.
    if (omega > 0.0) return spectral_density(bath, omega) * fermi_dirac(bath, 2.0 * bath.mu - omega);
    if (omega < 0.0) return spectral_density(bath, -omega) * fermi_dirac(bath, -omega);
    return 0.0;
}

double jump_spectrum(const BathSpec& bath, double omega) {
    return std::sqrt(bath_spectrum(bath, omega) / (2.0 * std::numbers::pi));
}

std::vector<double> spectrum_features(const BathSpec& bath) {
    const double m = bath.mu;
    const double t = bath.T;
    const double o = bath.Omega;
    return {0.0, m, -m, m + 4.0 * t, m - 4.0 * t, -m + 4.0 * t, -m - 4.0 * t, o, -o};
}

SpectralFunction ohmic_spectral_function(const BathSpec& bath) {
    return {[bath](double x) { return bath_spectrum(bath, x); }, spectrum_features(bath), bath.Omega};
}

SpectralValue half_fourier_transform(const SpectralFunction& fn, double omega, const QuadratureConfig& quad) {
    quad.validate();
    // P int C(x)/(w - x) dx = -P int C(x)/(x - w) dx
    const QuadResult pv = principal_value(fn.spectrum, omega, fn.features, pv_window(quad, fn.scale),
                                          quad.x_max_factor * fn.scale, quad);
    return {{std::numbers::pi * fn.spectrum(omega), -pv.value}, pv.error};
}

SpectralValue half_fourier_gamma_detailed(const BathSpec& bath, double omega, const QuadratureConfig& quad) {
    require_computable(bath);
    return half_fourier_transform(ohmic_spectral_function(bath), omega, quad);
}

std::complex<double> half_fourier_gamma(const BathSpec& bath, double omega, const QuadratureConfig& quad) {
    return half_fourier_gamma_detailed(bath, omega, quad).value;
}

SpectralValue ule_pair_integral_detailed(const BathSpec& bath, double omega, double omega_p,
                                         const QuadratureConfig& quad) {
    require_computable(bath);
    quad.validate();
    const RealFunction product = [&](double x) {
        return std::sqrt(bath_spectrum(bath, x - omega) * bath_spectrum(bath, x + omega_p));
    };

    std::vector<double> features;
    for (double p : spectrum_features(bath)) {
        features.push_back(p + omega);
        features.push_back(p - omega_p);
    }
    const QuadResult pv = principal_value(product, 0.0, std::move(features), pv_window(quad, bath.Omega),
                                          quad.x_max_factor * bath.Omega, quad);
    const double re = std::numbers::pi * std::sqrt(bath_spectrum(bath, -omega) * bath_spectrum(bath, omega_p));
    return {{re, -pv.value}, pv.error};
}

std::complex<double> ule_pair_integral(const BathSpec& bath, double omega, double omega_p,
                                       const QuadratureConfig& quad) {
    return ule_pair_integral_detailed(bath, omega, omega_p, quad).value;
}

} // namespace chainfln
