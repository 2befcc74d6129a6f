// bath.hpp — Fermionic reservoir spectral functions.
//
// All quantities follow one bath with temperature T, chemical potential mu and
// an Ohmic spectral density with Lorentz-Drude cutoff,
//     J(x) = theta(x) gamma x / (x^2 + Omega^2).
// C(w) is the Fourier transform of the bath correlation function,
//     C(w) = J(-w) f(-w) + J(w) [1 - f(w)],
// and is nonnegative everywhere, vanishing at w = 0.

#pragma once

#include "chainfln/quadrature.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace chainfln {

struct BathSpec {
    double T{10.0};
    double mu{1.0};
    double gamma{0.2};
    double Omega{10.0};

    // Throws std::invalid_argument unless T, gamma, Omega > 0 and mu finite.
    void validate() const;
    // Non-fatal notes, e.g. the weak-coupling advisory when gamma >= Omega.
    std::vector<std::string> advisories() const;
};

// 1 / (1 + exp((x - mu)/T)); evaluated so that f(mu + d) + f(mu - d) == 1 exactly
// and without overflow for any |x - mu| / T.
double fermi_dirac(const BathSpec& bath, double x);

double spectral_density(const BathSpec& bath, double x);

double bath_spectrum(const BathSpec& bath, double omega);

// Fourier transform of the "jump" correlation function, sqrt(C(w) / 2 pi).
double jump_spectrum(const BathSpec& bath, double omega);

// Points where C(w) has a kink, a Fermi step or a Lorentz-Drude scale.
std::vector<double> spectrum_features(const BathSpec& bath);

struct SpectralValue {
    std::complex<double> value;
    double error{0.0}; // absolute quadrature error estimate of the imaginary part
};

// A nonnegative spectrum given as a callable; the extension point for
// spectral densities other than Lorentz-Drude. `scale` plays the role of Omega
// for the default PV window and the tail cutoff.
struct SpectralFunction {
    std::function<double(double)> spectrum;
    std::vector<double> features;
    double scale{1.0};
};

SpectralFunction ohmic_spectral_function(const BathSpec& bath);

// gamma(w) = int_0^inf dtau C(tau) e^{i w tau}
//          = pi C(w) + i P int dx C(x) / (w - x).
SpectralValue half_fourier_transform(const SpectralFunction& fn, double omega, const QuadratureConfig& quad);
std::complex<double> half_fourier_gamma(const BathSpec& bath, double omega, const QuadratureConfig& quad);
SpectralValue half_fourier_gamma_detailed(const BathSpec& bath, double omega, const QuadratureConfig& quad);

// I(w, w') = pi sqrt(C(-w) C(w')) - i P int dx/x sqrt(C(x - w) C(x + w')).
std::complex<double> ule_pair_integral(const BathSpec& bath, double omega, double omega_p,
                                       const QuadratureConfig& quad);
SpectralValue ule_pair_integral_detailed(const BathSpec& bath, double omega, double omega_p,
                                         const QuadratureConfig& quad);

} // namespace chainfln
