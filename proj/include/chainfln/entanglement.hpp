// entanglement.hpp — Fermionic logarithmic negativity, Renyi and von Neumann
// entropies and mutual information of Gaussian states from their real-space
// Majorana correlation matrix. Subsystem A is sites 1..l (Majoranas 0..2l-1).

#pragma once

#include "chainfln/steady_state.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace chainfln {

struct TransposePair {
    Eigen::MatrixXcd gamma_plus;  // [[-G_AA,  i G_AB], [ i G_BA, G_BB]]
    Eigen::MatrixXcd gamma_minus; // [[-G_AA, -i G_AB], [-i G_BA, G_BB]]
};

class SingularCrossError : public std::runtime_error {
public:
    SingularCrossError(const std::string& what, double smallest) : std::runtime_error(what), smallest_(smallest) {}
    double smallest_singular_value() const noexcept { return smallest_; }

private:
    double smallest_;
};

// Raised for |nu| > 1 + 1e-8 when the caller did not allow real-part evaluation.
class PositivityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One nu >= 0 per +-i nu eigenvalue pair, plus the number of anomalies met
// while pairing (imaginary residues above 1e-8 or unmatched partners).
struct PairedSpectrum {
    std::vector<double> nus;
    int flags{0};
};

TransposePair partial_transpose_pair(const MajoranaCorrelation& corr, int ell);

// Gamma_x = -i + i (1 - i G_-) (1 - G_+ G_-)^{-1} (1 - i G_+), via LU solves.
// Throws SingularCrossError if the reciprocal condition estimate is below 1e-12.
Eigen::MatrixXcd cross_correlation(const TransposePair& pair);

// Spectrum of a real antisymmetric matrix.
PairedSpectrum antisymmetric_spectrum(const Eigen::MatrixXd& gamma);
// Spectrum of a complex correlation matrix (Gamma_x). Takes the real
// antisymmetric route when the imaginary and symmetric parts are below 1e-8,
// otherwise a general complex eigensolver with greedy +-pairing.
PairedSpectrum complex_spectrum(const Eigen::MatrixXcd& gamma);

struct EntropyOptions {
    bool allow_real_part{true}; // evaluate |nu| > 1 through real parts instead of throwing
};

// S_a = 1/(1-a) sum_j ln[((1-nu_j)/2)^a + ((1+nu_j)/2)^a]. |nu| in (1, 1 + 1e-8]
// is clipped to 1; larger values increment *flags and use the real part. For a < 1 the
// distance e = 1 - |nu| enters as e^3 / (e^2 + 1e-24), which suppresses rounding noise of
// near-pure modes and changes nothing for e >> 1e-12.
double renyi_entropy(const std::vector<double>& nus, double alpha, int* flags = nullptr,
                     const EntropyOptions& options = {});
double von_neumann(const std::vector<double>& nus, int* flags = nullptr);

struct EntanglementReport {
    double fln{0.0};
    double mutual_information{0.0};
    double renyi_half_cross{0.0};
    double renyi2_full{0.0};
    double s_a{0.0};
    double s_b{0.0};
    double s_full{0.0};
    int positivity_flags{0};
};

// Caches the full-system spectrum so that many cuts of one state are cheap.
class EntanglementAnalyzer {
public:
    explicit EntanglementAnalyzer(MajoranaCorrelation corr);

    EntanglementReport report(int ell) const;
    double mutual_information(int ell) const;
    int sites() const noexcept { return corr_.sites(); }

private:
    MajoranaCorrelation corr_;
    double s2_full_{0.0};
    double s_full_{0.0};
    int full_flags_{0};
};

EntanglementReport fln(const MajoranaCorrelation& corr, int ell);
double mutual_information(const MajoranaCorrelation& corr, int ell);

} // namespace chainfln
