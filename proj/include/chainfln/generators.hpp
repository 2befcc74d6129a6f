// generators.hpp — Pseudo-Lindblad coefficient blocks (L, M) for the three
// master equations and the Lyapunov generators P = 2 Re[M - L], Q = -4 Im M.
//
// Matrices are indexed by normal-mode Majoranas with the interleaved ordering
// of model.hpp: entries (2k, 2q), (2k, 2q+1), (2k+1, 2q), (2k+1, 2q+1) form the
// 2x2 block of the mode pair (k, q).

#pragma once

#include "chainfln/bath.hpp"
#include "chainfln/model.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace chainfln {

enum class EquationKind { NonlocalLindblad, Redfield, ULE };

// "nonlocal", "redfield", "ule"
std::string_view to_string(EquationKind kind);
// Accepts the names above (case-insensitive) plus "lindblad" and "secular" for
// the nonlocal kind. Throws std::invalid_argument otherwise.
EquationKind parse_kind(std::string_view name);

enum class Basis { RealSpace, NormalMode };

struct BlockCoefficients {
    Eigen::MatrixXcd L; // anti-Hermitian
    Eigen::MatrixXcd M; // Hermitian
    EquationKind kind{EquationKind::Redfield};
    double hermiticity_residual{0.0}; // max deviation removed by the (anti-)Hermitian projection
    double symmetry_residual{0.0};    // ULE only: max |A - A^T|, |B - B^T|, |D + C^T|
    double quadrature_error{0.0};     // largest absolute error estimate over all integrals
};

struct Provenance {
    ChainSpec chain;
    BathSpec left;
    BathSpec right;
    QuadratureConfig quad;
};

struct GeneratorMatrices {
    Eigen::MatrixXd P_tilde;
    Eigen::MatrixXd Q_tilde;
    EquationKind kind{EquationKind::Redfield};
    Basis basis{Basis::RealSpace};
    Provenance provenance;
    double quadrature_error{0.0};
};

// Raw coefficient matrices of the normal-mode master equation, before they are
// arranged into L and M. Redfield uses only A and D.
struct ModeCoefficients {
    Eigen::MatrixXcd A;
    Eigen::MatrixXcd B;
    Eigen::MatrixXcd C;
    Eigen::MatrixXcd D;
    double quadrature_error{0.0};
};

// A_kq = sum_a phi_ak phi_aq [g_a(E_k) + g_a(-E_k)], D_kq = i sum_a phi_ak phi_aq [g_a(E_k) - g_a(-E_k)].
ModeCoefficients redfield_mode_coefficients(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                                            const QuadratureConfig& quad);

// A, B, C from the sign sums over I_a(s E_k, s' E_q); D from the sine-cosine
// combination, so that D = -C^T can be checked rather than assumed.
ModeCoefficients ule_mode_coefficients(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                                       const QuadratureConfig& quad);

BlockCoefficients redfield_coefficients(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                                        const QuadratureConfig& quad);
BlockCoefficients ule_coefficients(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                                   const QuadratureConfig& quad);
// Redfield blocks with every k != q block set to zero.
BlockCoefficients secular_coefficients(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                                       const QuadratureConfig& quad);

BlockCoefficients coefficients(EquationKind kind, const ChainSpec& chain, const BathSpec& left,
                               const BathSpec& right, const QuadratureConfig& quad);

struct LyapunovPair {
    Eigen::MatrixXd P;
    Eigen::MatrixXd Q;
};

// P = 2 Re[M - L], Q = -4 Im M. Throws std::runtime_error if M is not
// Hermitian or L not anti-Hermitian beyond 1e-8.
LyapunovPair assemble_PQ(const BlockCoefficients& coeffs);

// P~ = K P K^T, Q~ = K Q K^T.
LyapunovPair to_real_space(const LyapunovPair& pq, const Eigen::MatrixXd& K);

GeneratorMatrices build_generators(EquationKind kind, const ChainSpec& chain, const BathSpec& left,
                                   const BathSpec& right, const QuadratureConfig& quad,
                                   Basis basis = Basis::RealSpace);

// z_k = Im D_kk / Re A_kk of the Redfield coefficients; the secular steady state
// in normal modes is the direct sum of [[0, z_k], [-z_k, 0]].
Eigen::VectorXd secular_occupation_parameters(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                                              const QuadratureConfig& quad);

} // namespace chainfln
