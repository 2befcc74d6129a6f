// model.hpp — Open-boundary tight-binding chain: dispersion, sine eigenbasis,
// and the orthogonal map between normal-mode and real-space Majorana operators.
//
// Majorana ordering (0-based storage): index 2j is the "real" operator
// (d + d^dagger)/sqrt(2) of mode/site j, index 2j+1 is i(d^dagger - d)/sqrt(2).
// With this interleaving K = U (x) 1_2 is literally a Kronecker product.

#pragma once

#include <Eigen/Dense>

namespace chainfln {

// Chain of N sites with on-site parameter h, energies in units of the hopping J = 1.
struct ChainSpec {
    int N{1};
    double h{0.0};

    // Throws std::invalid_argument when N < 1. Warns (does not throw) when |h| > 2.
    void validate() const;
    bool critical() const noexcept { return h >= -2.0 && h <= 2.0; }
};

struct EigenBasis {
    Eigen::VectorXd energies; // energies(k-1) = E_k, k = 1..N (ascending)
    Eigen::MatrixXd U;        // U(n-1, k-1) = sqrt(2/(N+1)) sin(pi n k / (N+1))
    Eigen::MatrixXd K;        // 2N x 2N, U (x) 1_2

    int size() const noexcept { return static_cast<int>(energies.size()); }
};

// E_k = -h - 2 cos(pi k / (N+1)) for 1 <= k <= N; std::out_of_range otherwise.
double dispersion(const ChainSpec& spec, int k);

// Real single-particle matrix of H_S: -h on the diagonal, -1 on the first off-diagonals.
Eigen::MatrixXd hopping_matrix(const ChainSpec& spec);

EigenBasis eigenbasis(const ChainSpec& spec);

// K = U (x) 1_2; row block n maps (m_{2k-1}, m_{2k}) onto (w_{2n-1}, w_{2n}).
Eigen::MatrixXd majorana_basis_change(const Eigen::MatrixXd& U);
inline Eigen::MatrixXd majorana_basis_change(const EigenBasis& basis) {
    return majorana_basis_change(basis.U);
}

} // namespace chainfln
