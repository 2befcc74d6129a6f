#include "chainfln/model.hpp"

#include "chainfln/log.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chainfln {

void ChainSpec::validate() const {
    if (N < 1) {
        throw std::invalid_argument("ChainSpec: N must be >= 1 (got " + std::to_string(N) + ")");
    }
    if (!std::isfinite(h)) {
        throw std::invalid_argument("ChainSpec: h must be finite");
    }
    if (!critical()) {
        log::warn("ChainSpec: |h| = " + std::to_string(std::abs(h)) +
                  " > 2, the chain is gapped (outside the critical regime)");
    }
}

double dispersion(const ChainSpec& spec, int k) {
    if (k < 1 || k > spec.N) {
        throw std::out_of_range("dispersion: mode index " + std::to_string(k) +
                                " outside 1.." + std::to_string(spec.N));
    }
    return -spec.h - 2.0 * std::cos(std::numbers::pi * k / (spec.N + 1.0));
}

Eigen::MatrixXd hopping_matrix(const ChainSpec& spec) {
    const int n = spec.N;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        H(i, i) = -spec.h;
        if (i + 1 < n) {
            H(i, i + 1) = -1.0;
            H(i + 1, i) = -1.0;
        }
    }
    return H;
}

EigenBasis eigenbasis(const ChainSpec& spec) {
    spec.validate();
    const int n = spec.N;
    const double norm = std::sqrt(2.0 / (n + 1.0));
    const double step = std::numbers::pi / (n + 1.0);

    EigenBasis basis;
    basis.energies.resize(n);
    basis.U.resize(n, n);
    for (int k = 1; k <= n; ++k) {
        basis.energies(k - 1) = dispersion(spec, k);
        for (int site = 1; site <= n; ++site) {
            // reduce site * k modulo the period so the sine argument stays below 2 pi
            const long m = (static_cast<long>(site) * k) % (2L * (n + 1));
            basis.U(site - 1, k - 1) = norm * std::sin(step * static_cast<double>(m));
        }
    }
    basis.K = majorana_basis_change(basis.U);
    return basis;
}

Eigen::MatrixXd majorana_basis_change(const Eigen::MatrixXd& U) {
    const Eigen::Index n = U.rows();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * n, 2 * U.cols());
    for (Eigen::Index site = 0; site < n; ++site) {
        for (Eigen::Index k = 0; k < U.cols(); ++k) {
            K(2 * site, 2 * k) = U(site, k);
            K(2 * site + 1, 2 * k + 1) = U(site, k);
        }
    }
    return K;
}

} // namespace chainfln
