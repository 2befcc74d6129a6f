#include "chainfln/generators.hpp"

#include "chainfln/log.hpp"
#include "chainfln/parallel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainfln {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using cplx = std::complex<double>;

std::string_view to_string(EquationKind kind) {
    switch (kind) {
    case EquationKind::NonlocalLindblad: return "nonlocal";
    case EquationKind::Redfield: return "redfield";
    case EquationKind::ULE: return "ule";
    }
    return "unknown";
}

EquationKind parse_kind(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "nonlocal" || s == "lindblad" || s == "secular" || s == "nonlocal_lindblad") {
        return EquationKind::NonlocalLindblad;
    }
    if (s == "redfield") return EquationKind::Redfield;
    if (s == "ule") return EquationKind::ULE;
    throw std::invalid_argument("unknown equation kind '" + std::string(name) +
                                "' (expected nonlocal, redfield or ule)");
}

namespace {

bool same_bath(const BathSpec& a, const BathSpec& b) {
    return a.T == b.T && a.mu == b.mu && a.gamma == b.gamma && a.Omega == b.Omega;
}

struct Couplings {
    Eigen::VectorXd energies;
    Eigen::VectorXd phi_left;
    Eigen::VectorXd phi_right;
};

Couplings couplings(const ChainSpec& chain) {
    const EigenBasis basis = eigenbasis(chain);
    return {basis.energies, basis.U.row(0).transpose(), basis.U.row(chain.N - 1).transpose()};
}

// gamma(+E_k) at column 0 and gamma(-E_k) at column 1.
struct GammaTable {
    Eigen::MatrixXcd values;
    double error{0.0};
};

GammaTable gamma_table(const BathSpec& bath, const Eigen::VectorXd& energies, const QuadratureConfig& quad) {
    const auto n = static_cast<std::size_t>(energies.size());
    GammaTable t{Eigen::MatrixXcd(n, 2), 0.0};
    std::vector<double> err(2 * n, 0.0);
    parallel_for(2 * n, [&](std::size_t i) {
        const std::size_t k = i / 2;
        const double w = (i % 2 == 0) ? energies(k) : -energies(k);
        const SpectralValue v = half_fourier_gamma_detailed(bath, w, quad);
        t.values(k, i % 2) = v.value;
        err[i] = v.error;
    });
    for (double e : err) t.error = std::max(t.error, e);
    return t;
}

// I(s_i, s_j) over the signed energies s_{2k} = E_k, s_{2k+1} = -E_k. Uses
// I(w, w') = I(-w', -w) to evaluate only one member of each mirrored pair.
struct PairTable {
    Eigen::MatrixXcd values;
    double error{0.0};
};

PairTable pair_table(const BathSpec& bath, const Eigen::VectorXd& energies, const QuadratureConfig& quad) {
    const Eigen::Index n = 2 * energies.size();
    Eigen::VectorXd s(n);
    for (Eigen::Index k = 0; k < energies.size(); ++k) {
        s(2 * k) = energies(k);
        s(2 * k + 1) = -energies(k);
    }
    std::vector<std::pair<Eigen::Index, Eigen::Index>> canonical;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const std::pair<Eigen::Index, Eigen::Index> self{i, j};
            const std::pair<Eigen::Index, Eigen::Index> mirror{j ^ 1, i ^ 1};
            if (self <= mirror) canonical.push_back(self);
        }
    }
    PairTable t{Eigen::MatrixXcd(n, n), 0.0};
    std::vector<double> err(canonical.size(), 0.0);
    parallel_for(canonical.size(), [&](std::size_t c) {
        const auto [i, j] = canonical[c];
        const SpectralValue v = ule_pair_integral_detailed(bath, s(i), s(j), quad);
        t.values(i, j) = v.value;
        t.values(j ^ 1, i ^ 1) = v.value;
        err[c] = v.error;
    });
    for (double e : err) t.error = std::max(t.error, e);
    return t;
}

double max_abs(const MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Writes the 2x2 block (k, q) of a 2N x 2N matrix.
template <class Block>
void put_block(MatrixXcd& m, Eigen::Index k, Eigen::Index q, const Block& b) {
    m.block<2, 2>(2 * k, 2 * q) = b;
}

BlockCoefficients redfield_blocks(const ModeCoefficients& c, const Eigen::VectorXd& E, EquationKind kind) {
    const Eigen::Index n = E.size();
    BlockCoefficients out;
    out.kind = kind;
    out.L = MatrixXcd::Zero(2 * n, 2 * n);
    out.M = MatrixXcd::Zero(2 * n, 2 * n);
    out.quadrature_error = c.quadrature_error;
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index q = 0; q < n; ++q) {
            const double dE = (k == q) ? E(k) : 0.0;
            Eigen::Matrix2cd Lb;
            Lb << c.A(k, q) - std::conj(c.A(q, k)), dE - std::conj(c.D(q, k)),
                -dE + c.D(k, q), 0.0;
            Eigen::Matrix2cd Mb;
            Mb << c.A(k, q) + std::conj(c.A(q, k)), std::conj(c.D(q, k)),
                c.D(k, q), 0.0;
            put_block(out.L, k, q, 0.5 * Lb);
            put_block(out.M, k, q, 0.5 * Mb);
        }
    }
    return out;
}

void project_hermitian(BlockCoefficients& b) {
    const MatrixXcd M = 0.5 * (b.M + b.M.adjoint());
    const MatrixXcd L = 0.5 * (b.L - b.L.adjoint());
    b.hermiticity_residual = std::max(max_abs(b.M - M), max_abs(b.L - L));
    b.M = M;
    b.L = L;
    const double scale = std::max({1.0, max_abs(b.M), max_abs(b.L)});
    if (b.hermiticity_residual > 1e-10 * scale) {
        std::ostringstream os;
        os << to_string(b.kind) << ": (anti-)Hermitian projection removed " << b.hermiticity_residual;
        log::warn(os.str());
    }
}

} // namespace

ModeCoefficients redfield_mode_coefficients(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                                            const QuadratureConfig& quad) {
    quad.validate();
    const Couplings cp = couplings(chain);
    const GammaTable gl = gamma_table(left, cp.energies, quad);
    const GammaTable gr = same_bath(left, right) ? gl : gamma_table(right, cp.energies, quad);

    const Eigen::Index n = chain.N;
    ModeCoefficients c;
    c.A = MatrixXcd::Zero(n, n);
    c.D = MatrixXcd::Zero(n, n);
    c.B = MatrixXcd::Zero(n, n);
    c.C = MatrixXcd::Zero(n, n);
    c.quadrature_error = std::max(gl.error, gr.error);
    const cplx I(0.0, 1.0);
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx sum_l = gl.values(k, 0) + gl.values(k, 1);
        const cplx sum_r = gr.values(k, 0) + gr.values(k, 1);
        const cplx dif_l = gl.values(k, 0) - gl.values(k, 1);
        const cplx dif_r = gr.values(k, 0) - gr.values(k, 1);
        for (Eigen::Index q = 0; q < n; ++q) {
            const double wl = cp.phi_left(k) * cp.phi_left(q);
            const double wr = cp.phi_right(k) * cp.phi_right(q);
            c.A(k, q) = wl * sum_l + wr * sum_r;
            c.D(k, q) = I * (wl * dif_l + wr * dif_r);
        }
    }
    return c;
}

ModeCoefficients ule_mode_coefficients(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                                       const QuadratureConfig& quad) {
    quad.validate();
    const Couplings cp = couplings(chain);
    const PairTable tl = pair_table(left, cp.energies, quad);
    const PairTable tr = same_bath(left, right) ? tl : pair_table(right, cp.energies, quad);

    const Eigen::Index n = chain.N;
    ModeCoefficients c;
    c.A = MatrixXcd::Zero(n, n);
    c.B = MatrixXcd::Zero(n, n);
    c.C = MatrixXcd::Zero(n, n);
    c.D = MatrixXcd::Zero(n, n);
    c.quadrature_error = std::max(tl.error, tr.error);
    const cplx I(0.0, 1.0);
    constexpr std::array<int, 2> signs{+1, -1};
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index q = 0; q < n; ++q) {
            const double wl = cp.phi_left(k) * cp.phi_left(q);
            const double wr = cp.phi_right(k) * cp.phi_right(q);
            cplx a = 0.0, b = 0.0, cc = 0.0, d = 0.0;
            for (int is = 0; is < 2; ++is) {
                for (int js = 0; js < 2; ++js) {
                    const double sg = signs[is];
                    const double sgp = signs[js];
                    const Eigen::Index i = 2 * k + is;
                    const Eigen::Index j = 2 * q + js;
                    const cplx v = wl * tl.values(i, j) + wr * tr.values(i, j);
                    a += v;
                    b += -sg * sgp * v;
                    cc += -sgp * v;
                    d += sg * v;
                }
            }
            c.A(k, q) = 0.5 * a;
            c.B(k, q) = 0.5 * b;
            c.C(k, q) = 0.5 * I * cc;
            c.D(k, q) = -0.5 * I * d;
        }
    }
    return c;
}

BlockCoefficients redfield_coefficients(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                                        const QuadratureConfig& quad) {
    const ModeCoefficients c = redfield_mode_coefficients(chain, left, right, quad);
    BlockCoefficients out = redfield_blocks(c, eigenbasis(chain).energies, EquationKind::Redfield);
    project_hermitian(out);
    return out;
}

BlockCoefficients secular_coefficients(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                                       const QuadratureConfig& quad) {
    ModeCoefficients c = redfield_mode_coefficients(chain, left, right, quad);
    const Eigen::VectorXcd a = c.A.diagonal();
    const Eigen::VectorXcd d = c.D.diagonal();
    c.A = a.asDiagonal();
    c.D = d.asDiagonal();
    BlockCoefficients out = redfield_blocks(c, eigenbasis(chain).energies, EquationKind::NonlocalLindblad);
    project_hermitian(out);
    return out;
}

BlockCoefficients ule_coefficients(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                                   const QuadratureConfig& quad) {
    ModeCoefficients c = ule_mode_coefficients(chain, left, right, quad);
    const double scale = std::max({1e-300, max_abs(c.A), max_abs(c.B), max_abs(c.C)});
    const double residual = std::max({max_abs(c.A - c.A.transpose()), max_abs(c.B - c.B.transpose()),
                                      max_abs(c.D + c.C.transpose())});
    if (residual > 100.0 * quad.rel_tol * scale) {
        std::ostringstream os;
        os << "ule_coefficients: symmetry residual " << residual << " exceeds 100 * rel_tol * " << scale;
        throw std::runtime_error(os.str());
    }
    const MatrixXcd A = 0.5 * (c.A + c.A.transpose());
    const MatrixXcd B = 0.5 * (c.B + c.B.transpose());
    const MatrixXcd& C = c.C;

    const Eigen::VectorXd E = eigenbasis(chain).energies;
    const Eigen::Index n = chain.N;
    BlockCoefficients out;
    out.kind = EquationKind::ULE;
    out.symmetry_residual = residual;
    out.quadrature_error = c.quadrature_error;
    out.L = MatrixXcd::Zero(2 * n, 2 * n);
    out.M = MatrixXcd::Zero(2 * n, 2 * n);
    const cplx I(0.0, 1.0);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index q = 0; q < n; ++q) {
            const double half_dE = (k == q) ? 0.5 * E(k) : 0.0;
            Eigen::Matrix2cd Lb;
            Lb << I * A(k, q).imag(), half_dE + C(k, q).real(),
                -half_dE - C(q, k).real(), I * B(k, q).imag();
            Eigen::Matrix2cd Mb;
            Mb << A(k, q).real(), I * C(k, q).imag(),
                -I * C(q, k).imag(), B(k, q).real();
            put_block(out.L, k, q, Lb);
            put_block(out.M, k, q, Mb);
        }
    }
    project_hermitian(out);
    return out;
}

BlockCoefficients coefficients(EquationKind kind, const ChainSpec& chain, const BathSpec& left,
                               const BathSpec& right, const QuadratureConfig& quad) {
    switch (kind) {
    case EquationKind::NonlocalLindblad: return secular_coefficients(chain, left, right, quad);
    case EquationKind::Redfield: return redfield_coefficients(chain, left, right, quad);
    case EquationKind::ULE: return ule_coefficients(chain, left, right, quad);
    }
    throw std::invalid_argument("coefficients: unknown equation kind");
}

LyapunovPair assemble_PQ(const BlockCoefficients& coeffs) {
    const double herm = max_abs(coeffs.M - coeffs.M.adjoint());
    const double anti = max_abs(coeffs.L + coeffs.L.adjoint());
    if (herm > 1e-8 || anti > 1e-8) {
        std::ostringstream os;
        os << "assemble_PQ: M not Hermitian (" << herm << ") or L not anti-Hermitian (" << anti << ")";
        throw std::runtime_error(os.str());
    }
    LyapunovPair pq;
    pq.P = 2.0 * (coeffs.M - coeffs.L).real();
    pq.Q = -4.0 * coeffs.M.imag();
    return pq;
}

LyapunovPair to_real_space(const LyapunovPair& pq, const MatrixXd& K) {
    return {K * pq.P * K.transpose(), K * pq.Q * K.transpose()};
}

GeneratorMatrices build_generators(EquationKind kind, const ChainSpec& chain, const BathSpec& left,
                                   const BathSpec& right, const QuadratureConfig& quad, Basis basis) {
    const BlockCoefficients coeffs = coefficients(kind, chain, left, right, quad);
    LyapunovPair pq = assemble_PQ(coeffs);
    if (basis == Basis::RealSpace) pq = to_real_space(pq, eigenbasis(chain).K);

    GeneratorMatrices g;
    g.P_tilde = std::move(pq.P);
    g.Q_tilde = std::move(pq.Q);
    g.kind = kind;
    g.basis = basis;
    g.provenance = {chain, left, right, quad};
    g.quadrature_error = coeffs.quadrature_error;
    return g;
}

Eigen::VectorXd secular_occupation_parameters(const ChainSpec& chain, const BathSpec& left, const BathSpec& right,
                                              const QuadratureConfig& quad) {
    const ModeCoefficients c = redfield_mode_coefficients(chain, left, right, quad);
    Eigen::VectorXd z(chain.N);
    for (int k = 0; k < chain.N; ++k) z(k) = c.D(k, k).imag() / c.A(k, k).real();
    return z;
}

} // namespace chainfln
