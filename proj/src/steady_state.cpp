#include "chainfln/steady_state.hpp"

#include "chainfln/log.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace chainfln {

using Eigen::Index;
using Eigen::MatrixXd;
using cplx = std::complex<double>;

std::string_view to_string(SolverKind solver) {
    return solver == SolverKind::BartelsStewart ? "bartels-stewart" : "kronecker-dense";
}

namespace {

double max_abs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Start index and size (1 or 2) of each diagonal block of a real quasi-triangular matrix.
std::vector<std::pair<Index, Index>> diagonal_blocks(const MatrixXd& T) {
    std::vector<std::pair<Index, Index>> blocks;
    const Index n = T.rows();
    for (Index i = 0; i < n;) {
        if (i + 1 < n && T(i + 1, i) != 0.0) {
            blocks.emplace_back(i, 2);
            i += 2;
        } else {
            blocks.emplace_back(i, 1);
            i += 1;
        }
    }
    return blocks;
}

std::vector<cplx> schur_eigenvalues(const MatrixXd& T) {
    std::vector<cplx> eig;
    eig.reserve(static_cast<std::size_t>(T.rows()));
    for (const auto& [i, s] : diagonal_blocks(T)) {
        if (s == 1) {
            eig.emplace_back(T(i, i), 0.0);
            continue;
        }
        const double a = T(i, i), b = T(i, i + 1), c = T(i + 1, i), d = T(i + 1, i + 1);
        const double p = 0.5 * (a - d);
        const double disc = p * p + b * c;
        const double mid = 0.5 * (a + d);
        if (disc >= 0.0) {
            const double r = std::sqrt(disc);
            eig.emplace_back(mid + r, 0.0);
            eig.emplace_back(mid - r, 0.0);
        } else {
            const double r = std::sqrt(-disc);
            eig.emplace_back(mid, r);
            eig.emplace_back(mid, -r);
        }
    }
    return eig;
}

UniquenessReport margin_of(const std::vector<cplx>& eig) {
    UniquenessReport r;
    r.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eig.size(); ++i) {
        for (std::size_t j = i; j < eig.size(); ++j) {
            const double m = std::abs(eig[i] + eig[j]);
            if (m < r.margin) {
                r.margin = m;
                r.first = eig[i];
                r.second = eig[j];
            }
        }
    }
    if (eig.empty()) r.margin = 0.0;
    return r;
}

// Solves T Y + Y T^T = C for quasi-upper-triangular T.
MatrixXd solve_quasi_triangular(const MatrixXd& T, const MatrixXd& C) {
    const Index n = T.rows();
    const auto blocks = diagonal_blocks(T);
    MatrixXd Y = MatrixXd::Zero(n, n);

    for (auto bj = blocks.rbegin(); bj != blocks.rend(); ++bj) {
        const auto [j, s] = *bj;
        const Index jend = j + s;
        MatrixXd R = C.middleCols(j, s);
        if (jend < n) R.noalias() -= Y.rightCols(n - jend) * T.block(j, jend, s, n - jend).transpose();
        const MatrixXd Tjj = T.block(j, j, s, s);

        for (auto bi = blocks.rbegin(); bi != blocks.rend(); ++bi) {
            const auto [i, r] = *bi;
            const Index iend = i + r;
            MatrixXd rhs = R.middleRows(i, r);
            if (iend < n) {
                rhs.noalias() -= T.block(i, iend, r, n - iend) * Y.block(iend, j, n - iend, s);
            }
            const MatrixXd Tii = T.block(i, i, r, r);
            // vec(Tii X + X Tjj^T) = (1_s (x) Tii + Tjj (x) 1_r) vec(X)
            const Index m = r * s;
            MatrixXd sys = MatrixXd::Zero(m, m);
            for (Index a = 0; a < s; ++a) {
                sys.block(a * r, a * r, r, r) += Tii;
                for (Index b = 0; b < s; ++b) {
                    sys.block(a * r, b * r, r, r) += Tjj(a, b) * MatrixXd::Identity(r, r);
                }
            }
            const Eigen::VectorXd x =
                sys.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), m));
            Y.block(i, j, r, s) = Eigen::Map<const MatrixXd>(x.data(), r, s);
        }
    }
    return Y;
}

void require_square_pair(const MatrixXd& P, const MatrixXd& Q) {
    if (P.rows() != P.cols() || Q.rows() != Q.cols() || P.rows() != Q.rows()) {
        throw std::invalid_argument("Lyapunov solve: P and Q must be square with equal size");
    }
}

void put_le(std::ostream& os, std::uint64_t bits) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
    os.write(b.data(), 8);
}

std::uint64_t get_le(std::istream& is) {
    std::array<unsigned char, 8> b{};
    is.read(reinterpret_cast<char*>(b.data()), 8);
    if (!is) throw std::runtime_error("gamma dump: unexpected end of file");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
}

} // namespace

UniquenessReport uniqueness_report(const MatrixXd& P) {
    if (P.size() == 0) return {};
    const Eigen::RealSchur<MatrixXd> schur(P, false);
    if (schur.info() != Eigen::Success) throw std::runtime_error("uniqueness_check: Schur factorization failed");
    return margin_of(schur_eigenvalues(schur.matrixT()));
}

double uniqueness_check(const GeneratorMatrices& gen) { return uniqueness_report(gen.P_tilde).margin; }

double lyapunov_residual(const MatrixXd& P, const MatrixXd& Q, const MatrixXd& X) {
    return max_abs(P * X + X * P.transpose() - Q);
}

MatrixXd solve_lyapunov_bartels_stewart(const MatrixXd& P, const MatrixXd& Q) {
    require_square_pair(P, Q);
    const Eigen::RealSchur<MatrixXd> schur(P);
    if (schur.info() != Eigen::Success) throw std::runtime_error("Bartels-Stewart: Schur factorization failed");
    const MatrixXd& U = schur.matrixU();
    const MatrixXd C = U.transpose() * Q * U;
    const MatrixXd Y = solve_quasi_triangular(schur.matrixT(), C);
    return U * Y * U.transpose();
}

MatrixXd solve_lyapunov_kronecker(const MatrixXd& P, const MatrixXd& Q) {
    require_square_pair(P, Q);
    const Index n = P.rows();
    const Index m = n * n;
    MatrixXd sys = MatrixXd::Zero(m, m);
    // column-major vec: vec(P X) = (1 (x) P) vec X, vec(X P^T) = (P (x) 1) vec X
    for (Index b = 0; b < n; ++b) {
        sys.block(b * n, b * n, n, n) += P;
        for (Index a = 0; a < n; ++a) {
            if (P(b, a) != 0.0) sys.block(b * n, a * n, n, n).diagonal().array() += P(b, a);
        }
    }
    const Eigen::VectorXd x = sys.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(Q.data(), m));
    return Eigen::Map<const MatrixXd>(x.data(), n, n);
}

SteadyStateReport solve_steady(const GeneratorMatrices& gen, const SolveOptions& options) {
    const MatrixXd& P = gen.P_tilde;
    const MatrixXd& Q = gen.Q_tilde;
    require_square_pair(P, Q);

    SteadyStateReport rep;
    rep.solver = options.solver;
    rep.correlation.basis = gen.basis;

    const Eigen::RealSchur<MatrixXd> schur(P);
    if (schur.info() != Eigen::Success) throw std::runtime_error("solve_steady: Schur factorization failed");
    const UniquenessReport u = margin_of(schur_eigenvalues(schur.matrixT()));
    rep.uniqueness_margin = u.margin;
    if (!(u.margin > options.uniqueness_tol)) {
        std::ostringstream os;
        os << "steady state is not unique: eigenvalues " << u.first << " and " << u.second << " of P give |l_i + l_j| = "
           << u.margin << " <= " << options.uniqueness_tol;
        throw DegenerateSteadyStateError(os.str(), u.first, u.second);
    }

    MatrixXd G;
    if (options.solver == SolverKind::BartelsStewart) {
        const MatrixXd& U = schur.matrixU();
        const MatrixXd C = U.transpose() * Q * U;
        G = U * solve_quasi_triangular(schur.matrixT(), C) * U.transpose();
    } else {
        G = solve_lyapunov_kronecker(P, Q);
    }

    const MatrixXd anti = 0.5 * (G - G.transpose());
    rep.antisymmetry_residual = max_abs(G - anti);
    rep.correlation.gamma = anti;
    rep.residual = lyapunov_residual(P, Q, anti);

    const double scale = max_abs(Q);
    if (!std::isfinite(rep.residual) || rep.residual > options.residual_tol * scale) {
        std::ostringstream os;
        os << "solve_steady: residual " << rep.residual << " exceeds " << options.residual_tol << " * max|Q| = "
           << options.residual_tol * scale;
        throw SolverError(os.str(), rep.residual);
    }
    if (rep.antisymmetry_residual > 1e-9 * std::max(1.0, max_abs(anti))) {
        std::ostringstream os;
        os << "solve_steady: antisymmetry projection removed " << rep.antisymmetry_residual;
        log::warn(os.str());
    }
    return rep;
}

Trajectory evolve(const GeneratorMatrices& gen, const MajoranaCorrelation& gamma0, double t_final, double dt,
                  int record_every) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("evolve: dt must be positive");
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("evolve: t_final must be >= 0");
    if (record_every < 1) throw std::invalid_argument("evolve: record_every must be >= 1");
    const MatrixXd& P = gen.P_tilde;
    const MatrixXd& Q = gen.Q_tilde;
    if (gamma0.gamma.rows() != P.rows() || gamma0.gamma.cols() != P.cols()) {
        throw std::invalid_argument("evolve: initial state size does not match the generator");
    }
    const MatrixXd Pt = P.transpose();
    auto rhs = [&](const MatrixXd& G) -> MatrixXd { return Q - P * G - G * Pt; };

    Trajectory traj;
    MatrixXd G = 0.5 * (gamma0.gamma - gamma0.gamma.transpose());
    traj.times.push_back(0.0);
    traj.states.push_back({G, gen.basis});

    const double limit = 1e6 * std::max({1.0, max_abs(G), max_abs(Q)});
    const auto steps = static_cast<long long>(std::ceil(t_final / dt - 1e-12));
    double t = 0.0;
    for (long long step = 1; step <= steps; ++step) {
        const double h = std::min(dt, t_final - t);
        const MatrixXd k1 = rhs(G);
        const MatrixXd k2 = rhs(G + 0.5 * h * k1);
        const MatrixXd k3 = rhs(G + 0.5 * h * k2);
        const MatrixXd k4 = rhs(G + h * k3);
        G += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        G = 0.5 * (G - G.transpose()).eval();
        t = (step == steps) ? t_final : t + h;

        const double size = max_abs(G);
        if (!std::isfinite(size) || size > limit) {
            std::ostringstream os;
            os << "evolve: solution blew up at t = " << t << " (max |Gamma| = " << size << "); reduce dt";
            throw std::runtime_error(os.str());
        }
        if (step % record_every == 0 || step == steps) {
            traj.times.push_back(t);
            traj.states.push_back({G, gen.basis});
        }
    }
    return traj;
}

MajoranaCorrelation normal_mode_state(const Eigen::VectorXd& z) {
    const Index n = z.size();
    MajoranaCorrelation c;
    c.basis = Basis::NormalMode;
    c.gamma = MatrixXd::Zero(2 * n, 2 * n);
    for (Index k = 0; k < n; ++k) {
        c.gamma(2 * k, 2 * k + 1) = z(k);
        c.gamma(2 * k + 1, 2 * k) = -z(k);
    }
    return c;
}

MajoranaCorrelation to_real_space(const MajoranaCorrelation& corr, const MatrixXd& K) {
    if (corr.basis == Basis::RealSpace) return corr;
    return {K * corr.gamma * K.transpose(), Basis::RealSpace};
}

MajoranaCorrelation ground_state(const ChainSpec& chain) {
    const EigenBasis basis = eigenbasis(chain);
    Eigen::VectorXd z(chain.N);
    for (int k = 0; k < chain.N; ++k) z(k) = basis.energies(k) < 0.0 ? -1.0 : 1.0;
    return to_real_space(normal_mode_state(z), basis.K);
}

void write_gamma_dump(const std::filesystem::path& path, const MatrixXd& gamma) {
    if (gamma.rows() != gamma.cols() || gamma.rows() % 2 != 0) {
        throw std::invalid_argument("gamma dump: matrix must be square with even size");
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("gamma dump: cannot open " + path.string() + " for writing");
    os.write("FLNGAMMA", 8);
    put_le(os, static_cast<std::uint64_t>(gamma.rows() / 2));
    for (Index i = 0; i < gamma.rows(); ++i) {
        for (Index j = 0; j < gamma.cols(); ++j) put_le(os, std::bit_cast<std::uint64_t>(gamma(i, j)));
    }
    if (!os) throw std::runtime_error("gamma dump: write to " + path.string() + " failed");
}

MatrixXd read_gamma_dump(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("gamma dump: cannot open " + path.string());
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, "FLNGAMMA", 8) != 0) throw std::runtime_error("gamma dump: bad header");
    const auto n = static_cast<std::int64_t>(get_le(is));
    if (n < 1 || n > (1 << 20)) throw std::runtime_error("gamma dump: implausible N");
    const Index m = 2 * static_cast<Index>(n);
    MatrixXd g(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) g(i, j) = std::bit_cast<double>(get_le(is));
    }
    return g;
}

} // namespace chainfln
