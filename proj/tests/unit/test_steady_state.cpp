#include "chainfln/entanglement.hpp"
#include "chainfln/steady_state.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace chainfln;

namespace {

const BathSpec kLeft{10.0, 1.0, 0.2, 10.0};
const BathSpec kRight{15.0, 1.5, 0.2, 10.0};

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Column-major vectorization: (1 (x) P + P (x) 1) vec X = vec Q.
Eigen::MatrixXd kronecker_oracle(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q) {
    const Eigen::Index n = P.rows();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n * n, n * n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index k = 0; k < n; ++k) {
                A(j * n + i, j * n + k) += P(i, k); // (P X)_ij
                A(j * n + i, k * n + i) += P(j, k); // (X P^T)_ij
            }
    const Eigen::VectorXd x = A.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n));
    return Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
}

GeneratorMatrices wrap(Eigen::MatrixXd P, Eigen::MatrixXd Q) {
    GeneratorMatrices g;
    g.P_tilde = std::move(P);
    g.Q_tilde = std::move(Q);
    return g;
}

} // namespace

TEST_SUITE("steady_state") {

TEST_CASE("identity generator") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd Q(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) Q(i, j) = normal(rng);
    Q = (Q - Q.transpose()).eval();
    const SteadyStateReport r = solve_steady(wrap(Eigen::MatrixXd::Identity(6, 6), Q));
    CHECK(max_abs(r.correlation.gamma - Q / 2.0) < 1e-15);
    CHECK(r.uniqueness_margin == doctest::Approx(2.0));
    CHECK(uniqueness_check(wrap(Eigen::MatrixXd::Identity(6, 6), Q)) == doctest::Approx(2.0));
}

TEST_CASE("secular steady state equals the occupation ansatz") {
    const QuadratureConfig q;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 4; ++rep) {
        const ChainSpec chain{5 + 7 * rep, 2.0 * u(rng) - 1.0};
        const BathSpec L{0.5 + 20 * u(rng), 4 * u(rng) - 2, 0.05 + 0.5 * u(rng), 5 + 10 * u(rng)};
        const BathSpec R{0.5 + 20 * u(rng), 4 * u(rng) - 2, 0.05 + 0.5 * u(rng), 5 + 10 * u(rng)};
        const GeneratorMatrices g = build_generators(EquationKind::NonlocalLindblad, chain, L, R, q, Basis::NormalMode);
        const SteadyStateReport r = solve_steady(g);
        const MajoranaCorrelation ansatz = normal_mode_state(secular_occupation_parameters(chain, L, R, q));
        CHECK(max_abs(r.correlation.gamma - ansatz.gamma) < 1e-10);
        CHECK(r.correlation.basis == Basis::NormalMode);
    }
}

TEST_CASE("Bartels-Stewart agrees with the Kronecker system") {
    const QuadratureConfig q;
    for (EquationKind kind : {EquationKind::NonlocalLindblad, EquationKind::Redfield, EquationKind::ULE}) {
        for (int n : {3, 8}) {
            const GeneratorMatrices g = build_generators(kind, {n, 0.9}, kLeft, kRight, q);
            const Eigen::MatrixXd bs = solve_lyapunov_bartels_stewart(g.P_tilde, g.Q_tilde);
            const Eigen::MatrixXd kr = kronecker_oracle(g.P_tilde, g.Q_tilde);
            CHECK(max_abs(bs - kr) < 1e-9);
            CHECK(max_abs(solve_lyapunov_kronecker(g.P_tilde, g.Q_tilde) - kr) < 1e-9);
            SolveOptions opts;
            opts.solver = SolverKind::KroneckerDense;
            const SteadyStateReport r = solve_steady(g, opts);
            CHECK(r.solver == SolverKind::KroneckerDense);
            CHECK(max_abs(r.correlation.gamma - kr) < 1e-9);
        }
    }
    // A generic non-normal P with complex-conjugate eigenvalue pairs.
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd P(9, 9), Q(9, 9);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            P(i, j) = normal(rng);
            Q(i, j) = normal(rng);
        }
    P += 6.0 * Eigen::MatrixXd::Identity(9, 9);
    CHECK(max_abs(solve_lyapunov_bartels_stewart(P, Q) - kronecker_oracle(P, Q)) < 1e-10);
    CHECK(lyapunov_residual(P, Q, solve_lyapunov_bartels_stewart(P, Q)) < 1e-12);
}

TEST_CASE("uniqueness margin") {
    const QuadratureConfig q;
    const BathSpec off{10.0, 1.0, 0.0, 10.0};
    // h = 0 with odd N has E = 0 and E_k = -E_q pairs.
    const GeneratorMatrices g0 = build_generators(EquationKind::Redfield, {5, 0.0}, off, off, q);
    CHECK(uniqueness_check(g0) < 1e-14);
    CHECK_THROWS_AS(solve_steady(g0), DegenerateSteadyStateError);

    // Generic h: the Hamiltonian spectrum alone still pairs +iE with -iE.
    const GeneratorMatrices g1 = build_generators(EquationKind::Redfield, {4, 0.3}, off, off, q);
    CHECK(uniqueness_check(g1) < 1e-14);

    for (EquationKind kind : {EquationKind::NonlocalLindblad, EquationKind::Redfield}) {
        const GeneratorMatrices g = build_generators(kind, {100, 1.1}, kLeft, kRight, q);
        const UniquenessReport u = uniqueness_report(g.P_tilde);
        CHECK(u.margin > SolveOptions{}.uniqueness_tol);
        CHECK(std::abs(std::abs(u.first + u.second) - u.margin) < 1e-12);
    }
}

TEST_CASE("solver gates") {
    const QuadratureConfig q;
    const GeneratorMatrices g = build_generators(EquationKind::Redfield, {12, 1.1}, kLeft, kRight, q);
    const SteadyStateReport r = solve_steady(g);
    CHECK(max_abs(r.correlation.gamma + r.correlation.gamma.transpose()) == 0.0);
    CHECK(r.residual <= 1e-9 * max_abs(g.Q_tilde));
    CHECK(r.antisymmetry_residual < 1e-9);
    CHECK(r.correlation.sites() == 12);
}

TEST_CASE("evolution") {
    const QuadratureConfig q;
    const ChainSpec chain{6, 1.1};
    const GeneratorMatrices g = build_generators(EquationKind::NonlocalLindblad, chain, kLeft, kRight, q);
    const SteadyStateReport ss = solve_steady(g);

    SUBCASE("steady state is a fixed point") {
        const Trajectory t = evolve(g, ss.correlation, 50.0, 0.05, 100);
        for (const auto& s : t.states) CHECK(max_abs(s.gamma - ss.correlation.gamma) < 1e-12);
        CHECK(t.times.front() == 0.0);
        CHECK(t.times.back() == doctest::Approx(50.0));
    }
    SUBCASE("zero coupling conserves the spectrum") {
        const BathSpec off{10.0, 1.0, 0.0, 10.0};
        const GeneratorMatrices g0 = build_generators(EquationKind::Redfield, chain, off, off, q);
        const Trajectory t = evolve(g0, ground_state({6, 0.4}), 30.0, 0.01, 500);
        const std::vector<double> ref = antisymmetric_spectrum(t.states.front().gamma).nus;
        for (const auto& s : t.states) {
            const std::vector<double> nus = antisymmetric_spectrum(s.gamma).nus;
            for (std::size_t i = 0; i < nus.size(); ++i) CHECK(std::abs(nus[i] - ref[i]) < 1e-8);
        }
    }
    SUBCASE("relaxation from the empty correlation matrix") {
        MajoranaCorrelation zero;
        zero.gamma = Eigen::MatrixXd::Zero(12, 12);
        const Trajectory t = evolve(g, zero, 60000.0, 0.5, 40000);
        CHECK(max_abs(t.states.back().gamma - ss.correlation.gamma) < 1e-6);
    }
    SUBCASE("argument checks") {
        CHECK_THROWS(evolve(g, ss.correlation, 1.0, 0.0));
        CHECK_THROWS(evolve(g, ss.correlation, -1.0, 0.1));
    }
}

TEST_CASE("reference states") {
    const Eigen::VectorXd z = (Eigen::VectorXd(3) << 0.2, -0.5, 1.0).finished();
    const MajoranaCorrelation s = normal_mode_state(z);
    CHECK(s.basis == Basis::NormalMode);
    CHECK(s.gamma(0, 1) == 0.2);
    CHECK(s.gamma(3, 2) == 0.5);
    CHECK(s.gamma(0, 2) == 0.0);

    const ChainSpec chain{7, 0.3};
    const MajoranaCorrelation gs = ground_state(chain);
    CHECK(gs.basis == Basis::RealSpace);
    // A pure Gaussian state has Gamma^2 = -1.
    CHECK(max_abs(gs.gamma * gs.gamma + Eigen::MatrixXd::Identity(14, 14)) < 1e-12);
}

TEST_CASE("correlation dump round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "chainfln_dump_test";
    std::filesystem::create_directories(dir);
    const MajoranaCorrelation gs = ground_state({9, 1.1});
    write_gamma_dump(dir / "g.bin", gs.gamma);
    const Eigen::MatrixXd back = read_gamma_dump(dir / "g.bin");
    CHECK(back.rows() == 18);
    CHECK((back - gs.gamma).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::filesystem::file_size(dir / "g.bin") == 8 + 8 + 18 * 18 * 8);

    std::ofstream(dir / "bad.bin", std::ios::binary) << "NOTGAMMA........";
    CHECK_THROWS(read_gamma_dump(dir / "bad.bin"));
    std::filesystem::remove_all(dir);
}

}
