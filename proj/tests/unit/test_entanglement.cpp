#include "chainfln/entanglement.hpp"
#include "oracles/dense_fermions.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace chainfln;

namespace {

MajoranaCorrelation real_space(Eigen::MatrixXd g) {
    MajoranaCorrelation c;
    c.gamma = std::move(g);
    return c;
}

Eigen::MatrixXd random_antisymmetric(int n, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
    return scale * (g - g.transpose());
}

// Spectrum of the reduced correlation of sites [first, first + count).
double entropy_half(const Eigen::MatrixXd& gamma, int first, int count) {
    const Eigen::MatrixXd sub = gamma.block(2 * first, 2 * first, 2 * count, 2 * count);
    return renyi_entropy(antisymmetric_spectrum(sub).nus, 0.5);
}

} // namespace

TEST_SUITE("entanglement") {

TEST_CASE("partial transpose blocks") {
    std::mt19937_64 rng(1);
    Eigen::MatrixXd g = random_antisymmetric(6, rng, 0.1);
    const TransposePair p = partial_transpose_pair(real_space(g), 1);
    // index-by-index assembly for N = 3, l = 1
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            const bool ina = a < 2;
            const bool inb = b < 2;
            std::complex<double> plus, minus;
            if (ina && inb) {
                plus = minus = -g(a, b);
            } else if (!ina && !inb) {
                plus = minus = g(a, b);
            } else {
                plus = std::complex<double>(0.0, g(a, b));
                minus = std::complex<double>(0.0, -g(a, b));
            }
            CHECK(p.gamma_plus(a, b) == plus);
            CHECK(p.gamma_minus(a, b) == minus);
        }
    }
    CHECK((p.gamma_minus - p.gamma_plus.conjugate()).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd blockdiag = g;
    blockdiag.block(0, 2, 2, 4).setZero();
    blockdiag.block(2, 0, 4, 2).setZero();
    const TransposePair q = partial_transpose_pair(real_space(blockdiag), 1);
    CHECK(q.gamma_plus.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK((q.gamma_plus - q.gamma_minus).cwiseAbs().maxCoeff() == 0.0);
    CHECK((q.gamma_plus.real().topLeftCorner(2, 2) + g.topLeftCorner(2, 2)).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(partial_transpose_pair(real_space(g), 0), std::out_of_range);
    CHECK_THROWS_AS(partial_transpose_pair(real_space(g), 3), std::out_of_range);
    MajoranaCorrelation nm = real_space(g);
    nm.basis = Basis::NormalMode;
    CHECK_THROWS(partial_transpose_pair(nm, 1));
}

TEST_CASE("cross correlation") {
    TransposePair zero{Eigen::MatrixXcd::Zero(4, 4), Eigen::MatrixXcd::Zero(4, 4)};
    CHECK(cross_correlation(zero).cwiseAbs().maxCoeff() < 1e-15);

    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 2 + rep % 5;
        const oracle::RandomGaussian rg = oracle::random_gaussian(n, rng);
        const Eigen::MatrixXcd gx = cross_correlation(partial_transpose_pair(real_space(rg.gamma), 1 + rep % (n - 1)));
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(gx, false);
        std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + gx.rows());
        for (const auto& e : ev) {
            double best = 1e300;
            for (const auto& f : ev) best = std::min(best, std::abs(f + e));
            CHECK(best < 1e-8);
        }
    }
}

// With Gamma = -i Tr([w_a, w_b] rho) the product formula for the cross correlation yields the
// ordering O- O+; its spectrum, which is all the FLN uses, equals that of O+ O-.
TEST_CASE("cross correlation is the correlation matrix of O- O+") {
    std::mt19937_64 rng(3);
    for (int n : {2, 3, 4}) {
        const oracle::DenseFermions f(n);
        for (int rep = 0; rep < 3; ++rep) {
            const oracle::RandomGaussian rg = oracle::random_gaussian(n, rng);
            const oracle::CMat rho = f.gaussian_state(rg.O, rg.nu);
            for (int ell = 1; ell < n; ++ell) {
                const auto [op, om] = f.twisted_transposes(rho, ell);
                const Eigen::MatrixXcd gx = cross_correlation(partial_transpose_pair(real_space(rg.gamma), ell));
                CHECK((f.correlation(om * op) - gx).cwiseAbs().maxCoeff() < 1e-9);
                std::vector<double> a = complex_spectrum(gx).nus;
                std::vector<double> b = complex_spectrum(f.correlation(op * om)).nus;
                std::sort(a.begin(), a.end());
                std::sort(b.begin(), b.end());
                REQUIRE(a.size() == b.size());
                for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-9);
            }
        }
    }
}

TEST_CASE("Renyi and von Neumann entropies") {
    for (double a : {0.5, 2.0, 3.7}) {
        CHECK(renyi_entropy({0.0}, a) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
        CHECK(std::abs(renyi_entropy({1.0}, a)) < 1e-15);
    }
    CHECK(renyi_entropy({0.6}, 2.0) == doctest::Approx(-std::log(0.68)).epsilon(1e-14));
    CHECK(von_neumann({0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(std::abs(von_neumann({1.0})) < 1e-15);
    CHECK(std::abs(von_neumann({-1.0})) < 1e-15);
    // the near-purity regularization leaves values far from |nu| = 1 untouched
    CHECK(renyi_entropy({0.6}, 0.5) == doctest::Approx(2.0 * std::log(std::sqrt(0.2) + std::sqrt(0.8))).epsilon(1e-14));
    const std::vector<double> nus{0.1, 0.45, 0.8, 0.97};
    CHECK(std::abs(renyi_entropy(nus, 1.0 + 1e-5) - von_neumann(nus)) < 1e-4);
    CHECK(std::abs(renyi_entropy(nus, 1.0 - 1e-5) - von_neumann(nus)) < 1e-4);

    int flags = 0;
    CHECK(std::abs(renyi_entropy({1.0 + 5e-9}, 0.5, &flags)) < 1e-12);
    CHECK(flags == 0);
    const double s = renyi_entropy({1.2}, 0.5, &flags);
    CHECK(flags == 1);
    CHECK(std::isfinite(s));
    CHECK_THROWS_AS(renyi_entropy({1.2}, 0.5, nullptr, EntropyOptions{false}), PositivityError);
}

TEST_CASE("pure states: FLN equals the Renyi-1/2 entropy") {
    for (int n : {8, 21, 64}) {
        for (double h : {0.0, 1.1, -0.7}) {
            const MajoranaCorrelation gs = ground_state({n, h});
            const EntanglementAnalyzer an(gs);
            for (int ell = 1; ell < n; ++ell) {
                const EntanglementReport r = an.report(ell);
                CHECK(std::abs(r.fln - entropy_half(gs.gamma, 0, ell)) < 1e-8);
                CHECK(std::abs(r.mutual_information - 2.0 * r.s_a) < 1e-8);
                CHECK(r.positivity_flags == 0);
            }
        }
    }
    // Vacuum of every site: a product of pure local states.
    Eigen::MatrixXd vac = Eigen::MatrixXd::Zero(10, 10);
    for (int j = 0; j < 5; ++j) {
        vac(2 * j, 2 * j + 1) = 1.0;
        vac(2 * j + 1, 2 * j) = -1.0;
    }
    for (int ell = 1; ell < 5; ++ell) CHECK(std::abs(fln(real_space(vac), ell).fln) < 1e-12);
}

TEST_CASE("mixed Gaussian states against explicit density matrices") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 12; ++rep) {
        const int n = 2 + rep % 4;
        const oracle::DenseFermions f(n);
        const oracle::RandomGaussian rg = oracle::random_gaussian(n, rng);
        const oracle::CMat rho = f.gaussian_state(rg.O, rg.nu);
        CHECK((f.correlation(rho) - rg.gamma.cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-12);
        const EntanglementAnalyzer an(real_space(rg.gamma));
        for (int ell = 1; ell < n; ++ell) {
            const EntanglementReport r = an.report(ell);
            CHECK(std::abs(r.fln - f.fln(rho, ell)) < 1e-8);
            CHECK(r.fln >= f.log_negativity(rho, ell) - 1e-8);
            const double sa = oracle::DenseFermions::von_neumann(f.reduced_a(rho, ell));
            const double sb = oracle::DenseFermions::von_neumann(f.reduced_b(rho, ell));
            const double sab = oracle::DenseFermions::von_neumann(rho);
            CHECK(std::abs(r.s_a - sa) < 1e-8);
            CHECK(std::abs(r.s_b - sb) < 1e-8);
            CHECK(std::abs(r.s_full - sab) < 1e-8);
            CHECK(std::abs(r.mutual_information - (sa + sb - sab)) < 1e-8);
            CHECK(std::abs(an.mutual_information(ell) - r.mutual_information) < 1e-14);
        }
    }
}

TEST_CASE("uncorrelated halves have zero mutual information") {
    std::mt19937_64 rng(6);
    const oracle::RandomGaussian a = oracle::random_gaussian(3, rng);
    const oracle::RandomGaussian b = oracle::random_gaussian(4, rng);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(14, 14);
    g.topLeftCorner(6, 6) = a.gamma;
    g.bottomRightCorner(8, 8) = b.gamma;
    CHECK(std::abs(mutual_information(real_space(g), 3)) < 1e-10);
    CHECK(std::abs(fln(real_space(g), 3).fln) < 1e-10);
}

TEST_CASE("spectra of real antisymmetric matrices") {
    std::mt19937_64 rng(8);
    const oracle::RandomGaussian rg = oracle::random_gaussian(5, rng);
    PairedSpectrum s = antisymmetric_spectrum(rg.gamma);
    std::vector<double> expected(rg.nu.data(), rg.nu.data() + 5);
    for (double& v : expected) v = std::abs(v);
    std::sort(expected.begin(), expected.end());
    std::sort(s.nus.begin(), s.nus.end());
    for (int i = 0; i < 5; ++i) CHECK(std::abs(s.nus[i] - expected[i]) < 1e-12);
    const PairedSpectrum c = complex_spectrum(rg.gamma.cast<std::complex<double>>());
    CHECK(c.flags == 0);
    CHECK(c.nus.size() == 5);
}

TEST_CASE("unphysical correlation matrices are flagged") {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
    g(0, 1) = 1.3;
    g(1, 0) = -1.3;
    g(2, 3) = 0.4;
    g(3, 2) = -0.4;
    const EntanglementReport r = fln(real_space(g), 1);
    CHECK(r.positivity_flags > 0);
}

}
