#include "chainfln/entanglement.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace chainfln {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using cplx = std::complex<double>;

namespace {

constexpr double kPairTol = 1e-8;
constexpr double kClipTol = 1e-8;
// For alpha < 1 the term in 1 - |nu| has an unbounded derivative at |nu| = 1, so rounding of a
// pure mode (about 1e-15) would otherwise show up as about 1e-8 per mode. The distance from
// purity e is replaced by e^3 / (e^2 + kPurityScale^2), a relative change of (kPurityScale / e)^2.
constexpr double kPurityScale = 1e-12;

void check_cut(const MajoranaCorrelation& corr, int ell) {
    if (corr.basis != Basis::RealSpace) {
        throw std::invalid_argument("entanglement: correlation matrix must be in the real-space basis");
    }
    if (corr.gamma.rows() != corr.gamma.cols() || corr.gamma.rows() % 2 != 0) {
        throw std::invalid_argument("entanglement: correlation matrix must be square with even size");
    }
    const int n = corr.sites();
    if (ell < 1 || ell > n - 1) {
        throw std::out_of_range("entanglement: cut l = " + std::to_string(ell) + " outside 1.." +
                                std::to_string(n - 1));
    }
}

} // namespace

TransposePair partial_transpose_pair(const MajoranaCorrelation& corr, int ell) {
    check_cut(corr, ell);
    const MatrixXd& g = corr.gamma;
    const Index a = 2 * ell;
    const Index b = g.rows() - a;
    const cplx I(0.0, 1.0);

    TransposePair p;
    p.gamma_plus.resize(g.rows(), g.cols());
    p.gamma_plus.topLeftCorner(a, a) = -g.topLeftCorner(a, a).cast<cplx>();
    p.gamma_plus.topRightCorner(a, b) = I * g.topRightCorner(a, b).cast<cplx>();
    p.gamma_plus.bottomLeftCorner(b, a) = I * g.bottomLeftCorner(b, a).cast<cplx>();
    p.gamma_plus.bottomRightCorner(b, b) = g.bottomRightCorner(b, b).cast<cplx>();
    p.gamma_minus = p.gamma_plus.conjugate();
    return p;
}

MatrixXcd cross_correlation(const TransposePair& pair) {
    const MatrixXcd& gp = pair.gamma_plus;
    const MatrixXcd& gm = pair.gamma_minus;
    const Index n = gp.rows();
    const cplx I(0.0, 1.0);
    const MatrixXcd one = MatrixXcd::Identity(n, n);

    const MatrixXcd X = one - gp * gm;
    const Eigen::PartialPivLU<MatrixXcd> lu(X);
    const double rcond = lu.rcond();
    if (!(rcond >= 1e-12)) {
        const double smallest = n == 0 ? 0.0 : Eigen::BDCSVD<MatrixXcd>(X).singularValues().minCoeff();
        std::ostringstream os;
        os << "cross_correlation: 1 - G+ G- is singular or ill-conditioned (rcond " << rcond
           << ", smallest singular value " << smallest << ")";
        throw SingularCrossError(os.str(), smallest);
    }
    return -I * one + I * (one - I * gm) * lu.solve(one - I * gp);
}

PairedSpectrum antisymmetric_spectrum(const MatrixXd& gamma) {
    PairedSpectrum out;
    const Index n = gamma.rows();
    if (n == 0) return out;
    const MatrixXd S = gamma.transpose() * gamma;
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("antisymmetric_spectrum: eigensolver failed");
    const Eigen::VectorXd& l = es.eigenvalues();
    for (Index i = 0; i + 1 < n; i += 2) {
        out.nus.push_back(std::sqrt(std::max(0.0, 0.5 * (l(i) + l(i + 1)))));
    }
    if (n % 2 == 1) ++out.flags;
    return out;
}

PairedSpectrum complex_spectrum(const MatrixXcd& gamma) {
    const MatrixXd re = gamma.real();
    const MatrixXd im = gamma.imag();
    const double scale = std::max(1.0, gamma.size() ? gamma.cwiseAbs().maxCoeff() : 0.0);
    const double im_size = im.size() ? im.cwiseAbs().maxCoeff() : 0.0;
    const double sym_size = re.size() ? (re + re.transpose()).cwiseAbs().maxCoeff() : 0.0;
    if (im_size <= kPairTol * scale && sym_size <= kPairTol * scale) {
        return antisymmetric_spectrum(0.5 * (re - re.transpose()));
    }

    PairedSpectrum out;
    const Eigen::ComplexEigenSolver<MatrixXcd> es(gamma, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("complex_spectrum: eigensolver failed");
    // eigenvalue l = i nu  =>  nu = -i l
    std::vector<cplx> nu;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) nu.push_back(-cplx(0.0, 1.0) * es.eigenvalues()(i));
    std::sort(nu.begin(), nu.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    const std::size_t m = nu.size();
    for (std::size_t i = 0; i < m / 2; ++i) {
        const cplx lo = nu[i];
        const cplx hi = nu[m - 1 - i];
        if (std::abs(lo + hi) > kPairTol * scale) ++out.flags;
        const cplx v = 0.5 * (hi - lo);
        if (std::abs(v.imag()) > kPairTol) ++out.flags;
        out.nus.push_back(std::abs(v.real()));
    }
    if (m % 2 == 1) ++out.flags;
    return out;
}

double renyi_entropy(const std::vector<double>& nus, double alpha, int* flags, const EntropyOptions& options) {
    if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
        throw std::invalid_argument("renyi_entropy: alpha must be positive, finite and != 1");
    }
    double sum = 0.0;
    for (double nu : nus) {
        if (!std::isfinite(nu)) throw std::invalid_argument("renyi_entropy: non-finite nu");
        double a = std::abs(nu);
        if (a > 1.0 && a <= 1.0 + kClipTol) a = 1.0;
        if (a > 1.0) {
            if (flags) ++*flags;
            if (!options.allow_real_part) {
                throw PositivityError("renyi_entropy: |nu| = " + std::to_string(a) + " exceeds 1");
            }
            const cplx t = std::pow(cplx(0.5 * (1.0 - a), 0.0), alpha) + std::pow(cplx(0.5 * (1.0 + a), 0.0), alpha);
            sum += std::log(t).real();
            continue;
        }
        double e = 1.0 - a;
        if (alpha < 1.0) e = e * e * e / (e * e + kPurityScale * kPurityScale);
        sum += std::log(std::pow(0.5 * e, alpha) + std::pow(1.0 - 0.5 * e, alpha));
    }
    return sum / (1.0 - alpha);
}

double von_neumann(const std::vector<double>& nus, int* flags) {
    double s = 0.0;
    for (double nu : nus) {
        double a = std::abs(nu);
        if (a > 1.0 + kClipTol && flags) ++*flags;
        a = std::min(a, 1.0);
        const double p = 0.5 * (1.0 + a);
        const double q = 0.5 * (1.0 - a);
        if (p > 0.0) s -= p * std::log(p);
        if (q > 0.0) s -= q * std::log(q);
    }
    return s;
}

EntanglementAnalyzer::EntanglementAnalyzer(MajoranaCorrelation corr) : corr_(std::move(corr)) {
    if (corr_.basis != Basis::RealSpace) {
        throw std::invalid_argument("entanglement: correlation matrix must be in the real-space basis");
    }
    const PairedSpectrum full = antisymmetric_spectrum(corr_.gamma);
    full_flags_ = full.flags;
    s2_full_ = renyi_entropy(full.nus, 2.0, &full_flags_);
    s_full_ = von_neumann(full.nus);
}

double EntanglementAnalyzer::mutual_information(int ell) const {
    check_cut(corr_, ell);
    const Index a = 2 * ell;
    const Index b = corr_.gamma.rows() - a;
    const double sa = von_neumann(antisymmetric_spectrum(corr_.gamma.topLeftCorner(a, a)).nus);
    const double sb = von_neumann(antisymmetric_spectrum(corr_.gamma.bottomRightCorner(b, b)).nus);
    return sa + sb - s_full_;
}

EntanglementReport EntanglementAnalyzer::report(int ell) const {
    check_cut(corr_, ell);
    EntanglementReport r;
    int flags = full_flags_;

    const PairedSpectrum cross = complex_spectrum(cross_correlation(partial_transpose_pair(corr_, ell)));
    flags += cross.flags;
    r.renyi_half_cross = renyi_entropy(cross.nus, 0.5, &flags);
    r.renyi2_full = s2_full_;
    r.fln = 0.5 * (r.renyi_half_cross - r.renyi2_full);

    const Index a = 2 * ell;
    const Index b = corr_.gamma.rows() - a;
    const PairedSpectrum sa = antisymmetric_spectrum(corr_.gamma.topLeftCorner(a, a));
    const PairedSpectrum sb = antisymmetric_spectrum(corr_.gamma.bottomRightCorner(b, b));
    flags += sa.flags + sb.flags;
    r.s_a = von_neumann(sa.nus, &flags);
    r.s_b = von_neumann(sb.nus, &flags);
    r.s_full = s_full_;
    r.mutual_information = r.s_a + r.s_b - r.s_full;
    r.positivity_flags = flags;
    return r;
}

EntanglementReport fln(const MajoranaCorrelation& corr, int ell) { return EntanglementAnalyzer(corr).report(ell); }

double mutual_information(const MajoranaCorrelation& corr, int ell) {
    return EntanglementAnalyzer(corr).mutual_information(ell);
}

} // namespace chainfln
