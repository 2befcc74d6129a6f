// steady_state.hpp — Lyapunov steady state P Gamma + Gamma P^T = Q, uniqueness
// margin, transient integration and the binary correlation-matrix dump.

#pragma once

#include "chainfln/generators.hpp"

#include <Eigen/Dense>

#include <complex>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainfln {

// Real antisymmetric 2N x 2N matrix Gamma_ab = -i Tr([w_a, w_b] rho).
struct MajoranaCorrelation {
    Eigen::MatrixXd gamma;
    Basis basis{Basis::RealSpace};

    int sites() const noexcept { return static_cast<int>(gamma.rows() / 2); }
};

enum class SolverKind { BartelsStewart, KroneckerDense };

std::string_view to_string(SolverKind solver);

struct SolveOptions {
    double uniqueness_tol{1e-10};
    double residual_tol{1e-9}; // relative to max |Q~|
    SolverKind solver{SolverKind::BartelsStewart};
};

struct SteadyStateReport {
    MajoranaCorrelation correlation;
    double residual{0.0};              // max |P~ Gamma + Gamma P~^T - Q~| after projection
    double uniqueness_margin{0.0};     // min |l_i + l_j| over eigenvalues of P~
    double antisymmetry_residual{0.0}; // max |Gamma + Gamma^T| removed by the projection
    SolverKind solver{SolverKind::BartelsStewart};
};

class DegenerateSteadyStateError : public std::runtime_error {
public:
    DegenerateSteadyStateError(const std::string& what, std::complex<double> a, std::complex<double> b)
        : std::runtime_error(what), first_(a), second_(b) {}
    std::complex<double> first() const noexcept { return first_; }
    std::complex<double> second() const noexcept { return second_; }

private:
    std::complex<double> first_;
    std::complex<double> second_;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

struct UniquenessReport {
    double margin{0.0};
    std::complex<double> first;  // eigenvalue pair attaining the margin
    std::complex<double> second;
};

UniquenessReport uniqueness_report(const Eigen::MatrixXd& P);
double uniqueness_check(const GeneratorMatrices& gen);

// Solves P X + X P^T = Q by a real Schur factorization of P (O(n^3)).
Eigen::MatrixXd solve_lyapunov_bartels_stewart(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q);
// Same equation by LU on the n^2 x n^2 Kronecker system; small n only.
Eigen::MatrixXd solve_lyapunov_kronecker(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q);

SteadyStateReport solve_steady(const GeneratorMatrices& gen, const SolveOptions& options = {});

double lyapunov_residual(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& X);

struct Trajectory {
    std::vector<double> times;
    std::vector<MajoranaCorrelation> states;
};

// RK4 integration of dGamma/dt = Q~ - P~ Gamma - Gamma P~^T. States are recorded
// at t = 0, every `record_every` steps, and at t_final. Throws std::runtime_error
// when max |Gamma| grows beyond 1e6 times its initial scale.
Trajectory evolve(const GeneratorMatrices& gen, const MajoranaCorrelation& gamma0, double t_final, double dt,
                  int record_every = 1);

// Ground state of the isolated chain (modes with E_k < 0 filled), real space.
MajoranaCorrelation ground_state(const ChainSpec& chain);

// Direct sum of [[0, z_k], [-z_k, 0]] in normal modes.
MajoranaCorrelation normal_mode_state(const Eigen::VectorXd& z);

MajoranaCorrelation to_real_space(const MajoranaCorrelation& corr, const Eigen::MatrixXd& K);

// "FLNGAMMA", int64 N, then (2N)^2 row-major doubles; all little-endian.
void write_gamma_dump(const std::filesystem::path& path, const Eigen::MatrixXd& gamma);
Eigen::MatrixXd read_gamma_dump(const std::filesystem::path& path);

} // namespace chainfln
