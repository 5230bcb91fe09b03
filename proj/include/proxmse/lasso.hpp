#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "proxmse/parallel.hpp"
#include "proxmse/rng.hpp"
#include "proxmse/signal_model.hpp"

namespace proxmse {

enum class MatrixKind { kUnitary, kGaussian };

const char* matrix_kind_name(MatrixKind k);

/// m x n matrix with orthonormal rows and Haar-distributed row space.
Matrix sample_partial_unitary(std::size_t m, std::size_t n, RandomStream& rng);
Matrix sample_partial_unitary(std::size_t m, std::size_t n, std::uint64_t seed);

/// m x n matrix with i.i.d. standard normal entries.
Matrix sample_gaussian_matrix(std::size_t m, std::size_t n, RandomStream& rng);
Matrix sample_gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

enum class StepPolicy {
  kUnit,            // ||A||_op = 1, e.g. partial unitary A
  kPowerIteration,  // estimate ||A||_op^2 by power iteration
};

struct SolverConfig {
  std::size_t max_iters = 50000;
  double tol = 1e-12;             // absolute duality-gap target on ||y - Ax||^2
  StepPolicy step = StepPolicy::kPowerIteration;
  bool accelerated = true;        // restarted FISTA; false gives plain projected gradient
  std::size_t check_every = 10;   // iterations between gap evaluations
};

struct BallConstraint {
  NormSpec norm;
  double radius = 0.0;
};

struct LassoSolution {
  Vector x;
  double cost = 0.0;  // ||y - A x||^2
  double gap = 0.0;   // Frank-Wolfe gap, an upper bound on cost - optimal cost
  std::size_t iters = 0;
  bool converged = false;
};

/// min ||y - A x||^2 subject to f(x) <= radius, by projected gradient.
/// Starts from x_init, or from the projection of A^T y when none is given.
LassoSolution solve_constrained_lasso(const Matrix& A, const Vector& y, const BallConstraint& ball,
                                      const SolverConfig& cfg, const Vector* x_init = nullptr);

/// Frank-Wolfe duality gap of x for the constrained least squares problem.
double lasso_duality_gap(const Matrix& A, const Vector& y, const BallConstraint& ball, const Vector& x);

struct LassoExperiment {
  std::size_t trials = 50;
  MatrixKind matrix = MatrixKind::kUnitary;
  std::optional<double> sigma;  // default 1e-4 * ||x0||
  SolverConfig solver;
  double gap_rel = 1e-7;        // solver gap target as a fraction of m * sigma^2
  std::uint64_t seed = 1;
  Exec exec = Exec::kParallel;
};

/// Per-trial quantities, all normalized by sigma^2.
struct LassoTrial {
  double eta = 0.0;           // ||A (x* - x0)||^2
  double f = 0.0;             // ||y - A x*||^2
  double e = 0.0;             // ||x* - x0||^2
  double cost_at_truth = 0.0; // ||y - A x0||^2 = ||sigma v||^2
  std::size_t iters = 0;
  bool converged = false;
};

struct LassoSweepRecord {
  std::size_t m = 0;
  double eta_mean = 0.0, eta_stderr = 0.0;
  double f_mean = 0.0, f_stderr = 0.0;
  double e_mean = 0.0, e_stderr = 0.0;
  double sum_stderr = 0.0;  // standard error of the per-trial eta + f
  double predicted_eta = 0.0;
  std::size_t trials = 0;
  std::size_t excluded_trials = 0;
  std::vector<LassoTrial> trial_log;
};

double default_lasso_sigma(const SignalInstance& inst);

/// One fresh sensing matrix and noise vector per trial. `cone_msd` is
/// D(cone(subdiff f(x0))) and sets predicted_eta = min(m, cone_msd).
/// Throws RunQualityError when more than 10% of trials fail to converge.
LassoSweepRecord estimate_lasso_point(const SignalInstance& inst, std::size_t m, double cone_msd,
                                      const LassoExperiment& cfg);

std::vector<LassoSweepRecord> sweep_measurements(const SignalInstance& inst, std::span<const std::size_t> m_grid,
                                                 double cone_msd, const LassoExperiment& cfg);

}  // namespace proxmse
