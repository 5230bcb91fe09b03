#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "proxmse/parallel.hpp"
#include "proxmse/signal_model.hpp"

namespace proxmse {

enum class Estimator {
  kRegularized,  // prox of sigma * lambda * f
  kConstrained,  // projection onto {f(x) <= f(x0)}
  kMixed,        // lambda-regularized l1 under a nonnegativity constraint
};

const char* estimator_name(Estimator e);

/// One noise draw: NMSE ||x* - x0||^2 / sigma^2 and the first-order reference
/// distance computed from the same normalized noise vector.
struct DenoiseTrial {
  double nmse = 0.0;
  double d_reference = 0.0;
};

struct DenoiseRecord {
  double sigma = 0.0;
  double nmse_mean = 0.0;
  double nmse_stderr = 0.0;
  double d_reference = 0.0;
  double d_reference_stderr = 0.0;
  std::size_t trials = 0;
};

struct DenoiseRun {
  SignalRecipe recipe;
  Estimator estimator = Estimator::kRegularized;
  double lambda = 0.0;  // unused for the constrained estimator
  std::vector<DenoiseRecord> records;
};

/// Squared distance from g to lambda * subdiff ||x0||_1 plus the normal cone of
/// the nonnegative orthant at x0, for x0 >= 0 with support s.support.
double mixed_dist_sq(const SparseStructure& s, std::span<const double> g, double lambda);

/// 8 log-spaced noise levels from 1e-3 to 1 times the smallest structural magnitude.
std::vector<double> default_sigma_grid(const SignalInstance& inst);

/// Runs trial `trial` at grid position `sigma_index`. The noise vector depends
/// only on (seed, sigma_index, trial).
DenoiseTrial denoise_trial(const SignalInstance& inst, Estimator est, double lambda, double sigma,
                           std::size_t sigma_index, std::size_t trial, std::uint64_t seed);

DenoiseRun run_regularized(const SignalInstance& inst, double lambda, std::span<const double> sigma_grid,
                           std::size_t trials, std::uint64_t seed, Exec exec = Exec::kParallel);
DenoiseRun run_constrained(const SignalInstance& inst, std::span<const double> sigma_grid, std::size_t trials,
                           std::uint64_t seed, Exec exec = Exec::kParallel);
DenoiseRun run_mixed_nonneg_sparse(const SignalInstance& inst, double lambda, std::span<const double> sigma_grid,
                                   std::size_t trials, std::uint64_t seed, Exec exec = Exec::kParallel);

/// Compares the regularized prox error (x* - x0) / sigma with its first-order
/// approximation v - Proj(v, lambda * subdiff f(x0)). Returns the trial average
/// of ||true - approx|| / ||approx||.
double first_order_relative_error(const SignalInstance& inst, double lambda, double sigma, std::size_t trials,
                                  std::uint64_t seed, Exec exec = Exec::kParallel);

}  // namespace proxmse
