#include "proxmse/denoise.hpp"

#include <cmath>
#include <stdexcept>

#include "proxmse/errors.hpp"
#include "proxmse/prox.hpp"
#include "proxmse/rng.hpp"
#include "proxmse/stats.hpp"
#include "proxmse/subdiff.hpp"

namespace proxmse {
namespace {

constexpr double kResidualTol = 1e-8;

void check_grid(std::span<const double> grid, std::size_t trials) {
  if (grid.empty()) throw std::invalid_argument("sigma grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw std::invalid_argument("sigma grid must be strictly positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("sigma grid must be strictly ascending");
  }
  if (trials < 2) throw std::invalid_argument("denoising needs at least 2 trials per sigma");
}

Vector draw_noise(std::size_t n, std::size_t sigma_index, std::size_t trial, std::uint64_t seed) {
  RandomStream rng(seed, stream_id(StreamPurpose::kDenoise, static_cast<std::uint32_t>(sigma_index),
                                   static_cast<std::uint32_t>(trial)));
  Vector v(static_cast<Eigen::Index>(n));
  rng.fill_normal(v);
  return v;
}

std::span<const double> as_span(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

void check_mixed_signal(const SignalInstance& inst) {
  if (!std::holds_alternative<SparseStructure>(inst.structure)) {
    throw std::invalid_argument("the mixed estimator needs a sparse signal");
  }
  if ((inst.values.array() < 0.0).any()) {
    throw std::invalid_argument("the mixed estimator needs an entrywise nonnegative signal");
  }
}

DenoiseRun run(const SignalInstance& inst, Estimator est, double lambda, std::span<const double> grid,
               std::size_t trials, std::uint64_t seed, Exec exec) {
  check_grid(grid, trials);
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  if (est == Estimator::kMixed) check_mixed_signal(inst);

  DenoiseRun out;
  out.recipe = inst.recipe;
  out.estimator = est;
  out.lambda = lambda;
  std::vector<DenoiseTrial> results(trials);
  for (std::size_t si = 0; si < grid.size(); ++si) {
    for_each_index(trials, exec, [&](std::size_t t) {
      results[t] = denoise_trial(inst, est, lambda, grid[si], si, t, seed);
    });
    MeanAccumulator nmse;
    MeanAccumulator dref;
    for (const auto& r : results) {
      nmse.add(r.nmse);
      dref.add(r.d_reference);
    }
    out.records.push_back(DenoiseRecord{grid[si], nmse.mean(), nmse.standard_error(), dref.mean(),
                                        dref.standard_error(), trials});
  }
  return out;
}

}  // namespace

double mixed_dist_sq(const SparseStructure& s, std::span<const double> g, double lambda) {
  if (g.size() != s.n) throw ShapeError("vector length does not match the signal");
  double d = 0.0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double h = g[i] - lambda;
    if (next < s.support.size() && s.support[next] == i) {
      d += h * h;
      ++next;
    } else if (h > 0.0) {
      d += h * h;
    }
  }
  return d;
}

const char* estimator_name(Estimator e) {
  switch (e) {
    case Estimator::kRegularized: return "regularized";
    case Estimator::kConstrained: return "constrained";
    case Estimator::kMixed: return "mixed";
  }
  return "unknown";
}

std::vector<double> default_sigma_grid(const SignalInstance& inst) {
  const double scale = min_nonzero_magnitude(inst);
  std::vector<double> grid;
  for (int i = 0; i < 8; ++i) grid.push_back(scale * std::pow(10.0, -3.0 + 3.0 * i / 7.0));
  return grid;
}

DenoiseTrial denoise_trial(const SignalInstance& inst, Estimator est, double lambda, double sigma,
                           std::size_t sigma_index, std::size_t trial, std::uint64_t seed) {
  const NormSpec norm = norm_of(inst.structure);
  const Vector v = draw_noise(static_cast<std::size_t>(inst.values.size()), sigma_index, trial, seed);
  const Vector y = inst.values + sigma * v;
  DenoiseTrial out;
  Vector x_star;
  switch (est) {
    case Estimator::kRegularized: {
      ProxResult res = prox(norm, y, sigma * lambda);
      if (res.residual > kResidualTol) {
        throw NumericalError("prox optimality residual " + std::to_string(res.residual) + " exceeds tolerance",
                             trial);
      }
      x_star = std::move(res.minimizer);
      out.d_reference = dist_sq_scaled_subdiff(inst.structure, as_span(v), lambda);
      break;
    }
    case Estimator::kConstrained: {
      x_star = project_ball(y, norm, norm_value(norm, inst.values));
      out.d_reference = cone_dist_sq(distance_profile(inst.structure, as_span(v)), ScalarMinConfig{}, trial);
      break;
    }
    case Estimator::kMixed: {
      const auto& s = std::get<SparseStructure>(inst.structure);
      const double tau = sigma * lambda;
      x_star = (y.array() - tau).cwiseMax(0.0).matrix();
      out.d_reference = mixed_dist_sq(s, as_span(v), lambda);
      break;
    }
  }
  out.nmse = (x_star - inst.values).squaredNorm() / (sigma * sigma);
  return out;
}

DenoiseRun run_regularized(const SignalInstance& inst, double lambda, std::span<const double> sigma_grid,
                           std::size_t trials, std::uint64_t seed, Exec exec) {
  return run(inst, Estimator::kRegularized, lambda, sigma_grid, trials, seed, exec);
}

DenoiseRun run_constrained(const SignalInstance& inst, std::span<const double> sigma_grid, std::size_t trials,
                           std::uint64_t seed, Exec exec) {
  return run(inst, Estimator::kConstrained, 0.0, sigma_grid, trials, seed, exec);
}

DenoiseRun run_mixed_nonneg_sparse(const SignalInstance& inst, double lambda, std::span<const double> sigma_grid,
                                   std::size_t trials, std::uint64_t seed, Exec exec) {
  return run(inst, Estimator::kMixed, lambda, sigma_grid, trials, seed, exec);
}

double first_order_relative_error(const SignalInstance& inst, double lambda, double sigma, std::size_t trials,
                                  std::uint64_t seed, Exec exec) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  const NormSpec norm = norm_of(inst.structure);
  std::vector<double> rel(trials);
  for_each_index(trials, exec, [&](std::size_t t) {
    const Vector v = draw_noise(static_cast<std::size_t>(inst.values.size()), 0, t, seed);
    const Vector y = inst.values + sigma * v;
    const Vector err = (prox(norm, y, sigma * lambda).minimizer - inst.values) / sigma;
    const Vector approx = v - project_scaled_subdiff(inst.structure, as_span(v), lambda);
    const double denom = approx.norm();
    rel[t] = denom > 0.0 ? (err - approx).norm() / denom : (err - approx).norm();
  });
  return accumulate(rel).mean();
}

}  // namespace proxmse
