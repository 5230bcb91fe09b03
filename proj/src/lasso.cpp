#include "proxmse/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "proxmse/errors.hpp"
#include "proxmse/prox.hpp"
#include "proxmse/stats.hpp"

namespace proxmse {
namespace {

double dual_norm(const NormSpec& norm, const Vector& g) {
  switch (norm.kind) {
    case NormKind::kL1: return g.cwiseAbs().maxCoeff();
    case NormKind::kL12: {
      const auto b = static_cast<Eigen::Index>(norm.block_size);
      double best = 0.0;
      for (Eigen::Index off = 0; off < g.size(); off += b) best = std::max(best, g.segment(off, b).norm());
      return best;
    }
    case NormKind::kNuclear: {
      const auto d = static_cast<Eigen::Index>(norm.side);
      const Eigen::Map<const Matrix> G(g.data(), d, d);
      return Eigen::JacobiSVD<Matrix>(G).singularValues()[0];
    }
    case NormKind::kWeightedL1: break;
  }
  throw std::invalid_argument("LASSO solver supports l1, l12 and nuclear balls only");
}

double operator_norm_sq(const Matrix& A) {
  Vector v = Vector::Ones(A.cols()) / std::sqrt(static_cast<double>(A.cols()));
  double estimate = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Vector w = A.transpose() * (A * v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    const bool done = std::abs(next - estimate) <= 1e-6 * next;
    estimate = next;
    if (done) break;
  }
  return estimate;
}

}  // namespace

const char* matrix_kind_name(MatrixKind k) { return k == MatrixKind::kUnitary ? "unitary" : "gaussian"; }

Matrix sample_partial_unitary(std::size_t m, std::size_t n, RandomStream& rng) {
  if (m < 1 || m > n) throw std::invalid_argument("partial unitary matrix needs 1 <= m <= n");
  return haar_orthonormal(n, m, rng).transpose();
}

Matrix sample_partial_unitary(std::size_t m, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, stream_id(StreamPurpose::kLassoMatrix, 0, 0));
  return sample_partial_unitary(m, n, rng);
}

Matrix sample_gaussian_matrix(std::size_t m, std::size_t n, RandomStream& rng) {
  Matrix A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  rng.fill_normal(A.reshaped());
  return A;
}

Matrix sample_gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, stream_id(StreamPurpose::kLassoMatrix, 0, 0));
  return sample_gaussian_matrix(m, n, rng);
}

double lasso_duality_gap(const Matrix& A, const Vector& y, const BallConstraint& ball, const Vector& x) {
  const Vector grad = 2.0 * (A.transpose() * (A * x - y));
  return grad.dot(x) + ball.radius * dual_norm(ball.norm, grad);
}

LassoSolution solve_constrained_lasso(const Matrix& A, const Vector& y, const BallConstraint& ball,
                                      const SolverConfig& cfg, const Vector* x_init) {
  if (A.rows() != y.size()) throw ShapeError("A and y have mismatched row counts");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  const double lipschitz = cfg.step == StepPolicy::kUnit ? 1.0 : 1.01 * operator_norm_sq(A);
  const double step = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
  const std::size_t check_every = std::max<std::size_t>(cfg.check_every, 1);

  Vector x = x_init ? *x_init : project_ball(A.transpose() * y, ball.norm, ball.radius);
  if (x.size() != A.cols()) throw ShapeError("initial point has the wrong length");
  Vector z = x;
  double t = 1.0;
  LassoSolution sol;
  sol.gap = lasso_duality_gap(A, y, ball, x);
  sol.converged = sol.gap <= cfg.tol;
  std::size_t it = 0;
  while (!sol.converged && it < cfg.max_iters) {
    const Vector grad = A.transpose() * (A * z - y);
    Vector next = project_ball(z - step * grad, ball.norm, ball.radius);
    if (cfg.accelerated) {
      // Gradient-based adaptive restart.
      if ((z - next).dot(next - x) > 0.0) t = 1.0;
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      z = next + ((t - 1.0) / t_next) * (next - x);
      t = t_next;
    } else {
      z = next;
    }
    x = std::move(next);
    ++it;
    if (it % check_every == 0 || it == cfg.max_iters) {
      sol.gap = lasso_duality_gap(A, y, ball, x);
      sol.converged = sol.gap <= cfg.tol;
    }
  }
  sol.iters = it;
  sol.cost = (y - A * x).squaredNorm();
  sol.x = std::move(x);
  return sol;
}

double default_lasso_sigma(const SignalInstance& inst) { return 1e-4 * inst.values.norm(); }

LassoSweepRecord estimate_lasso_point(const SignalInstance& inst, std::size_t m, double cone_msd,
                                      const LassoExperiment& cfg) {
  const auto n = static_cast<std::size_t>(inst.values.size());
  if (m < 1 || m > n) throw std::invalid_argument("measurement count must be in [1, n]");
  if (cfg.trials < 2) throw std::invalid_argument("LASSO estimation needs at least 2 trials");
  const double sigma = cfg.sigma.value_or(default_lasso_sigma(inst));
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");

  BallConstraint ball{norm_of(inst.structure), 0.0};
  ball.radius = norm_value(ball.norm, inst.values);
  SolverConfig solver = cfg.solver;
  solver.tol = cfg.gap_rel * static_cast<double>(m) * sigma * sigma;
  solver.step = cfg.matrix == MatrixKind::kUnitary ? StepPolicy::kUnit : StepPolicy::kPowerIteration;
  const double s2 = sigma * sigma;

  std::vector<LassoTrial> log(cfg.trials);
  for_each_index(cfg.trials, cfg.exec, [&](std::size_t t) {
    const auto mi = static_cast<std::uint32_t>(m);
    const auto ti = static_cast<std::uint32_t>(t);
    RandomStream mat_rng(cfg.seed, stream_id(StreamPurpose::kLassoMatrix, mi, ti));
    RandomStream noise_rng(cfg.seed, stream_id(StreamPurpose::kLassoNoise, mi, ti));
    const Matrix A = cfg.matrix == MatrixKind::kUnitary ? sample_partial_unitary(m, n, mat_rng)
                                                        : sample_gaussian_matrix(m, n, mat_rng);
    Vector v(static_cast<Eigen::Index>(m));
    noise_rng.fill_normal(v);
    const Vector truth = A * inst.values;
    const Vector y = truth + sigma * v;
    const LassoSolution sol = solve_constrained_lasso(A, y, ball, solver);
    LassoTrial& out = log[t];
    out.eta = (A * sol.x - truth).squaredNorm() / s2;
    out.f = sol.cost / s2;
    out.e = (sol.x - inst.values).squaredNorm() / s2;
    out.cost_at_truth = (sigma * v).squaredNorm() / s2;
    out.iters = sol.iters;
    out.converged = sol.converged;
  });

  LassoSweepRecord rec;
  rec.m = m;
  rec.trials = cfg.trials;
  MeanAccumulator eta, f, e, sum;
  for (const auto& tr : log) {
    if (!tr.converged) {
      ++rec.excluded_trials;
      continue;
    }
    eta.add(tr.eta);
    f.add(tr.f);
    e.add(tr.e);
    sum.add(tr.eta + tr.f);
  }
  if (10 * rec.excluded_trials > cfg.trials) {
    throw RunQualityError("LASSO solver failed to converge on " + std::to_string(rec.excluded_trials) + " of " +
                          std::to_string(cfg.trials) + " trials at m = " + std::to_string(m));
  }
  rec.eta_mean = eta.mean();
  rec.eta_stderr = eta.standard_error();
  rec.f_mean = f.mean();
  rec.f_stderr = f.standard_error();
  rec.e_mean = e.mean();
  rec.e_stderr = e.standard_error();
  rec.sum_stderr = sum.standard_error();
  rec.predicted_eta = std::min(static_cast<double>(m), cone_msd);
  rec.trial_log = std::move(log);
  return rec;
}

std::vector<LassoSweepRecord> sweep_measurements(const SignalInstance& inst, std::span<const std::size_t> m_grid,
                                                 double cone_msd, const LassoExperiment& cfg) {
  if (m_grid.empty()) throw std::invalid_argument("measurement grid must not be empty");
  for (std::size_t i = 1; i < m_grid.size(); ++i) {
    if (m_grid[i] <= m_grid[i - 1]) throw std::invalid_argument("measurement grid must be ascending");
  }
  std::vector<LassoSweepRecord> out;
  out.reserve(m_grid.size());
  for (std::size_t m : m_grid) out.push_back(estimate_lasso_point(inst, m, cone_msd, cfg));
  return out;
}

}  // namespace proxmse
