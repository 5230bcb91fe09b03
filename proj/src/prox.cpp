#include "proxmse/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "proxmse/errors.hpp"
#include "proxmse/subdiff.hpp"

namespace proxmse {
namespace {

void check_tau(double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");
}

double support_tol(const Vector& x) {
  const double scale = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
  return 1e-12 * std::max(1.0, scale);
}

ProxResult finish(const NormSpec& norm, const Vector& y, Vector x, double tau) {
  ProxResult res;
  res.objective = 0.5 * (y - x).squaredNorm() + tau * norm_value(norm, x);
  res.residual = prox_residual(norm, y, x, tau);
  res.minimizer = std::move(x);
  return res;
}

double shrink(double v, double t) {
  if (v >= t) return v - t;
  if (v > -t) return 0.0;
  return v + t;
}

}  // namespace

ProxResult soft_threshold(const Vector& y, double tau) {
  check_tau(tau);
  Vector x = y.unaryExpr([tau](double v) { return shrink(v, tau); });
  NormSpec norm;
  return finish(norm, y, std::move(x), tau);
}

ProxResult weighted_soft_threshold(const Vector& y, double tau, const std::vector<double>& weights) {
  check_tau(tau);
  if (weights.size() != static_cast<std::size_t>(y.size())) throw ShapeError("one weight per coordinate");
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
  }
  Vector x(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) x[i] = shrink(y[i], tau * weights[static_cast<std::size_t>(i)]);
  NormSpec norm;
  norm.kind = NormKind::kWeightedL1;
  norm.weights = weights;
  return finish(norm, y, std::move(x), tau);
}

ProxResult block_soft_threshold(const Vector& y, double tau, std::size_t block_size) {
  check_tau(tau);
  const auto b = static_cast<Eigen::Index>(block_size);
  if (b == 0 || y.size() % b != 0) throw ShapeError("length not divisible by block size");
  Vector x(y.size());
  for (Eigen::Index off = 0; off < y.size(); off += b) {
    const double nrm = y.segment(off, b).norm();
    const double scale = nrm > tau ? 1.0 - tau / nrm : 0.0;
    x.segment(off, b) = scale * y.segment(off, b);
  }
  NormSpec norm;
  norm.kind = NormKind::kL12;
  norm.block_size = block_size;
  return finish(norm, y, std::move(x), tau);
}

ProxResult singular_value_threshold(const Vector& y, std::size_t side, double tau) {
  check_tau(tau);
  const auto d = static_cast<Eigen::Index>(side);
  if (d * d != y.size()) throw ShapeError("vector is not a flattened side x side matrix");
  const Eigen::Map<const Matrix> Y(y.data(), d, d);
  Eigen::JacobiSVD<Matrix> svd(Y, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD failed in singular value thresholding");
  const Vector shrunk = (svd.singularValues().array() - tau).cwiseMax(0.0).matrix();
  const Matrix X = svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
  NormSpec norm;
  norm.kind = NormKind::kNuclear;
  norm.side = side;
  return finish(norm, y, X.reshaped(), tau);
}

ProxResult prox(const NormSpec& norm, const Vector& y, double tau) {
  switch (norm.kind) {
    case NormKind::kL1: return soft_threshold(y, tau);
    case NormKind::kWeightedL1: return weighted_soft_threshold(y, tau, norm.weights);
    case NormKind::kL12: return block_soft_threshold(y, tau, norm.block_size);
    case NormKind::kNuclear: return singular_value_threshold(y, norm.side, tau);
  }
  throw std::invalid_argument("unknown norm");
}

Vector project_l1_ball(const Vector& y, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
  if (y.lpNorm<1>() <= radius) return y;
  if (radius == 0.0) return Vector::Zero(y.size());
  std::vector<double> u(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) u[static_cast<std::size_t>(i)] = std::abs(y[i]);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - radius) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) {
      theta = candidate;
    } else {
      break;
    }
  }
  return y.unaryExpr([theta](double v) { return shrink(v, theta); });
}

Vector project_ball(const Vector& y, const NormSpec& norm, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
  switch (norm.kind) {
    case NormKind::kL1: return project_l1_ball(y, radius);
    case NormKind::kL12: {
      const auto b = static_cast<Eigen::Index>(norm.block_size);
      if (b == 0 || y.size() % b != 0) throw ShapeError("length not divisible by block size");
      const Eigen::Index blocks = y.size() / b;
      Vector norms(blocks);
      for (Eigen::Index i = 0; i < blocks; ++i) norms[i] = y.segment(i * b, b).norm();
      if (norms.sum() <= radius) return y;
      const Vector target = project_l1_ball(norms, radius);
      Vector x = Vector::Zero(y.size());
      for (Eigen::Index i = 0; i < blocks; ++i) {
        if (target[i] > 0.0) x.segment(i * b, b) = (target[i] / norms[i]) * y.segment(i * b, b);
      }
      return x;
    }
    case NormKind::kNuclear: {
      const auto d = static_cast<Eigen::Index>(norm.side);
      if (d * d != y.size()) throw ShapeError("vector is not a flattened side x side matrix");
      const Eigen::Map<const Matrix> Y(y.data(), d, d);
      Eigen::JacobiSVD<Matrix> svd(Y, Eigen::ComputeFullU | Eigen::ComputeFullV);
      if (svd.singularValues().sum() <= radius) return y;
      const Vector sv = project_l1_ball(svd.singularValues(), radius);
      const Matrix X = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
      return X.reshaped();
    }
    case NormKind::kWeightedL1: break;
  }
  throw std::invalid_argument("ball projection is implemented for l1, l12 and nuclear norms only");
}

double prox_residual(const NormSpec& norm, const Vector& y, const Vector& x_star, double tau) {
  check_tau(tau);
  if (y.size() != x_star.size()) throw ShapeError("y and x_star must have equal length");
  const SignalStructure at_star = structure_at(norm, x_star, support_tol(x_star));
  const Vector gap = y - x_star;
  const Vector proj = project_scaled_subdiff(at_star, {gap.data(), static_cast<std::size_t>(gap.size())}, tau);
  return (gap - proj).norm();
}

}  // namespace proxmse
