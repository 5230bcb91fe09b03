#pragma once

#include <cstddef>
#include <vector>

#include "proxmse/signal_model.hpp"

namespace proxmse {

/// Output of a proximal step argmin_x 0.5 ||y - x||^2 + tau f(x).
struct ProxResult {
  Vector minimizer;
  double objective = 0.0;  // value at the minimizer
  double residual = 0.0;   // dist(y - x, tau * subdiff f(x)); zero certifies optimality
};

ProxResult soft_threshold(const Vector& y, double tau);
ProxResult weighted_soft_threshold(const Vector& y, double tau, const std::vector<double>& weights);
ProxResult block_soft_threshold(const Vector& y, double tau, std::size_t block_size);
/// y is a side x side matrix flattened column-major.
ProxResult singular_value_threshold(const Vector& y, std::size_t side, double tau);

/// Dispatches to the operator matching `norm`.
ProxResult prox(const NormSpec& norm, const Vector& y, double tau);

/// Euclidean projection onto {x : f(x) <= radius} for l1, l12 and nuclear f.
Vector project_ball(const Vector& y, const NormSpec& norm, double radius);

/// Projection of a vector onto the l1 ball by sorting and thresholding.
Vector project_l1_ball(const Vector& y, double radius);

/// dist(y - x_star, tau * subdiff f(x_star)), with the subdifferential taken at
/// x_star's own support / signs / singular subspaces.
double prox_residual(const NormSpec& norm, const Vector& y, const Vector& x_star, double tau);

}  // namespace proxmse
