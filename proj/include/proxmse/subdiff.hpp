#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "proxmse/scalar_min.hpp"
#include "proxmse/signal_model.hpp"
#include "proxmse/stats.hpp"

namespace proxmse {

/// dist(g, lambda * subdiff f(x0))^2 as a function of lambda:
///   base - 2 lambda cross + lambda^2 quad + sum_j max(c_j - lambda w_j, 0)^2.
/// The quadratic part comes from the fixed (on-support / tangent) component
/// of the subdifferential, the hinge terms from the free component.
struct DistanceProfile {
  double base = 0.0;
  double cross = 0.0;
  double quad = 0.0;
  std::vector<double> hinge;    // c_j >= 0
  std::vector<double> weight;   // w_j >= 0; empty means all ones

  double eval(double lambda) const noexcept;
  /// An upper bound on argmin_{lambda >= 0} eval: past every hinge breakpoint
  /// the function is the quadratic part, minimized at cross / quad.
  double search_upper() const noexcept;
};

DistanceProfile distance_profile(const SignalStructure& s, std::span<const double> g);

/// Squared distance from g to lambda * subdiff f(x0). Throws ShapeError.
double dist_sq_scaled_subdiff(const SignalStructure& s, std::span<const double> g, double lambda);

/// Closest point of lambda * subdiff f(x0) to g.
Vector project_scaled_subdiff(const SignalStructure& s, std::span<const double> g, double lambda);

/// D(lambda * subdiff f(x0)) by Monte Carlo, one estimate per lambda. All lambdas
/// share the same Gaussian samples.
std::vector<MsdEstimate> msd_lambda_grid(const SignalStructure& s, std::span<const double> lambdas,
                                         const McConfig& mc);
MsdEstimate msd_lambda(const SignalStructure& s, double lambda, const McConfig& mc);

/// E[max(|g| - lambda, 0)^2] for scalar standard normal g.
double l1_offsupport_msd(double lambda);

/// Exact D(lambda * subdiff ||x0||_1) for a k-sparse x0 in R^n.
double msd_lambda_exact_l1(std::size_t n, std::size_t k, double lambda);

/// Per-sample minimum over lambda >= 0 of the squared distance; this is the
/// squared distance to cone(subdiff f(x0)).
double cone_dist_sq(const DistanceProfile& profile, const ScalarMinConfig& opt, std::size_t sample_index);

/// D(cone(subdiff f(x0))) by Monte Carlo.
MsdEstimate msd_cone(const SignalStructure& s, const McConfig& mc, const ScalarMinConfig& opt = {});

struct OptimalLambda {
  double lambda = 0.0;
  MsdEstimate msd;
};

/// argmin over lambda of the sample-average D(lambda * subdiff f(x0)), with
/// common random numbers across lambda.
OptimalLambda optimal_lambda(const SignalStructure& s, const McConfig& mc, const ScalarMinConfig& opt = {});

struct GeometryConstants {
  double R = 0.0;      // sup of ||s|| over the subdifferential
  double f_max = 0.0;  // max f(x / ||x||) over signals with this subdifferential
  double L = 0.0;      // 1 / ||e||, e the common tangent-space projection of subgradients
  std::size_t dof = 0;
};

GeometryConstants geometry_constants(const SignalStructure& s);

/// Smallest lambda for which table1_bound holds.
double table1_threshold(const SignalStructure& s);

/// Closed-form upper bound on D(lambda * subdiff f(x0)). Throws BoundNotValid
/// below table1_threshold, InvalidStructure for weighted l1.
double table1_bound(const SignalStructure& s, double lambda);

/// cone_msd + 2 pi (R^2 L^2 + R L sqrt(cone_msd) + 1).
double lipschitz_upper_bound(const SignalStructure& s, double cone_msd);

/// Additive gap between the optimally tuned and cone quantities: 2 R / f_max.
double sandwich_gap(const SignalStructure& s);

/// D of the nonnegative orthant in R^n, or of its polar (nonpositive orthant).
MsdEstimate msd_orthant(std::size_t n, bool polar, const McConfig& mc);

}  // namespace proxmse
