#pragma once

// Independent reference computations for tests. Nothing here calls the code
// paths it is used to check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

/// Tensor grid search over [lo, hi]^dim at `step`, then repeated zooming
/// around the incumbent (box +-2 steps, step / 5) until step < final_step.
/// Points failing `feasible` are skipped.
inline double grid_zoom_min(std::size_t dim, double lo, double hi, double step,
                            const std::function<double(const std::vector<double>&)>& objective,
                            const std::function<bool(const std::vector<double>&)>& feasible,
                            double final_step = 1e-9) {
  std::vector<double> best(dim, 0.0);
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> box_lo(dim, lo);
  std::vector<double> box_hi(dim, hi);
  while (true) {
    std::vector<std::size_t> counts(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      counts[d] = static_cast<std::size_t>(std::floor((box_hi[d] - box_lo[d]) / step + 1e-9)) + 1;
    }
    std::vector<std::size_t> idx(dim, 0);
    std::vector<double> p(dim);
    while (true) {
      for (std::size_t d = 0; d < dim; ++d) {
        p[d] = std::min(box_lo[d] + static_cast<double>(idx[d]) * step, box_hi[d]);
      }
      if (feasible(p)) {
        const double v = objective(p);
        if (v < best_val) {
          best_val = v;
          best = p;
        }
      }
      std::size_t d = 0;
      while (d < dim && ++idx[d] == counts[d]) idx[d++] = 0;
      if (d == dim) break;
    }
    if (step < final_step) break;
    for (std::size_t d = 0; d < dim; ++d) {
      box_lo[d] = std::max(lo, best[d] - 2.0 * step);
      box_hi[d] = std::min(hi, best[d] + 2.0 * step);
    }
    step /= 5.0;
  }
  return best_val;
}

inline double grid_zoom_min_1d(double lo, double hi, double step, const std::function<double(double)>& f,
                               double final_step = 1e-10) {
  return grid_zoom_min(
      1, lo, hi, step, [&](const std::vector<double>& p) { return f(p[0]); },
      [](const std::vector<double>&) { return true; }, final_step);
}

/// E[max(|g| - lambda, 0)^2] for standard normal g by adaptive Gauss-Kronrod.
inline double offsupport_msd_quadrature(double lambda) {
  auto integrand = [lambda](double t) {
    const double h = t - lambda;
    return 2.0 * h * h * std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, lambda, std::numeric_limits<double>::infinity(), 20, 1e-14);
}

/// Largest singular value of a 2 x 2 matrix [[a, b], [c, d]] in closed form.
inline double spectral_norm_2x2(double a, double b, double c, double d) {
  const double fro = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  return std::sqrt(0.5 * (fro + std::sqrt(std::max(fro * fro - 4.0 * det * det, 0.0))));
}

/// argmin_x over a step-1e-4 grid on [-10, 10] of 0.5 (y - x)^2 + tau * w * |x|.
inline double scalar_prox_grid(double y, double tau, double w = 1.0) {
  double best_x = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (long i = -100000; i <= 100000; ++i) {
    const double x = 1e-4 * static_cast<double>(i);
    const double v = 0.5 * (y - x) * (y - x) + tau * w * std::abs(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace oracle
