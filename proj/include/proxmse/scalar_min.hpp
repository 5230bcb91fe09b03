#pragma once

#include <cmath>
#include <cstddef>

namespace proxmse {

struct ScalarMinConfig {
  double tol = 1e-6;            // final bracket width
  std::size_t max_iters = 200;
};

struct ScalarMinResult {
  double x = 0.0;
  double value = 0.0;
  std::size_t iters = 0;
  bool converged = false;
};

/// Golden-section search for a unimodal f on [lo, hi]. Ties keep the left
/// sub-interval, so a flat minimum resolves toward its smallest point.
template <class F>
ScalarMinResult golden_section_minimize(F&& f, double lo, double hi, const ScalarMinConfig& cfg) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  std::size_t it = 0;
  while (b - a > cfg.tol && it < cfg.max_iters) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    ++it;
  }
  ScalarMinResult res;
  res.iters = it;
  res.converged = b - a <= cfg.tol;
  // Candidates: both interior probes and the left end (covers a minimum at the
  // boundary lo = 0, where the probes only approach it).
  res.x = fc <= fd ? c : d;
  res.value = std::fmin(fc, fd);
  const double fa = f(a);
  if (fa <= res.value) {
    res.x = a;
    res.value = fa;
  }
  return res;
}

}  // namespace proxmse
