#include <doctest.h>

#include <cmath>

#include "proxmse/scalar_min.hpp"

using namespace proxmse;

TEST_CASE("golden section finds an interior quadratic minimum") {
  const auto res = golden_section_minimize([](double x) { return (x - 1.3) * (x - 1.3) + 2.0; }, 0.0, 5.0, {});
  CHECK(res.converged);
  CHECK(res.x == doctest::Approx(1.3).epsilon(1e-6));
  CHECK(res.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("minimum at the left boundary") {
  const auto res = golden_section_minimize([](double x) { return (x + 1.0) * (x + 1.0); }, 0.0, 3.0, {});
  CHECK(res.converged);
  CHECK(res.x == 0.0);
  CHECK(res.value == doctest::Approx(1.0));
}

TEST_CASE("flat minimum resolves toward the smallest minimizer") {
  auto f = [](double x) { return x < 1.0 ? (1.0 - x) * (1.0 - x) : 0.0; };
  const auto res = golden_section_minimize(f, 0.0, 10.0, {});
  CHECK(res.converged);
  CHECK(res.value == 0.0);
  CHECK(res.x < 1.0 + 1e-5);
}

TEST_CASE("non-convergence is reported") {
  ScalarMinConfig cfg;
  cfg.max_iters = 3;
  const auto res = golden_section_minimize([](double x) { return std::abs(x - 0.5); }, 0.0, 100.0, cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.iters == 3);
}

TEST_CASE("degenerate interval") {
  const auto res = golden_section_minimize([](double x) { return x * x; }, 0.0, 0.0, {});
  CHECK(res.converged);
  CHECK(res.x == 0.0);
}
