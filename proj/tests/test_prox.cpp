#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "oracles.hpp"
#include "proxmse/errors.hpp"
#include "proxmse/prox.hpp"

using namespace proxmse;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector random_vector(RandomStream& rng, Eigen::Index n, double scale) {
  Vector v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

NormSpec l1() { return NormSpec{}; }

NormSpec weighted(std::vector<double> w) {
  NormSpec s;
  s.kind = NormKind::kWeightedL1;
  s.weights = std::move(w);
  return s;
}

NormSpec l12(std::size_t b) {
  NormSpec s;
  s.kind = NormKind::kL12;
  s.block_size = b;
  return s;
}

NormSpec nuclear(std::size_t d) {
  NormSpec s;
  s.kind = NormKind::kNuclear;
  s.side = d;
  return s;
}

}  // namespace

TEST_CASE("soft threshold examples") {
  const auto r = soft_threshold(vec({3.0, 0.5, -3.0, 1.0, -1.0}), 1.0);
  CHECK(r.minimizer[0] == 2.0);
  CHECK(r.minimizer[1] == 0.0);
  CHECK(r.minimizer[2] == -2.0);
  CHECK(r.minimizer[3] == 0.0);
  CHECK(r.minimizer[4] == 0.0);
  CHECK(r.objective == doctest::Approx(0.5 * (1 + 0.25 + 1 + 1 + 1) + 1.0 * 4.0));
  CHECK(r.residual <= 1e-10);
  const Vector y = vec({1.5, -0.2, 0.0});
  CHECK(soft_threshold(y, 0.0).minimizer == y);
  CHECK_THROWS_AS(soft_threshold(y, -1.0), std::invalid_argument);
}

TEST_CASE("block soft threshold examples") {
  CHECK(block_soft_threshold(vec({3.0, 4.0}), 5.0, 2).minimizer.norm() == 0.0);
  const Vector x = block_soft_threshold(vec({3.0, 4.0}), 2.5, 2).minimizer;
  CHECK(x[0] == doctest::Approx(1.5));
  CHECK(x[1] == doctest::Approx(2.0));
  // Radial oracle: the minimizer is c * y / ||y|| for the scalar c minimizing
  // 0.5 (5 - c)^2 + 2.5 |c|.
  const double c = oracle::scalar_prox_grid(5.0, 2.5);
  CHECK(std::abs(x.norm() - c) < 1e-3);
  CHECK_THROWS_AS(block_soft_threshold(vec({1.0, 2.0, 3.0}), 1.0, 2), ShapeError);

  RandomStream rng(1, stream_id(StreamPurpose::kTest, 3, 0));
  for (int t = 0; t < 50; ++t) {
    const Vector y = random_vector(rng, 12, 2.0);
    const double tau = 2.0 * rng.uniform();
    CHECK((block_soft_threshold(y, tau, 1).minimizer - soft_threshold(y, tau).minimizer).norm() < 1e-14);
  }
}

TEST_CASE("singular value threshold examples") {
  const Vector y = vec({3.0, 0.0, 0.0, 1.0});
  const auto r = singular_value_threshold(y, 2, 2.0);
  CHECK((r.minimizer - vec({1.0, 0.0, 0.0, 0.0})).norm() < 1e-12);
  CHECK(r.residual <= 1e-8);
  CHECK((singular_value_threshold(y, 2, 0.0).minimizer - y).norm() < 1e-12);
  // Rank one with tau above its singular value.
  RandomStream rng(2, stream_id(StreamPurpose::kTest, 3, 1));
  Vector u = random_vector(rng, 4, 1.0);
  Vector v = random_vector(rng, 4, 1.0);
  u.normalize();
  v.normalize();
  const Matrix Y = 1.7 * u * v.transpose();
  CHECK(singular_value_threshold(Y.reshaped(), 4, 1.8).minimizer.norm() < 1e-12);
  CHECK_THROWS_AS(singular_value_threshold(vec({1.0, 2.0, 3.0}), 2, 1.0), ShapeError);
}

TEST_CASE("weighted soft threshold examples") {
  RandomStream rng(3, stream_id(StreamPurpose::kTest, 3, 2));
  const Vector y = random_vector(rng, 10, 2.0);
  CHECK(weighted_soft_threshold(y, 0.7, std::vector<double>(10, 1.0)).minimizer == soft_threshold(y, 0.7).minimizer);
  CHECK(weighted_soft_threshold(vec({3.0}), 1.0, {2.0}).minimizer[0] == 1.0);
  CHECK(weighted_soft_threshold(vec({3.0}), 5.0, {0.0}).minimizer[0] == 3.0);
  CHECK_THROWS_AS(weighted_soft_threshold(vec({3.0}), 1.0, {-1.0}), std::invalid_argument);
}

TEST_CASE("scalar and diagonal instances match grid minimization") {
  RandomStream rng(4, stream_id(StreamPurpose::kTest, 3, 3));
  for (int t = 0; t < 40; ++t) {
    const double y = 8.0 * rng.uniform() - 4.0;
    const double tau = 3.0 * rng.uniform();
    const double w = 2.0 * rng.uniform();
    CHECK(std::abs(soft_threshold(vec({y}), tau).minimizer[0] - oracle::scalar_prox_grid(y, tau)) < 1e-3);
    CHECK(std::abs(weighted_soft_threshold(vec({y}), tau, {w}).minimizer[0] - oracle::scalar_prox_grid(y, tau, w)) <
          1e-3);
    CHECK(std::abs(block_soft_threshold(vec({y}), tau, 1).minimizer[0] - oracle::scalar_prox_grid(y, tau)) < 1e-3);
    // A diagonal 2 x 2 matrix with nonnegative entries has those entries as
    // singular values, so the nuclear prox acts entrywise on the diagonal.
    const double a = 4.0 * rng.uniform();
    const double b = 4.0 * rng.uniform();
    const Vector x = singular_value_threshold(vec({a, 0.0, 0.0, b}), 2, tau).minimizer;
    CHECK(std::abs(x[0] - oracle::scalar_prox_grid(a, tau)) < 1e-3);
    CHECK(std::abs(x[3] - oracle::scalar_prox_grid(b, tau)) < 1e-3);
    CHECK(std::abs(x[1]) < 1e-12);
  }
}

TEST_CASE("prox operators are nonexpansive") {
  const std::vector<std::pair<NormSpec, Eigen::Index>> cases{
      {l1(), 20}, {weighted(std::vector<double>(20, 0.5)), 20}, {l12(4), 20}, {nuclear(5), 25}};
  std::uint32_t id = 0;
  for (const auto& [norm, n] : cases) {
    RandomStream rng(5, stream_id(StreamPurpose::kTest, 4, id++));
    for (int t = 0; t < 1000; ++t) {
      const Vector a = random_vector(rng, n, 2.0);
      const Vector b = (t % 2 == 0) ? Vector(a + random_vector(rng, n, 0.1)) : random_vector(rng, n, 2.0);
      const double tau = 2.0 * rng.uniform();
      const double lhs = (prox(norm, a, tau).minimizer - prox(norm, b, tau).minimizer).norm();
      CHECK(lhs <= (a - b).norm() + 1e-12);
      if (norm.kind != NormKind::kWeightedL1) {
        const double radius = 5.0 * rng.uniform();
        CHECK((project_ball(a, norm, radius) - project_ball(b, norm, radius)).norm() <= (a - b).norm() + 1e-12);
      }
    }
  }
}

TEST_CASE("prox commutes with positive scaling") {
  const std::vector<std::pair<NormSpec, Eigen::Index>> cases{
      {l1(), 15}, {weighted(std::vector<double>(15, 1.5)), 15}, {l12(3), 15}, {nuclear(4), 16}};
  std::uint32_t id = 10;
  for (const auto& [norm, n] : cases) {
    RandomStream rng(6, stream_id(StreamPurpose::kTest, 4, id++));
    for (int t = 0; t < 50; ++t) {
      const Vector y = random_vector(rng, n, 2.0);
      const double tau = 2.0 * rng.uniform();
      const double c = 0.1 + 3.0 * rng.uniform();
      const Vector lhs = prox(norm, c * y, c * tau).minimizer;
      const Vector rhs = c * prox(norm, y, tau).minimizer;
      CHECK((lhs - rhs).norm() < 1e-10);
    }
  }
}

TEST_CASE("ball projection examples") {
  const Vector y = vec({3.0, 1.0});
  CHECK((project_ball(y, l1(), 2.0) - vec({2.0, 0.0})).norm() < 1e-14);
  CHECK(project_ball(y, l1(), 10.0) == y);
  const double brute = oracle::grid_zoom_min(
      2, -3.0, 3.0, 1e-3,
      [&](const std::vector<double>& x) { return (x[0] - 3.0) * (x[0] - 3.0) + (x[1] - 1.0) * (x[1] - 1.0); },
      [](const std::vector<double>& x) { return std::abs(x[0]) + std::abs(x[1]) <= 2.0; }, 1e-4);
  CHECK(std::abs(brute - 2.0) < 1e-3);  // squared distance from (3, 1) to (2, 0)

  const Vector diag = project_ball(vec({3.0, 0.0, 0.0, 1.0}), nuclear(2), 2.0);
  CHECK((diag - vec({2.0, 0.0, 0.0, 0.0})).norm() < 1e-12);
  CHECK(project_ball(vec({0.1, 0.2, 0.0, 0.1}), nuclear(2), 5.0) == vec({0.1, 0.2, 0.0, 0.1}));

  const Vector blocks = project_ball(vec({3.0, 4.0, 0.0, 1.0}), l12(2), 4.0);
  CHECK(blocks.segment(0, 2).norm() == doctest::Approx(4.0));
  CHECK(blocks.segment(2, 2).norm() < 1e-14);
  CHECK_THROWS_AS(project_ball(y, weighted({1.0, 1.0}), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(project_ball(y, l1(), -1.0), std::invalid_argument);
}

TEST_CASE("ball projection lands in the ball and beats radial shrinkage") {
  const std::vector<std::pair<NormSpec, Eigen::Index>> cases{{l1(), 30}, {l12(5), 30}, {nuclear(6), 36}};
  std::uint32_t id = 20;
  for (const auto& [norm, n] : cases) {
    RandomStream rng(7, stream_id(StreamPurpose::kTest, 4, id++));
    for (int t = 0; t < 200; ++t) {
      const Vector y = random_vector(rng, n, 2.0);
      const double radius = 10.0 * rng.uniform();
      const Vector p = project_ball(y, norm, radius);
      CHECK(norm_value(norm, p) <= radius + 1e-10);
      const double fy = norm_value(norm, y);
      const Vector radial = fy > radius ? Vector(y * (radius / fy)) : y;
      CHECK((y - p).norm() <= (y - radial).norm() + 1e-12);
    }
  }
}

TEST_CASE("optimality residuals") {
  RandomStream rng(8, stream_id(StreamPurpose::kTest, 5, 0));
  for (int t = 0; t < 20; ++t) {
    const Vector y = random_vector(rng, 30, 2.0);
    const double tau = 0.2 + 2.0 * rng.uniform();
    CHECK(prox_residual(l1(), y, soft_threshold(y, tau).minimizer, tau) <= 1e-10);
    CHECK(prox_residual(l12(3), y, block_soft_threshold(y, tau, 3).minimizer, tau) <= 1e-10);
    const Vector m = random_vector(rng, 36, 2.0);
    CHECK(prox_residual(nuclear(6), m, singular_value_threshold(m, 6, tau).minimizer, tau) <= 1e-8);
  }
  const Vector y = vec({0.5, 2.0});
  CHECK(prox_residual(l1(), y, y, 1.0) > 0.1);
  CHECK_THROWS_AS(prox_residual(l1(), y, vec({1.0}), 1.0), ShapeError);
}
