#include "proxmse/subdiff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "proxmse/errors.hpp"
#include "proxmse/parallel.hpp"
#include "proxmse/rng.hpp"

namespace proxmse {
namespace {

// Above this many cached hinge values, optimal_lambda regenerates samples on
// every objective evaluation instead of holding all profiles in memory.
constexpr std::size_t kProfileCacheLimit = std::size_t{1} << 25;

void check_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
}

void check_dim(const SignalStructure& s, std::span<const double> g) {
  const std::size_t n = ambient_dim(s);
  if (g.size() != n) {
    throw ShapeError("vector of length " + std::to_string(g.size()) + " does not match ambient dimension " +
                     std::to_string(n));
  }
}

void check_samples(const McConfig& mc) {
  if (mc.samples < 2) throw std::invalid_argument("Monte Carlo needs at least 2 samples");
}

template <class Sparseish>
DistanceProfile sparse_profile(const Sparseish& s, std::span<const double> g, const std::vector<double>* w) {
  DistanceProfile p;
  const std::size_t k = s.support.size();
  p.hinge.reserve(s.n - k);
  if (w) p.weight.reserve(s.n - k);
  std::size_t next = 0;
  for (std::size_t i = 0; i < s.n; ++i) {
    const double wi = w ? (*w)[i] : 1.0;
    if (next < k && s.support[next] == i) {
      p.base += g[i] * g[i];
      p.cross += wi * s.signs[next] * g[i];
      p.quad += wi * wi;
      ++next;
    } else {
      p.hinge.push_back(std::abs(g[i]));
      if (w) p.weight.push_back(wi);
    }
  }
  return p;
}

DistanceProfile block_profile(const BlockSparseStructure& s, std::span<const double> g) {
  DistanceProfile p;
  const std::size_t b = s.block_size;
  p.hinge.reserve(s.blocks - s.active.size());
  std::size_t next = 0;
  for (std::size_t blk = 0; blk < s.blocks; ++blk) {
    const Eigen::Map<const Vector> gb(g.data() + blk * b, static_cast<Eigen::Index>(b));
    if (next < s.active.size() && s.active[next] == blk) {
      p.base += gb.squaredNorm();
      p.cross += gb.dot(s.directions[next]);
      p.quad += 1.0;
      ++next;
    } else {
      p.hinge.push_back(gb.norm());
    }
  }
  return p;
}

DistanceProfile low_rank_profile(const LowRankStructure& s, std::span<const double> g) {
  const auto d = static_cast<Eigen::Index>(s.side);
  const Eigen::Map<const Matrix> G(g.data(), d, d);
  DistanceProfile p;
  p.quad = static_cast<double>(s.rank);
  p.cross = (s.U.transpose() * G * s.V).trace();
  const double total = G.squaredNorm();
  if (s.rank < s.side) {
    const Matrix W = s.U_perp.transpose() * G * s.V_perp;
    p.base = total - W.squaredNorm();
    const Vector sv = Eigen::JacobiSVD<Matrix>(W).singularValues();
    p.hinge.assign(sv.begin(), sv.end());
  } else {
    p.base = total;
  }
  return p;
}

}  // namespace

double DistanceProfile::eval(double lambda) const noexcept {
  double acc = base - 2.0 * lambda * cross + lambda * lambda * quad;
  if (weight.empty()) {
    for (double c : hinge) {
      const double h = c - lambda;
      if (h > 0.0) acc += h * h;
    }
  } else {
    for (std::size_t j = 0; j < hinge.size(); ++j) {
      const double h = hinge[j] - lambda * weight[j];
      if (h > 0.0) acc += h * h;
    }
  }
  return std::max(acc, 0.0);
}

double DistanceProfile::search_upper() const noexcept {
  double hi = quad > 0.0 ? std::max(cross / quad, 0.0) : 0.0;
  if (weight.empty()) {
    for (double c : hinge) hi = std::max(hi, c);
  } else {
    for (std::size_t j = 0; j < hinge.size(); ++j) {
      if (weight[j] > 0.0) hi = std::max(hi, hinge[j] / weight[j]);
    }
  }
  return hi;
}

DistanceProfile distance_profile(const SignalStructure& s, std::span<const double> g) {
  check_dim(s, g);
  return std::visit(
      [&](const auto& x) -> DistanceProfile {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SparseStructure>) {
          return sparse_profile(x, g, nullptr);
        } else if constexpr (std::is_same_v<T, WeightedSparseStructure>) {
          return sparse_profile(x, g, &x.coord_weights);
        } else if constexpr (std::is_same_v<T, BlockSparseStructure>) {
          return block_profile(x, g);
        } else {
          return low_rank_profile(x, g);
        }
      },
      s);
}

double dist_sq_scaled_subdiff(const SignalStructure& s, std::span<const double> g, double lambda) {
  check_lambda(lambda);
  return distance_profile(s, g).eval(lambda);
}

Vector project_scaled_subdiff(const SignalStructure& s, std::span<const double> g, double lambda) {
  check_lambda(lambda);
  check_dim(s, g);
  const Eigen::Map<const Vector> gv(g.data(), static_cast<Eigen::Index>(g.size()));
  return std::visit(
      [&](const auto& x) -> Vector {
        using T = std::decay_t<decltype(x)>;
        Vector p(gv.size());
        if constexpr (std::is_same_v<T, SparseStructure> || std::is_same_v<T, WeightedSparseStructure>) {
          auto weight = [&](std::size_t i) {
            if constexpr (std::is_same_v<T, WeightedSparseStructure>) {
              return x.coord_weights[i];
            } else {
              (void)i;
              return 1.0;
            }
          };
          for (std::size_t i = 0; i < x.n; ++i) {
            const double bound = lambda * weight(i);
            p[static_cast<Eigen::Index>(i)] = std::clamp(g[i], -bound, bound);
          }
          for (std::size_t j = 0; j < x.support.size(); ++j) {
            const std::size_t i = x.support[j];
            p[static_cast<Eigen::Index>(i)] = lambda * weight(i) * x.signs[j];
          }
        } else if constexpr (std::is_same_v<T, BlockSparseStructure>) {
          const auto b = static_cast<Eigen::Index>(x.block_size);
          std::size_t next = 0;
          for (std::size_t blk = 0; blk < x.blocks; ++blk) {
            const auto off = static_cast<Eigen::Index>(blk) * b;
            if (next < x.active.size() && x.active[next] == blk) {
              p.segment(off, b) = lambda * x.directions[next];
              ++next;
            } else {
              const double nrm = gv.segment(off, b).norm();
              const double scale = nrm > lambda ? lambda / nrm : 1.0;
              p.segment(off, b) = scale * gv.segment(off, b);
            }
          }
        } else {
          const auto d = static_cast<Eigen::Index>(x.side);
          const Eigen::Map<const Matrix> G(g.data(), d, d);
          Matrix P = lambda * x.U * x.V.transpose();
          if (x.rank < x.side) {
            const Matrix W = x.U_perp.transpose() * G * x.V_perp;
            Eigen::JacobiSVD<Matrix> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const Vector clipped = svd.singularValues().cwiseMin(lambda);
            P += x.U_perp * (svd.matrixU() * clipped.asDiagonal() * svd.matrixV().transpose()) *
                 x.V_perp.transpose();
          }
          p = P.reshaped();
        }
        return p;
      },
      s);
}

std::vector<MsdEstimate> msd_lambda_grid(const SignalStructure& s, std::span<const double> lambdas,
                                         const McConfig& mc) {
  check_samples(mc);
  for (double l : lambdas) check_lambda(l);
  const std::size_t n = ambient_dim(s);
  const std::size_t L = lambdas.size();
  std::vector<double> values(mc.samples * L);
  for_each_index(mc.samples, mc.exec, [&](std::size_t i) {
    RandomStream rng(mc.seed, stream_id(StreamPurpose::kMsd, 0, static_cast<std::uint32_t>(i)));
    std::vector<double> g(n);
    rng.fill_normal(g);
    const DistanceProfile profile = distance_profile(s, g);
    for (std::size_t j = 0; j < L; ++j) values[i * L + j] = profile.eval(lambdas[j]);
  });
  std::vector<MsdEstimate> out;
  out.reserve(L);
  for (std::size_t j = 0; j < L; ++j) {
    MeanAccumulator acc;
    for (std::size_t i = 0; i < mc.samples; ++i) acc.add(values[i * L + j]);
    out.push_back(MsdEstimate::from(acc, lambdas[j]));
  }
  return out;
}

MsdEstimate msd_lambda(const SignalStructure& s, double lambda, const McConfig& mc) {
  const double grid[] = {lambda};
  return msd_lambda_grid(s, grid, mc).front();
}

double l1_offsupport_msd(double lambda) {
  const double tail = 0.5 * std::erfc(lambda / std::numbers::sqrt2);
  const double density = std::exp(-0.5 * lambda * lambda) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(2.0 * ((1.0 + lambda * lambda) * tail - lambda * density), 0.0);
}

double msd_lambda_exact_l1(std::size_t n, std::size_t k, double lambda) {
  if (k == 0 || k > n) throw InvalidStructure("exact l1 MSD needs 1 <= k <= n");
  check_lambda(lambda);
  return static_cast<double>(k) * (1.0 + lambda * lambda) + static_cast<double>(n - k) * l1_offsupport_msd(lambda);
}

double cone_dist_sq(const DistanceProfile& profile, const ScalarMinConfig& opt, std::size_t sample_index) {
  const auto res = golden_section_minimize([&](double l) { return profile.eval(l); }, 0.0,
                                           profile.search_upper(), opt);
  if (!res.converged) throw NumericalError("scalar search over lambda did not converge", sample_index);
  return res.value;
}

MsdEstimate msd_cone(const SignalStructure& s, const McConfig& mc, const ScalarMinConfig& opt) {
  check_samples(mc);
  const std::size_t n = ambient_dim(s);
  std::vector<double> values(mc.samples);
  for_each_index(mc.samples, mc.exec, [&](std::size_t i) {
    RandomStream rng(mc.seed, stream_id(StreamPurpose::kMsd, 0, static_cast<std::uint32_t>(i)));
    std::vector<double> g(n);
    rng.fill_normal(g);
    values[i] = cone_dist_sq(distance_profile(s, g), opt, i);
  });
  return MsdEstimate::from(accumulate(values));
}

OptimalLambda optimal_lambda(const SignalStructure& s, const McConfig& mc, const ScalarMinConfig& opt) {
  check_samples(mc);
  const std::size_t n = ambient_dim(s);
  auto make_profile = [&](std::size_t i) {
    RandomStream rng(mc.seed, stream_id(StreamPurpose::kMsd, 0, static_cast<std::uint32_t>(i)));
    std::vector<double> g(n);
    rng.fill_normal(g);
    return distance_profile(s, g);
  };

  const std::size_t hinge_count = n - std::min(n, degrees_of_freedom(s));
  const bool cache = mc.samples * std::max<std::size_t>(hinge_count, 1) <= kProfileCacheLimit;
  std::vector<DistanceProfile> profiles;
  std::vector<double> uppers(mc.samples);
  if (cache) {
    profiles.resize(mc.samples);
    for_each_index(mc.samples, mc.exec, [&](std::size_t i) {
      profiles[i] = make_profile(i);
      uppers[i] = profiles[i].search_upper();
    });
  } else {
    for_each_index(mc.samples, mc.exec, [&](std::size_t i) { uppers[i] = make_profile(i).search_upper(); });
  }

  std::vector<double> values(mc.samples);
  auto fill_values = [&](double lambda) {
    for_each_index(mc.samples, mc.exec, [&](std::size_t i) {
      values[i] = cache ? profiles[i].eval(lambda) : make_profile(i).eval(lambda);
    });
  };
  auto average = [&](double lambda) {
    fill_values(lambda);
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(mc.samples);
  };

  const double hi = *std::max_element(uppers.begin(), uppers.end());
  const auto res = golden_section_minimize(average, 0.0, hi, opt);
  if (!res.converged) throw NumericalError("scalar search for the optimal lambda did not converge");
  fill_values(res.x);
  return {res.x, MsdEstimate::from(accumulate(values), res.x)};
}

GeometryConstants geometry_constants(const SignalStructure& s) {
  GeometryConstants gc;
  gc.dof = degrees_of_freedom(s);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SparseStructure>) {
          gc.R = std::sqrt(static_cast<double>(x.n));
          gc.f_max = std::sqrt(static_cast<double>(x.support.size()));
        } else if constexpr (std::is_same_v<T, WeightedSparseStructure>) {
          double all = 0.0;
          double on = 0.0;
          for (double w : x.coord_weights) all += w * w;
          for (std::size_t i : x.support) on += x.coord_weights[i] * x.coord_weights[i];
          gc.R = std::sqrt(all);
          gc.f_max = std::sqrt(on);
        } else if constexpr (std::is_same_v<T, BlockSparseStructure>) {
          gc.R = std::sqrt(static_cast<double>(x.blocks));
          gc.f_max = std::sqrt(static_cast<double>(x.active.size()));
        } else {
          gc.R = std::sqrt(static_cast<double>(x.side));
          gc.f_max = std::sqrt(static_cast<double>(x.rank));
        }
      },
      s);
  if (!(gc.f_max > 0.0)) throw InvalidStructure("geometry constants need a nonzero penalized signal");
  gc.L = 1.0 / gc.f_max;
  return gc;
}

double table1_threshold(const SignalStructure& s) {
  return std::visit(
      [](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SparseStructure>) {
          return std::sqrt(2.0 * std::log(static_cast<double>(x.n) / static_cast<double>(x.support.size())));
        } else if constexpr (std::is_same_v<T, BlockSparseStructure>) {
          return std::sqrt(static_cast<double>(x.block_size)) +
                 std::sqrt(2.0 * std::log(static_cast<double>(x.blocks) / static_cast<double>(x.active.size())));
        } else if constexpr (std::is_same_v<T, LowRankStructure>) {
          return 2.0 * std::sqrt(static_cast<double>(x.side));
        } else {
          throw InvalidStructure("no closed-form bound for weighted l1");
        }
      },
      s);
}

double table1_bound(const SignalStructure& s, double lambda) {
  const double threshold = table1_threshold(s);
  if (lambda < threshold * (1.0 - 1e-12)) {
    throw BoundNotValid("lambda " + std::to_string(lambda) + " is below the validity threshold " +
                            std::to_string(threshold),
                        threshold);
  }
  const double l2 = lambda * lambda;
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SparseStructure>) {
          return (l2 + 3.0) * static_cast<double>(x.support.size());
        } else if constexpr (std::is_same_v<T, BlockSparseStructure>) {
          return (l2 + static_cast<double>(x.block_size) + 2.0) * static_cast<double>(x.active.size());
        } else if constexpr (std::is_same_v<T, LowRankStructure>) {
          const double d = static_cast<double>(x.side);
          return (l2 + 2.0 * d) * static_cast<double>(x.rank) + 2.0 * d;
        } else {
          throw InvalidStructure("no closed-form bound for weighted l1");
        }
      },
      s);
}

double lipschitz_upper_bound(const SignalStructure& s, double cone_msd) {
  if (!(cone_msd >= 0.0)) throw std::invalid_argument("cone MSD must be nonnegative");
  const auto gc = geometry_constants(s);
  const double rl = gc.R * gc.L;
  return cone_msd + 2.0 * std::numbers::pi * (rl * rl + rl * std::sqrt(cone_msd) + 1.0);
}

double sandwich_gap(const SignalStructure& s) {
  const auto gc = geometry_constants(s);
  return 2.0 * gc.R / gc.f_max;
}

MsdEstimate msd_orthant(std::size_t n, bool polar, const McConfig& mc) {
  check_samples(mc);
  std::vector<double> values(mc.samples);
  for_each_index(mc.samples, mc.exec, [&](std::size_t i) {
    RandomStream rng(mc.seed, stream_id(StreamPurpose::kMsd, polar ? 2 : 1, static_cast<std::uint32_t>(i)));
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double g = rng.normal();
      const double outside = polar ? std::max(g, 0.0) : std::min(g, 0.0);
      acc += outside * outside;
    }
    values[i] = acc;
  });
  return MsdEstimate::from(accumulate(values));
}

}  // namespace proxmse
