#include "proxmse/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "proxmse/errors.hpp"

namespace proxmse {
namespace {

constexpr double kOrthoTol = 1e-10;

std::vector<std::size_t> choose_subset(std::size_t n, std::size_t k, RandomStream& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

double draw_magnitude(MagnitudeLaw law, RandomStream& rng) {
  return law == MagnitudeLaw::kUnit ? 1.0 : rng.uniform(1.0, 2.0);
}

Matrix complement_basis(const Matrix& Q) {
  const auto d = Q.rows();
  const auto r = Q.cols();
  if (r == 0) return Matrix::Identity(d, d);
  Eigen::HouseholderQR<Matrix> qr(Q);
  const Matrix full = qr.householderQ();
  return full.rightCols(d - r);
}

const char* kind_name(SignalKind kind) {
  switch (kind) {
    case SignalKind::kSparse: return "sparse";
    case SignalKind::kWeightedSparse: return "weighted_sparse";
    case SignalKind::kBlockSparse: return "block_sparse";
    case SignalKind::kLowRank: return "low_rank";
  }
  return "unknown";
}

SignalKind kind_from_name(const std::string& name) {
  if (name == "sparse") return SignalKind::kSparse;
  if (name == "weighted_sparse" || name == "weighted") return SignalKind::kWeightedSparse;
  if (name == "block_sparse" || name == "block") return SignalKind::kBlockSparse;
  if (name == "low_rank" || name == "lowrank") return SignalKind::kLowRank;
  throw InvalidStructure("unknown signal kind '" + name + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

std::size_t parse_count(const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw InvalidStructure("expected a count, got '" + s + "'");
  }
  if (pos != s.size() || v < 0) throw InvalidStructure("expected a count, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

double parse_real(const std::string& s) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InvalidStructure("expected a number, got '" + s + "'");
  }
  if (pos != s.size()) throw InvalidStructure("expected a number, got '" + s + "'");
  return v;
}

std::vector<std::size_t> equal_regions(std::size_t n, std::size_t count) {
  if (count == 0 || count > n) throw InvalidStructure("region count must be in [1, n]");
  std::vector<std::size_t> sizes(count, n / count);
  sizes.back() += n % count;
  return sizes;
}

}  // namespace

LowRankStructure LowRankStructure::from_factors(Matrix U, Matrix V) {
  if (U.rows() != V.rows() || U.cols() != V.cols()) throw ShapeError("U and V must have equal shapes");
  LowRankStructure s;
  s.side = static_cast<std::size_t>(U.rows());
  s.rank = static_cast<std::size_t>(U.cols());
  s.U_perp = complement_basis(U);
  s.V_perp = complement_basis(V);
  s.U = std::move(U);
  s.V = std::move(V);
  return s;
}

// ---- recipes ---------------------------------------------------------------

void to_json(nlohmann::json& j, const SignalRecipe& r) {
  j = nlohmann::json{{"kind", kind_name(r.kind)}};
  switch (r.kind) {
    case SignalKind::kSparse:
      j["n"] = r.n;
      j["k"] = r.k;
      break;
    case SignalKind::kWeightedSparse:
      j["n"] = r.n;
      j["k"] = r.k;
      j["region_sizes"] = r.region_sizes;
      j["weights"] = r.region_weights;
      break;
    case SignalKind::kBlockSparse:
      j["t"] = r.t;
      j["b"] = r.b;
      j["k"] = r.k;
      break;
    case SignalKind::kLowRank:
      j["d"] = r.d;
      j["r"] = r.r;
      break;
  }
  j["seed"] = r.seed;
  if (r.kind == SignalKind::kSparse || r.kind == SignalKind::kWeightedSparse) {
    j["magnitude"] = r.magnitude == MagnitudeLaw::kUnit ? "unit" : "uniform12";
  }
  if (r.kind == SignalKind::kSparse) j["signs"] = r.signs == SignLaw::kPositive ? "positive" : "random";
}

void from_json(const nlohmann::json& j, SignalRecipe& r) {
  r = SignalRecipe{};
  r.kind = kind_from_name(j.at("kind").get<std::string>());
  switch (r.kind) {
    case SignalKind::kSparse:
      r.n = j.at("n").get<std::size_t>();
      r.k = j.at("k").get<std::size_t>();
      break;
    case SignalKind::kWeightedSparse:
      r.n = j.at("n").get<std::size_t>();
      r.k = j.at("k").get<std::size_t>();
      r.region_weights = j.at("weights").get<std::vector<double>>();
      r.region_sizes = j.contains("region_sizes") ? j.at("region_sizes").get<std::vector<std::size_t>>()
                                                  : equal_regions(r.n, r.region_weights.size());
      break;
    case SignalKind::kBlockSparse:
      r.t = j.at("t").get<std::size_t>();
      r.b = j.at("b").get<std::size_t>();
      r.k = j.at("k").get<std::size_t>();
      break;
    case SignalKind::kLowRank:
      r.d = j.at("d").get<std::size_t>();
      r.r = j.at("r").get<std::size_t>();
      break;
  }
  if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("magnitude")) {
    const auto m = j.at("magnitude").get<std::string>();
    if (m == "unit") {
      r.magnitude = MagnitudeLaw::kUnit;
    } else if (m == "uniform12") {
      r.magnitude = MagnitudeLaw::kUniform12;
    } else {
      throw InvalidStructure("unknown magnitude law '" + m + "'");
    }
  }
  if (j.contains("signs")) {
    const auto s = j.at("signs").get<std::string>();
    if (s == "positive") {
      r.signs = SignLaw::kPositive;
    } else if (s == "random") {
      r.signs = SignLaw::kRandom;
    } else {
      throw InvalidStructure("unknown sign law '" + s + "'");
    }
  }
}

SignalRecipe parse_signal_descriptor(const std::string& text, std::uint64_t default_seed) {
  if (!text.empty() && text.front() == '{') {
    SignalRecipe r;
    try {
      auto j = nlohmann::json::parse(text);
      if (!j.contains("seed")) j["seed"] = default_seed;
      r = j.get<SignalRecipe>();
    } catch (const nlohmann::json::exception& e) {
      throw InvalidStructure(std::string("bad structure JSON: ") + e.what());
    }
    return r;
  }
  const auto parts = split(text, ':');
  if (parts.empty()) throw InvalidStructure("empty structure descriptor");
  SignalRecipe r;
  r.seed = default_seed;
  std::string head = parts[0];
  if (head == "sparse+") {
    head = "sparse";
    r.signs = SignLaw::kPositive;
  }
  r.kind = kind_from_name(head);
  auto expect = [&](std::size_t count) {
    if (parts.size() != count) throw InvalidStructure("malformed structure descriptor '" + text + "'");
  };
  switch (r.kind) {
    case SignalKind::kSparse:
      expect(3);
      r.n = parse_count(parts[1]);
      r.k = parse_count(parts[2]);
      break;
    case SignalKind::kWeightedSparse: {
      expect(4);
      r.n = parse_count(parts[1]);
      r.k = parse_count(parts[2]);
      for (const auto& w : split(parts[3], ',')) r.region_weights.push_back(parse_real(w));
      r.region_sizes = equal_regions(r.n, r.region_weights.size());
      break;
    }
    case SignalKind::kBlockSparse:
      expect(4);
      r.t = parse_count(parts[1]);
      r.b = parse_count(parts[2]);
      r.k = parse_count(parts[3]);
      break;
    case SignalKind::kLowRank:
      expect(3);
      r.d = parse_count(parts[1]);
      r.r = parse_count(parts[2]);
      break;
  }
  return r;
}

std::string label(const SignalRecipe& r) {
  std::ostringstream out;
  switch (r.kind) {
    case SignalKind::kSparse:
      out << (r.signs == SignLaw::kPositive ? "sparse+" : "sparse") << ':' << r.n << ':' << r.k;
      break;
    case SignalKind::kWeightedSparse:
      out << "weighted:" << r.n << ':' << r.k;
      break;
    case SignalKind::kBlockSparse:
      out << "block:" << r.t << ':' << r.b << ':' << r.k;
      break;
    case SignalKind::kLowRank:
      out << "lowrank:" << r.d << ':' << r.r;
      break;
  }
  return out.str();
}

// ---- constructors ------------------------------------------------------------

SignalInstance make_sparse(std::size_t n, std::size_t k, MagnitudeLaw law, std::uint64_t seed, SignLaw sign_law) {
  if (k == 0 || k > n) throw InvalidStructure("sparse signal needs 1 <= k <= n");
  RandomStream rng(seed, stream_id(StreamPurpose::kSignal, 0, 0));
  SparseStructure s;
  s.n = n;
  s.support = choose_subset(n, k, rng);
  Vector values = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t idx : s.support) {
    const double sign = sign_law == SignLaw::kPositive ? 1.0 : rng.sign();
    s.signs.push_back(sign);
    values[static_cast<Eigen::Index>(idx)] = sign * draw_magnitude(law, rng);
  }
  SignalRecipe recipe;
  recipe.kind = SignalKind::kSparse;
  recipe.n = n;
  recipe.k = k;
  recipe.seed = seed;
  recipe.magnitude = law;
  recipe.signs = sign_law;
  return {recipe, std::move(s), std::move(values)};
}

SignalInstance make_weighted_sparse(std::size_t n, std::size_t k, const std::vector<std::size_t>& region_sizes,
                                    const std::vector<double>& region_weights, MagnitudeLaw law,
                                    std::uint64_t seed) {
  if (region_sizes.size() != region_weights.size() || region_sizes.empty()) {
    throw InvalidStructure("weighted sparse signal needs one weight per region");
  }
  if (std::accumulate(region_sizes.begin(), region_sizes.end(), std::size_t{0}) != n) {
    throw InvalidStructure("region sizes must sum to n");
  }
  for (double w : region_weights) {
    if (!(w >= 0.0)) throw InvalidStructure("region weights must be nonnegative");
  }
  auto base = make_sparse(n, k, law, seed);
  auto& sparse = std::get<SparseStructure>(base.structure);
  WeightedSparseStructure s;
  s.n = n;
  s.support = std::move(sparse.support);
  s.signs = std::move(sparse.signs);
  s.coord_weights.reserve(n);
  for (std::size_t region = 0; region < region_sizes.size(); ++region) {
    s.coord_weights.insert(s.coord_weights.end(), region_sizes[region], region_weights[region]);
  }
  base.recipe.kind = SignalKind::kWeightedSparse;
  base.recipe.region_sizes = region_sizes;
  base.recipe.region_weights = region_weights;
  base.structure = std::move(s);
  return base;
}

SignalInstance make_block_sparse(std::size_t t, std::size_t b, std::size_t k, std::uint64_t seed) {
  if (b == 0 || k == 0 || k > t) throw InvalidStructure("block sparse signal needs 1 <= k <= t and b >= 1");
  RandomStream rng(seed, stream_id(StreamPurpose::kSignal, 2, 0));
  BlockSparseStructure s;
  s.blocks = t;
  s.block_size = b;
  s.active = choose_subset(t, k, rng);
  Vector values = Vector::Zero(static_cast<Eigen::Index>(t * b));
  const auto bs = static_cast<Eigen::Index>(b);
  for (std::size_t blk : s.active) {
    Vector dir(bs);
    double norm = 0.0;
    do {
      rng.fill_normal(dir);
      norm = dir.norm();
    } while (norm == 0.0);
    dir /= norm;
    values.segment(static_cast<Eigen::Index>(blk) * bs, bs) = rng.uniform(1.0, 2.0) * dir;
    s.directions.push_back(std::move(dir));
  }
  SignalRecipe recipe;
  recipe.kind = SignalKind::kBlockSparse;
  recipe.t = t;
  recipe.b = b;
  recipe.k = k;
  recipe.seed = seed;
  return {recipe, std::move(s), std::move(values)};
}

Matrix haar_orthonormal(std::size_t rows, std::size_t cols, RandomStream& rng) {
  if (cols > rows) throw ShapeError("haar_orthonormal needs cols <= rows");
  const auto m = static_cast<Eigen::Index>(rows);
  const auto c = static_cast<Eigen::Index>(cols);
  Matrix gauss(m, c);
  rng.fill_normal(gauss.reshaped());
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix Q = qr.householderQ() * Matrix::Identity(m, c);
  const auto& R = qr.matrixQR();
  for (Eigen::Index j = 0; j < c; ++j) {
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  }
  return Q;
}

SignalInstance make_low_rank(std::size_t d, std::size_t r, std::uint64_t seed) {
  if (r == 0 || r > d) throw InvalidStructure("low rank signal needs 1 <= r <= d");
  RandomStream left(seed, stream_id(StreamPurpose::kSubspace, 0, 0));
  RandomStream right(seed, stream_id(StreamPurpose::kSubspace, 0, 1));
  RandomStream mags(seed, stream_id(StreamPurpose::kSignal, 3, 0));
  Matrix U = haar_orthonormal(d, r, left);
  Matrix V = haar_orthonormal(d, r, right);
  Vector sv(static_cast<Eigen::Index>(r));
  for (auto& x : sv) x = mags.uniform(1.0, 2.0);
  std::sort(sv.begin(), sv.end(), std::greater<>());
  const Matrix X = U * sv.asDiagonal() * V.transpose();
  Vector values = X.reshaped();
  SignalRecipe recipe;
  recipe.kind = SignalKind::kLowRank;
  recipe.d = d;
  recipe.r = r;
  recipe.seed = seed;
  return {recipe, LowRankStructure::from_factors(std::move(U), std::move(V)), std::move(values)};
}

SignalInstance make_signal(const SignalRecipe& r) {
  switch (r.kind) {
    case SignalKind::kSparse: return make_sparse(r.n, r.k, r.magnitude, r.seed, r.signs);
    case SignalKind::kWeightedSparse:
      return make_weighted_sparse(r.n, r.k, r.region_sizes, r.region_weights, r.magnitude, r.seed);
    case SignalKind::kBlockSparse: return make_block_sparse(r.t, r.b, r.k, r.seed);
    case SignalKind::kLowRank: return make_low_rank(r.d, r.r, r.seed);
  }
  throw InvalidStructure("unknown signal kind");
}

// ---- descriptors ---------------------------------------------------------------

std::size_t ambient_dim(const SignalStructure& s) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BlockSparseStructure>) {
          return x.blocks * x.block_size;
        } else if constexpr (std::is_same_v<T, LowRankStructure>) {
          return x.side * x.side;
        } else {
          return x.n;
        }
      },
      s);
}

std::size_t degrees_of_freedom(const SignalStructure& s) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BlockSparseStructure>) {
          return x.block_size * x.active.size();
        } else if constexpr (std::is_same_v<T, LowRankStructure>) {
          return x.rank * (2 * x.side - x.rank);
        } else {
          return x.support.size();
        }
      },
      s);
}

double min_nonzero_magnitude(const SignalInstance& inst) {
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        double m = std::numeric_limits<double>::infinity();
        if constexpr (std::is_same_v<T, BlockSparseStructure>) {
          const auto bs = static_cast<Eigen::Index>(x.block_size);
          for (std::size_t blk : x.active) {
            m = std::min(m, inst.values.segment(static_cast<Eigen::Index>(blk) * bs, bs).norm());
          }
        } else if constexpr (std::is_same_v<T, LowRankStructure>) {
          const auto d = static_cast<Eigen::Index>(x.side);
          const Eigen::Map<const Matrix> X(inst.values.data(), d, d);
          const Vector sv = Eigen::JacobiSVD<Matrix>(X).singularValues();
          m = sv[static_cast<Eigen::Index>(x.rank) - 1];
        } else {
          for (std::size_t i : x.support) m = std::min(m, std::abs(inst.values[static_cast<Eigen::Index>(i)]));
        }
        return m;
      },
      inst.structure);
}

void validate(const SignalStructure& s) {
  std::visit(
      [](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BlockSparseStructure>) {
          if (x.active.size() != x.directions.size()) throw InvalidStructure("one direction per active block");
          for (std::size_t i = 0; i < x.active.size(); ++i) {
            if (x.active[i] >= x.blocks) throw InvalidStructure("active block out of range");
            if (static_cast<std::size_t>(x.directions[i].size()) != x.block_size) {
              throw InvalidStructure("direction length must equal block size");
            }
            if (std::abs(x.directions[i].norm() - 1.0) > kOrthoTol) {
              throw InvalidStructure("block directions must have unit norm");
            }
          }
        } else if constexpr (std::is_same_v<T, LowRankStructure>) {
          const auto r = static_cast<Eigen::Index>(x.rank);
          const Matrix I = Matrix::Identity(r, r);
          if ((x.U.transpose() * x.U - I).cwiseAbs().maxCoeff() > kOrthoTol ||
              (x.V.transpose() * x.V - I).cwiseAbs().maxCoeff() > kOrthoTol) {
            throw InvalidStructure("low rank factors must be orthonormal");
          }
        } else {
          if (x.support.size() > x.n) throw InvalidStructure("support larger than n");
          if (x.signs.size() != x.support.size()) throw InvalidStructure("one sign per support entry");
          for (std::size_t i = 0; i < x.support.size(); ++i) {
            if (x.support[i] >= x.n) throw InvalidStructure("support index out of range");
            if (i > 0 && x.support[i] <= x.support[i - 1]) throw InvalidStructure("support must be sorted");
            if (x.signs[i] != 1.0 && x.signs[i] != -1.0) throw InvalidStructure("signs must be +-1");
          }
          if constexpr (std::is_same_v<T, WeightedSparseStructure>) {
            if (x.coord_weights.size() != x.n) throw InvalidStructure("one weight per coordinate");
          }
        }
      },
      s);
}

// ---- norms ----------------------------------------------------------------------

NormSpec norm_of(const SignalStructure& s) {
  return std::visit(
      [](const auto& x) -> NormSpec {
        using T = std::decay_t<decltype(x)>;
        NormSpec spec;
        if constexpr (std::is_same_v<T, SparseStructure>) {
          spec.kind = NormKind::kL1;
        } else if constexpr (std::is_same_v<T, WeightedSparseStructure>) {
          spec.kind = NormKind::kWeightedL1;
          spec.weights = x.coord_weights;
        } else if constexpr (std::is_same_v<T, BlockSparseStructure>) {
          spec.kind = NormKind::kL12;
          spec.block_size = x.block_size;
        } else {
          spec.kind = NormKind::kNuclear;
          spec.side = x.side;
        }
        return spec;
      },
      s);
}

double norm_value(const NormSpec& norm, const Vector& x) {
  switch (norm.kind) {
    case NormKind::kL1: return x.lpNorm<1>();
    case NormKind::kWeightedL1: {
      if (norm.weights.size() != static_cast<std::size_t>(x.size())) throw ShapeError("weight length mismatch");
      double acc = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) acc += norm.weights[static_cast<std::size_t>(i)] * std::abs(x[i]);
      return acc;
    }
    case NormKind::kL12: {
      const auto b = static_cast<Eigen::Index>(norm.block_size);
      if (b == 0 || x.size() % b != 0) throw ShapeError("length not divisible by block size");
      double acc = 0.0;
      for (Eigen::Index i = 0; i < x.size(); i += b) acc += x.segment(i, b).norm();
      return acc;
    }
    case NormKind::kNuclear: {
      const auto d = static_cast<Eigen::Index>(norm.side);
      if (d * d != x.size()) throw ShapeError("vector is not a flattened side x side matrix");
      const Eigen::Map<const Matrix> X(x.data(), d, d);
      return Eigen::JacobiSVD<Matrix>(X).singularValues().sum();
    }
  }
  return 0.0;
}

SignalStructure structure_at(const NormSpec& norm, const Vector& x, double tol) {
  switch (norm.kind) {
    case NormKind::kL1:
    case NormKind::kWeightedL1: {
      std::vector<std::size_t> support;
      std::vector<double> signs;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) > tol) {
          support.push_back(static_cast<std::size_t>(i));
          signs.push_back(x[i] > 0 ? 1.0 : -1.0);
        }
      }
      const auto n = static_cast<std::size_t>(x.size());
      if (norm.kind == NormKind::kL1) return SparseStructure{n, std::move(support), std::move(signs)};
      if (norm.weights.size() != n) throw ShapeError("weight length mismatch");
      return WeightedSparseStructure{n, std::move(support), std::move(signs), norm.weights};
    }
    case NormKind::kL12: {
      const auto b = static_cast<Eigen::Index>(norm.block_size);
      if (b == 0 || x.size() % b != 0) throw ShapeError("length not divisible by block size");
      BlockSparseStructure s;
      s.block_size = norm.block_size;
      s.blocks = static_cast<std::size_t>(x.size() / b);
      for (std::size_t blk = 0; blk < s.blocks; ++blk) {
        const auto seg = x.segment(static_cast<Eigen::Index>(blk) * b, b);
        const double nrm = seg.norm();
        if (nrm > tol) {
          s.active.push_back(blk);
          s.directions.emplace_back(seg / nrm);
        }
      }
      return s;
    }
    case NormKind::kNuclear: {
      const auto d = static_cast<Eigen::Index>(norm.side);
      if (d * d != x.size()) throw ShapeError("vector is not a flattened side x side matrix");
      const Eigen::Map<const Matrix> X(x.data(), d, d);
      Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::Index rank = 0;
      while (rank < d && svd.singularValues()[rank] > tol) ++rank;
      return LowRankStructure::from_factors(svd.matrixU().leftCols(rank), svd.matrixV().leftCols(rank));
    }
  }
  throw InvalidStructure("unknown norm");
}

}  // namespace proxmse
