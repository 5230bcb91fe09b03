#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "proxmse/rng.hpp"

namespace proxmse {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class MagnitudeLaw { kUnit, kUniform12 };
enum class SignLaw { kRandom, kPositive };

// Geometric descriptors. Subdifferentials depend only on these, never on the
// magnitudes of x0.

struct SparseStructure {
  std::size_t n = 0;
  std::vector<std::size_t> support;  // sorted ascending
  std::vector<double> signs;         // +-1, aligned with support
};

/// Weighted l1: f(x) = sum_i w_i |x_i| with one weight per region.
struct WeightedSparseStructure {
  std::size_t n = 0;
  std::vector<std::size_t> support;
  std::vector<double> signs;
  std::vector<double> coord_weights;  // length n, expanded from the region weights
};

struct BlockSparseStructure {
  std::size_t blocks = 0;
  std::size_t block_size = 0;
  std::vector<std::size_t> active;  // sorted ascending
  std::vector<Vector> directions;   // unit norm, aligned with active
};

/// Rank-r d x d matrix with orthonormal factors. The complements are cached
/// since every distance evaluation needs them.
struct LowRankStructure {
  std::size_t side = 0;
  std::size_t rank = 0;
  Matrix U, V;
  Matrix U_perp, V_perp;

  static LowRankStructure from_factors(Matrix U, Matrix V);
};

using SignalStructure =
    std::variant<SparseStructure, WeightedSparseStructure, BlockSparseStructure, LowRankStructure>;

enum class SignalKind { kSparse, kWeightedSparse, kBlockSparse, kLowRank };

/// Serializable recipe for a signal. make_signal(recipe) is deterministic.
struct SignalRecipe {
  SignalKind kind = SignalKind::kSparse;
  std::size_t n = 0, k = 0;  // sparse, weighted sparse; k is also the active block count
  std::size_t t = 0, b = 0;  // block sparse
  std::size_t d = 0, r = 0;  // low rank
  std::uint64_t seed = 1;
  MagnitudeLaw magnitude = MagnitudeLaw::kUniform12;
  SignLaw signs = SignLaw::kRandom;
  std::vector<std::size_t> region_sizes;
  std::vector<double> region_weights;
};

void to_json(nlohmann::json& j, const SignalRecipe& r);
void from_json(const nlohmann::json& j, SignalRecipe& r);

/// Parses either a JSON descriptor or the shorthand forms
///   sparse:N:K  block:T:B:K  lowrank:D:R  weighted:N:K:W1,W2,...
/// Shorthand forms take `default_seed`; JSON may carry its own "seed".
/// Throws InvalidStructure on malformed input.
SignalRecipe parse_signal_descriptor(const std::string& text, std::uint64_t default_seed);

/// Short label used in result files, e.g. "sparse:500:20".
std::string label(const SignalRecipe& r);

struct SignalInstance {
  SignalRecipe recipe;
  SignalStructure structure;
  Vector values;  // length n, or d*d column-major for low rank
};

SignalInstance make_sparse(std::size_t n, std::size_t k, MagnitudeLaw law, std::uint64_t seed,
                           SignLaw signs = SignLaw::kRandom);
SignalInstance make_weighted_sparse(std::size_t n, std::size_t k, const std::vector<std::size_t>& region_sizes,
                                    const std::vector<double>& region_weights, MagnitudeLaw law,
                                    std::uint64_t seed);
SignalInstance make_block_sparse(std::size_t t, std::size_t b, std::size_t k, std::uint64_t seed);
SignalInstance make_low_rank(std::size_t d, std::size_t r, std::uint64_t seed);
SignalInstance make_signal(const SignalRecipe& recipe);

/// Haar-distributed rows x cols matrix with orthonormal columns: QR of an
/// i.i.d. Gaussian matrix with R's diagonal made positive.
Matrix haar_orthonormal(std::size_t rows, std::size_t cols, RandomStream& rng);

std::size_t ambient_dim(const SignalStructure& s);
std::size_t degrees_of_freedom(const SignalStructure& s);

/// Smallest nonzero structural magnitude: entry (sparse), block norm (block
/// sparse) or singular value (low rank).
double min_nonzero_magnitude(const SignalInstance& inst);

/// Checks the descriptor invariants; throws InvalidStructure.
void validate(const SignalStructure& s);

// Structure-inducing norms.

enum class NormKind { kL1, kWeightedL1, kL12, kNuclear };

struct NormSpec {
  NormKind kind = NormKind::kL1;
  std::size_t block_size = 1;        // l12
  std::size_t side = 0;              // nuclear
  std::vector<double> weights;       // weighted l1, per coordinate
};

NormSpec norm_of(const SignalStructure& s);
double norm_value(const NormSpec& norm, const Vector& x);

/// Support, signs, active blocks or singular subspaces of x, detected at
/// threshold `tol` (entries, block norms or singular values above tol).
SignalStructure structure_at(const NormSpec& norm, const Vector& x, double tol);

}  // namespace proxmse
