#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include <json.hpp>

#include "proxmse/parallel.hpp"

namespace proxmse {

/// Welford accumulator with count-weighted merge.
class MeanAccumulator {
 public:
  void add(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const MeanAccumulator& other) noexcept {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double n1 = static_cast<double>(count_);
    const double n2 = static_cast<double>(other.count_);
    const double delta = other.mean_ - mean_;
    const double total = n1 + n2;
    mean_ += delta * n2 / total;
    m2_ += other.m2_ + delta * delta * n1 * n2 / total;
    count_ += other.count_;
  }

  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double standard_error() const noexcept {
    return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Accumulates values in index order.
inline MeanAccumulator accumulate(std::span<const double> values) noexcept {
  MeanAccumulator acc;
  for (double v : values) acc.add(v);
  return acc;
}

/// Monte Carlo estimate of a mean-squared-distance quantity. `lambda` is empty
/// for cone quantities.
struct MsdEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::optional<double> lambda;

  static MsdEstimate from(const MeanAccumulator& acc, std::optional<double> lambda = std::nullopt) {
    return {acc.mean(), acc.standard_error(), acc.count(), lambda};
  }
};

inline double combined_stderr(double a, double b) noexcept { return std::sqrt(a * a + b * b); }

inline void to_json(nlohmann::json& j, const MsdEstimate& e) {
  j = nlohmann::json{{"mean", e.mean}, {"stderr", e.std_error}, {"samples", e.samples}};
  j["lambda"] = e.lambda ? nlohmann::json(*e.lambda) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, MsdEstimate& e) {
  e.mean = j.at("mean").get<double>();
  e.std_error = j.at("stderr").get<double>();
  e.samples = j.at("samples").get<std::size_t>();
  if (j.contains("lambda") && !j.at("lambda").is_null()) {
    e.lambda = j.at("lambda").get<double>();
  } else {
    e.lambda.reset();
  }
}

/// Monte Carlo controls.
struct McConfig {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  Exec exec = Exec::kParallel;
};

}  // namespace proxmse
