#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace proxmse {

// Configuration-class errors derive from std::invalid_argument so callers can
// separate bad input from numerical failure with a single catch.

class InvalidStructure : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BoundNotValid : public std::invalid_argument {
 public:
  BoundNotValid(const std::string& what, double threshold)
      : std::invalid_argument(what), threshold_(threshold) {}
  double threshold() const noexcept { return threshold_; }

 private:
  double threshold_;
};

class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t index)
      : std::runtime_error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what), index_(static_cast<std::size_t>(-1)) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class RunQualityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace proxmse
