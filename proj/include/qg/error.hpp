#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qg {

/// Rejected input: violated precondition, bad shape, unknown name.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to meet its contract (blow-up, residual target missed).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved = 0.0, std::int64_t index = -1)
      : std::runtime_error(what), achieved_(achieved), index_(index) {}
  double achieved() const noexcept { return achieved_; }
  std::int64_t index() const noexcept { return index_; }

 private:
  double achieved_;
  std::int64_t index_;
};

}  // namespace qg
