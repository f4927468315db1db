#ifndef RADSCAT_ERROR_HPP
#define RADSCAT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace radscat {

/// Numerical failure inside a solve, with the mode and interval it came from.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int mode = 0, double lo = 0.0, double hi = 0.0)
      : std::runtime_error(format(what, mode, lo, hi)), mode_(mode), lo_(lo), hi_(hi) {}

  int mode() const { return mode_; }
  double interval_lo() const { return lo_; }
  double interval_hi() const { return hi_; }

 private:
  static std::string format(const std::string& what, int mode, double lo, double hi) {
    if (lo == 0.0 && hi == 0.0) return what + " (mode " + std::to_string(mode) + ")";
    return what + " (mode " + std::to_string(mode) + ", interval [" + std::to_string(lo) + ", " +
           std::to_string(hi) + "])";
  }

  int mode_;
  double lo_, hi_;
};

}  // namespace radscat

#endif  // RADSCAT_ERROR_HPP
