#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace covsched {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Comparison tolerances used throughout: relative 1e-9 with an absolute
// floor of 1e-12 for quantities near zero.
inline constexpr double kRelTol = 1e-9;
inline constexpr double kAbsTol = 1e-12;

// Processing times that a machine cannot run are stored as +infinity and
// skipped by every sum, norm and preference computation.
inline constexpr double kUnschedulable = std::numeric_limits<double>::infinity();

inline bool schedulable(double q) { return std::isfinite(q); }

inline double tol_for(double a, double b) {
  return std::max(kAbsTol, kRelTol * std::max(std::abs(a), std::abs(b)));
}

// a <= b up to the shared tolerance.
inline bool approx_le(double a, double b) { return a <= b + tol_for(a, b); }

inline bool approx_eq(double a, double b) { return std::abs(a - b) <= tol_for(a, b); }

// x^p with a fast path for small integer exponents; the hot loops run with
// p in {1,2,3} and std::pow there costs more than everything else combined.
inline double powp(double x, double p) {
  double ip;
  if (p >= 1.0 && p <= 8.0 && std::modf(p, &ip) == 0.0) {
    double r = x;
    for (int k = 1; k < static_cast<int>(ip); ++k) r *= x;
    return r;
  }
  return std::pow(x, p);
}

// Sum of L_i^p over finite entries. Expression-friendly: accepts any dense
// Eigen vector expression.
template <typename Derived>
double lp_pow_sum(const Eigen::MatrixBase<Derived>& loads, double p) {
  double s = 0.0;
  for (Index i = 0; i < loads.size(); ++i) {
    const double v = loads.derived()(i);
    if (v != 0.0) s += powp(v, p);
  }
  return s;
}

template <typename Derived>
double lp_norm(const Eigen::MatrixBase<Derived>& loads, double p) {
  const double s = lp_pow_sum(loads, p);
  return s == 0.0 ? 0.0 : std::pow(s, 1.0 / p);
}

}  // namespace covsched
