#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "covsched/types.hpp"

namespace covsched {

// Objective handed to the online covering solver: convex, monotone
// non-decreasing, differentiable on the positive orthant.
//   beta_measure: an upper bound on sup_x sum_i x_i df/dx_i / f(x)
//   gamma_scale:  the start-point scale; the solver begins at x = 1/gamma
struct ConvexObjective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double beta_measure = 1.0;
  double gamma_scale = 1.0;
  std::string name;
};

inline ConvexObjective linear_objective(Vector weights, double gamma) {
  ConvexObjective f;
  f.name = "linear";
  f.beta_measure = 1.0;
  f.gamma_scale = gamma;
  f.value = [w = weights](const Vector& x) { return w.dot(x); };
  f.gradient = [w = std::move(weights)](const Vector&) { return w; };
  return f;
}

struct ZeroGradientOnActiveCoordinate : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonTermination : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleReference : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solver state for the online covering-with-convex-cost loop. Rows arrive
// one at a time, each demanding row . x >= 1; unsatisfied rows are absorbed
// by simulating the multiplicative flow dx_i/dt = c_ij x_i / (df/dx_i) with
// one dual unit per unit of time.
struct OcgState {
  ConvexObjective objective;
  Vector x;
  double f_start = 0.0;                 // objective value at the start point
  std::vector<Vector> rows;             // every row seen, in arrival order
  std::vector<double> duals;            // y_j per row, 0 for pre-satisfied
  double step_eps = 1e-3;               // per-step relative growth ceiling
  std::optional<double> declared_c_min; // set when the caller knows c_min up front
  std::uint64_t max_steps = 10'000'000; // flow-step budget across the run
  std::uint64_t steps_taken = 0;
};

inline OcgState init_state(ConvexObjective objective, Index dim, double step_eps = 1e-3) {
  if (dim < 1) throw std::invalid_argument("solver dimension must be at least 1");
  if (!(step_eps > 0.0 && step_eps <= 0.1))
    throw std::invalid_argument("step_eps must lie in (0, 0.1]");
  if (!(objective.gamma_scale > 0.0))
    throw std::invalid_argument("gamma scale must be positive");
  OcgState st;
  st.objective = std::move(objective);
  st.x = Vector::Constant(dim, 1.0 / st.objective.gamma_scale);
  st.f_start = st.objective.value(st.x);
  st.step_eps = step_eps;
  return st;
}

// Feed one covering row. Growth is explicit Euler with the gradient frozen
// at each step start, capped so no coordinate grows by more than a factor
// (1 + step_eps) per step; the final step duration is bisected so the row
// lands in [1, 1+step_eps]. The dual for the row accumulates elapsed time.
inline void process_constraint(OcgState& st, const Vector& row) {
  if (row.size() != st.x.size())
    throw std::invalid_argument("covering row has wrong dimension");
  for (Index i = 0; i < row.size(); ++i)
    if (row[i] < 0.0) throw std::invalid_argument("covering coefficients must be >= 0");

  double dual = 0.0;
  double value = row.dot(st.x);
  while (value < 1.0) {
    if (++st.steps_taken > st.max_steps)
      throw NonTermination("flow step budget exhausted (" +
                           std::to_string(st.max_steps) + " steps)");
    const Vector g = st.objective.gradient(st.x);
    // dx_i/dt = c_i x_i / g_i for active coordinates; relative growth rate
    // is c_i / g_i, so the cap on dt comes from the fastest coordinate.
    double max_rel = 0.0;
    for (Index i = 0; i < row.size(); ++i) {
      if (row[i] <= 0.0) continue;
      if (!(g[i] > 0.0))
        throw ZeroGradientOnActiveCoordinate(
            "gradient vanishes on active coordinate " + std::to_string(i));
      max_rel = std::max(max_rel, row[i] / g[i]);
    }
    const double dt_cap = st.step_eps / max_rel;
    // row value is linear in dt within the step: value + dt * speed
    double speed = 0.0;
    for (Index i = 0; i < row.size(); ++i)
      if (row[i] > 0.0) speed += row[i] * row[i] * st.x[i] / g[i];

    double dt = dt_cap;
    bool landing = false;
    if (value + dt_cap * speed >= 1.0) {
      // final step: bisect dt until the landing value just clears 1
      double lo = 0.0, hi = dt_cap;
      while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (value + mid * speed >= 1.0 ? hi : lo) = mid;
      }
      dt = hi;
      landing = true;
    }
    for (Index i = 0; i < row.size(); ++i)
      if (row[i] > 0.0) st.x[i] += dt * row[i] * st.x[i] / g[i];
    dual += dt;
    // the landing step satisfies the row exactly in the linear model
    // (sum c x grows by dt * speed identically); re-deriving the value from
    // the mutated x can sit one ulp under 1.0 forever, so exit here.
    if (landing) break;
    value = row.dot(st.x);
  }
  st.rows.push_back(row);
  st.duals.push_back(dual);
}

// Smallest slack over all seen rows (row.x - 1); negative means a past row
// is no longer satisfied, which monotone growth rules out.
inline double min_row_slack(const OcgState& st) {
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& r : st.rows) slack = std::min(slack, r.dot(st.x) - 1.0);
  return slack;
}

inline double effective_c_min(const OcgState& st) {
  if (st.declared_c_min) return *st.declared_c_min;
  double cmin = std::numeric_limits<double>::infinity();
  for (const auto& r : st.rows)
    for (Index i = 0; i < r.size(); ++i)
      if (r[i] > 0.0) cmin = std::min(cmin, r[i]);
  return cmin;
}

struct StationarityReport {
  // ratio[i] = (sum_j c_ij y_j) / (alpha * df/dx_i at the end state) for
  // coordinates with positive end gradient; the dual-balance certificate
  // says these never exceed 1 by more than discretization noise.
  std::vector<double> ratios;
  std::vector<Index> coords;           // coordinate per ratio entry
  std::vector<Index> zero_gradient;    // coordinates skipped for g_i = 0
  double alpha = 0.0;                  // ln(gamma / c_min)
  bool c_min_declared = false;
};

inline StationarityReport stationarity_gap(const OcgState& st) {
  StationarityReport rep;
  if (st.rows.empty()) return rep;
  const double c_min = effective_c_min(st);
  rep.c_min_declared = st.declared_c_min.has_value();
  rep.alpha = std::log(st.objective.gamma_scale / c_min);
  const Vector g = st.objective.gradient(st.x);
  for (Index i = 0; i < st.x.size(); ++i) {
    double lhs = 0.0;
    for (size_t j = 0; j < st.rows.size(); ++j) lhs += st.rows[j][i] * st.duals[j];
    if (g[i] > 0.0) {
      rep.coords.push_back(i);
      rep.ratios.push_back(rep.alpha > 0.0 ? lhs / (rep.alpha * g[i])
                                           : (lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()));
    } else {
      rep.zero_gradient.push_back(i);
    }
  }
  return rep;
}

struct GuaranteeReport {
  double achieved = 0.0;  // f at the end state
  double bound = 0.0;     // f(alpha*beta*x_ref) + beta*f(start)
  double alpha = 0.0;
  double beta = 0.0;
  double slack = 0.0;     // multiplicative allowance for discretization
  bool within_bound = false;
};

// Compare the end state against the scaled-reference bound. x_ref must
// satisfy every row seen so far.
inline GuaranteeReport guarantee_bound(const OcgState& st, const Vector& x_ref) {
  if (x_ref.size() != st.x.size())
    throw std::invalid_argument("reference point has wrong dimension");
  for (size_t j = 0; j < st.rows.size(); ++j)
    if (st.rows[j].dot(x_ref) < 1.0 - 1e-9)
      throw InfeasibleReference("reference point violates row " + std::to_string(j));
  GuaranteeReport rep;
  rep.alpha = std::log(st.objective.gamma_scale / effective_c_min(st));
  rep.beta = st.objective.beta_measure;
  rep.achieved = st.objective.value(st.x);
  rep.bound = st.objective.value(Vector(rep.alpha * rep.beta * x_ref)) +
              rep.beta * st.f_start;
  rep.slack = 3.0 * st.step_eps;
  rep.within_bound = rep.achieved <= rep.bound * (1.0 + rep.slack);
  return rep;
}

}  // namespace covsched
