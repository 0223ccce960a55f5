#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "covsched/types.hpp"

namespace covsched {

// A scheduling instance in original units. proc(j, i) is the processing
// time of job j on machine i; kUnschedulable marks forbidden pairs.
// (C, L) is the guarantee pair the run is allowed to assume: some schedule
// of total startup cost <= C has lp load norm <= L.
struct Instance {
  Vector costs;    // per-machine startup cost, >= 0
  Matrix proc;     // n x m
  double norm_p = 1.0;
  double guarantee_cost = 0.0;  // C
  double guarantee_load = 0.0;  // L

  Index machines() const { return costs.size(); }
  Index jobs() const { return proc.rows(); }
};

struct InvalidInstance : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct AllMachinesDiscarded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConstraintViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Largest accepted norm exponent. Beyond log2(m) the lp norm is within a
// constant of the max norm and larger p only destabilizes the scaling
// constants, so those values are rejected; the floor of 3 keeps small test
// instances (m < 8) usable with moderate p, where the cutoff is harmless.
inline double max_norm_p(Index m) {
  return std::max(3.0, std::log2(static_cast<double>(std::max<Index>(m, 1))));
}

inline void validate(const Instance& inst) {
  const Index m = inst.machines();
  const Index n = inst.jobs();
  if (m < 1) throw InvalidInstance("instance needs at least one machine");
  if (inst.proc.cols() != m)
    throw InvalidInstance("proc matrix must have one column per machine");
  for (Index i = 0; i < m; ++i) {
    if (!(inst.costs[i] >= 0.0) || !std::isfinite(inst.costs[i]))
      throw InvalidInstance("machine costs must be finite and non-negative");
  }
  for (Index j = 0; j < n; ++j) {
    bool any = false;
    for (Index i = 0; i < m; ++i) {
      const double q = inst.proc(j, i);
      if (schedulable(q)) {
        if (!(q >= 0.0)) throw InvalidInstance("processing times must be non-negative");
        any = true;
      }
    }
    if (!any)
      throw InvalidInstance("job " + std::to_string(j) + " runs on no machine");
  }
  if (!(inst.norm_p >= 1.0))
    throw InvalidInstance("norm exponent must be at least 1");
  if (inst.norm_p > max_norm_p(m))
    throw InvalidInstance(
        "norm exponent " + std::to_string(inst.norm_p) + " exceeds " +
        std::to_string(max_norm_p(m)) +
        "; beyond log2(m) the lp norm tracks the max norm and the scaling "
        "constants degenerate");
  if (!(inst.guarantee_cost > 0.0))
    throw InvalidInstance("guarantee cost C must be positive");
  if (!(inst.guarantee_load > 0.0))
    throw InvalidInstance("guarantee load L must be positive");
}

// Instance after budget normalization. Machines priced out by C are gone;
// surviving costs are rescaled to [1, m'] (cheap ones clamped up to 1) and
// processing times are rescaled so that a schedule obeying (C, L) has lp^p
// load mass about m'*ln(m') in the new units.
struct ScaledInstance {
  std::vector<Index> kept_machines;  // original indices, ascending
  Vector costs;                      // clamped, in [1, m']
  Vector unclamped_costs;            // same scaling, before the clamp to 1
  Matrix proc;                       // n x m', rescaled
  double norm_p = 1.0;
  double beta_scale = 0.0;           // m'*ln(m') / (40 p)^p
  double proc_scale = 0.0;           // beta_scale^(1/p) / L
  Vector initial_x;                  // 1 for cost-1 machines, else 1/m'

  // cached powers used by the hot loops
  Vector cost_pow_inv;   // c^(1/p)
  Vector cost_pow_rest;  // c^((p-1)/p)
  Matrix proc_pow;       // q^p entrywise (inf stays inf)

  Index machines() const { return costs.size(); }
  Index jobs() const { return proc.rows(); }
};

inline ScaledInstance preprocess(const Instance& inst) {
  validate(inst);
  ScaledInstance s;
  const Index m0 = inst.machines();
  const Index n = inst.jobs();
  const double C = inst.guarantee_cost;
  const double L = inst.guarantee_load;
  const double p = inst.norm_p;

  for (Index i = 0; i < m0; ++i)
    if (inst.costs[i] <= C) s.kept_machines.push_back(i);
  if (s.kept_machines.empty())
    throw AllMachinesDiscarded("every machine costs more than the budget C");

  const auto m = static_cast<Index>(s.kept_machines.size());
  const double md = static_cast<double>(m);
  s.norm_p = p;
  s.costs.resize(m);
  s.unclamped_costs.resize(m);
  for (Index i = 0; i < m; ++i) {
    const double scaled = inst.costs[s.kept_machines[i]] * md / C;
    s.unclamped_costs[i] = scaled;
    s.costs[i] = std::max(1.0, scaled);
  }

  s.beta_scale = md * std::log(md) / powp(40.0 * p, p);
  s.proc_scale = std::pow(s.beta_scale, 1.0 / p) / L;
  s.proc.resize(n, m);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) {
      const double q = inst.proc(j, s.kept_machines[i]);
      // inf * 0 would be NaN when m'=1 makes the scale collapse to zero
      s.proc(j, i) = schedulable(q) ? q * s.proc_scale : kUnschedulable;
    }

  s.initial_x.resize(m);
  for (Index i = 0; i < m; ++i)
    s.initial_x[i] = s.costs[i] <= 1.0 + kAbsTol ? 1.0 : 1.0 / md;

  s.cost_pow_inv.resize(m);
  s.cost_pow_rest.resize(m);
  for (Index i = 0; i < m; ++i) {
    s.cost_pow_inv[i] = std::pow(s.costs[i], 1.0 / p);
    s.cost_pow_rest[i] = std::pow(s.costs[i], (p - 1.0) / p);
  }
  s.proc_pow.resize(n, m);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i)
      s.proc_pow(j, i) = schedulable(s.proc(j, i)) ? powp(s.proc(j, i), p) : kUnschedulable;
  return s;
}

// Price a concrete machine choice per job under both cost vectors (before
// and after the clamp to 1); useful when comparing a reference schedule
// against runs on the scaled instance.
inline std::pair<double, double> reference_costs(const ScaledInstance& s,
                                                 const std::vector<Index>& assignment) {
  std::vector<char> open(static_cast<size_t>(s.machines()), 0);
  for (Index i : assignment) open.at(static_cast<size_t>(i)) = 1;
  double pre = 0.0, post = 0.0;
  for (Index i = 0; i < s.machines(); ++i)
    if (open[static_cast<size_t>(i)]) {
      pre += s.unclamped_costs[i];
      post += s.costs[i];
    }
  return {pre, post};
}

// Relaxed scheduling objective: sum_i (sum_j q_ij y_ij / x_i)^p x_i
//                             + sum_i sum_j y_ij q_ij^p.
// Machines with x_i = 0 contribute nothing and must carry no y. max_ratio
// is the admissible y/x ceiling: 1 for plain relaxation feasibility, 2 when
// evaluating states produced by the fractional algorithm (which maintains
// y <= 2x by construction).
inline double lp_objective(const Vector& x, const Matrix& y, const ScaledInstance& s,
                           double max_ratio = 1.0) {
  const Index m = s.machines();
  const Index n = s.jobs();
  if (x.size() != m || y.rows() != n || y.cols() != m)
    throw std::invalid_argument("lp_objective: shape mismatch");
  double total = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double xi = x[i];
    double load = 0.0, powload = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double yji = y(j, i);
      if (yji == 0.0) continue;
      if (yji < 0.0 || yji > max_ratio * xi + tol_for(yji, xi))
        throw ConstraintViolation("y(" + std::to_string(j) + "," + std::to_string(i) +
                                  ")=" + std::to_string(yji) + " outside [0, " +
                                  std::to_string(max_ratio) + "*x], x=" + std::to_string(xi));
      load += yji * s.proc(j, i);
      powload += yji * s.proc_pow(j, i);
    }
    if (xi > 0.0 && load > 0.0) total += powp(load / xi, s.norm_p) * xi;
    total += powload;
  }
  return total;
}

// One structural defect of a candidate relaxed solution.
struct Violation {
  enum Kind { CostBudget, FractionCap, Covering, Range } kind;
  Index i = -1;  // machine, when applicable
  Index j = -1;  // job, when applicable
  double amount = 0.0;  // excess or deficit beyond tolerance
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
};

// Check a relaxed solution against the scheduling relaxation: cost budget,
// y <= x, unit coverage per job, variable ranges. Violations are returned
// as data, never thrown.
inline FeasibilityReport validate_feasibility(const Vector& x, const Matrix& y,
                                              const ScaledInstance& s, double cost_budget) {
  FeasibilityReport rep;
  const Index m = s.machines();
  const Index n = s.jobs();
  const double tol = 1e-9;
  double cost = 0.0;
  for (Index i = 0; i < m; ++i) {
    cost += s.costs[i] * x[i];
    if (x[i] < -tol || x[i] > 1.0 + tol)
      rep.violations.push_back({Violation::Range, i, -1, x[i] < 0 ? -x[i] : x[i] - 1.0});
  }
  if (cost > cost_budget * (1.0 + kRelTol) + kAbsTol)
    rep.violations.push_back({Violation::CostBudget, -1, -1, cost - cost_budget});
  for (Index j = 0; j < n; ++j) {
    double cover = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double yji = y(j, i);
      cover += yji;
      if (yji < -tol || yji > 1.0 + tol)
        rep.violations.push_back({Violation::Range, i, j, yji < 0 ? -yji : yji - 1.0});
      if (yji > x[i] + tol)
        rep.violations.push_back({Violation::FractionCap, i, j, yji - x[i]});
    }
    if (cover < 1.0 - tol)
      rep.violations.push_back({Violation::Covering, -1, j, 1.0 - cover});
  }
  return rep;
}

}  // namespace covsched
