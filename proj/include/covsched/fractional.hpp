#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "covsched/instance.hpp"
#include "covsched/types.hpp"

namespace covsched {

struct StallDetected : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PrefixUndefined : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AssertionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One record per update step, for the optional step log and for the
// per-step inequality checks in tests.
struct StepRecord {
  Index index = 0;
  Index job = 0;
  bool small = false;
  Index prefix_size = 0;
  double phi_before = 0.0;
  double phi_after = 0.0;
  // 0 = untagged; 1..3 when a reference assignment is supplied: 1 = the
  // reference machine is in the prefix and partially open, 2 = outside the
  // prefix and partially open, 3 = fully open.
  int category = 0;
  bool opened_machine = false;
};

// Evolving fractional solution. Each machine lives in two phases: while
// x_i < 1 ("partial") assigned mass is credited to the j0 accumulators and
// the potential charges the opening cost c_i x_i; once x_i reaches 1 the j0
// accumulators freeze and further mass accrues in j1, with the potential
// switching to the load form built on the proxy load
//   L~_i = c_i^{1/p} x_i + sum_{j in J1} y_ij q_ij.
struct FractionalState {
  Vector x;            // open fraction per machine
  Matrix y;            // n x m assignment fractions
  Vector j0_load;      // sum of y q over partial-phase credits
  Vector j0_loadp;     // sum of y q^p over partial-phase credits
  Vector j1_load;      // same pair for the full phase
  Vector j1_loadp;
  std::vector<char> fully_open;
  Vector x_initial;
  std::vector<Vector> x_after_job;
  double N = 1.0;
  Index small_steps = 0;
  Index regular_steps = 0;
  Index category_steps[4] = {0, 0, 0, 0};
  std::vector<StepRecord> log;
};

struct FractionalOptions {
  bool descending_psi = false;  // comparison mode for the preference order
  bool keep_log = false;
  double stall_eps = 1e-15;
  Index max_passes = 10'000'000;
  // optional reference assignment (machine per job) for step tagging
  const std::vector<Index>* reference_assignment = nullptr;
};

inline FractionalState init_fractional(const ScaledInstance& s, Index jobs) {
  const Index m = s.costs.size();
  FractionalState st;
  st.x = s.initial_x;
  st.y = Matrix::Zero(jobs, m);
  st.j0_load = st.j0_loadp = st.j1_load = st.j1_loadp = Vector::Zero(m);
  st.fully_open.assign(static_cast<size_t>(m), 0);
  for (Index i = 0; i < m; ++i)
    if (st.x[i] >= 1.0) st.fully_open[static_cast<size_t>(i)] = 1;
  st.x_initial = st.x;
  const double md = static_cast<double>(m);
  st.N = std::max(static_cast<double>(jobs) * md * std::log(md), 1.0);
  return st;
}

inline double proxy_load(const FractionalState& st, const ScaledInstance& s, Index i) {
  return s.cost_pow_inv[i] * st.x[i] + st.j1_load[i];
}

// Marginal preference rate of machine i for job j. Partial machines price a
// unit of the job at the larger of its cost-weighted and p-th-power load
// footprint; fully open machines price the exact potential increment of a
// full unit on top of the proxy load. Zero processing time prices at zero,
// an unschedulable pair at infinity.
inline double psi(const FractionalState& st, const ScaledInstance& s, Index i, Index j) {
  const double q = s.proc(j, i);
  if (!schedulable(q)) return kUnschedulable;
  if (st.fully_open[static_cast<size_t>(i)]) {
    const double load = proxy_load(st, s, i);
    return powp(load + q, s.norm_p) - powp(load, s.norm_p);
  }
  return std::max(s.cost_pow_rest[i] * q, s.proc_pow(j, i));
}

struct PotentialBreakdown {
  Vector per_machine;
  double total = 0.0;
  double cost_mass = 0.0;    // sum of c_i x_i over partial machines
  double proxy_mass = 0.0;   // sum of L~_i^p over fully open machines
  double loadp_mass = 0.0;   // sum of j1 y q^p over fully open machines
};

inline PotentialBreakdown potential(const FractionalState& st, const ScaledInstance& s) {
  const Index m = st.x.size();
  PotentialBreakdown pb;
  pb.per_machine = Vector::Zero(m);
  for (Index i = 0; i < m; ++i) {
    if (st.fully_open[static_cast<size_t>(i)]) {
      const double lp = powp(proxy_load(st, s, i), s.norm_p);
      pb.per_machine[i] = lp + st.j1_loadp[i];
      pb.proxy_mass += lp;
      pb.loadp_mass += st.j1_loadp[i];
    } else {
      pb.per_machine[i] = s.costs[i] * st.x[i];
      pb.cost_mass += pb.per_machine[i];
    }
  }
  pb.total = pb.per_machine.sum();
  return pb;
}

namespace detail {

// Machines ordered by preference; unschedulable ones always sort last, ties
// go to the lower index.
inline std::vector<Index> psi_order(const Vector& psis, bool descending) {
  std::vector<Index> order(static_cast<size_t>(psis.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const bool ia = !schedulable(psis[a]), ib = !schedulable(psis[b]);
    if (ia != ib) return ib;
    if (psis[a] != psis[b]) return descending ? psis[a] > psis[b] : psis[a] < psis[b];
    return a < b;
  });
  return order;
}

}  // namespace detail

// Fractionally assign one job: repeat preference-ordered prefix updates
// until the job's mass reaches 1, then rescale the row to exact covering.
// Throws StallDetected when a pass makes no progress (and opens nothing),
// PrefixUndefined when total open mass is below 1.
inline void assign_job_fractional(FractionalState& st, const ScaledInstance& s, Index j,
                                  const FractionalOptions& opt = {}) {
  const Index m = st.x.size();
  if (st.y.row(j).sum() != 0.0)
    throw std::invalid_argument("job already carries fractional mass");

  Vector y0_row = Vector::Zero(m);  // this job's partial-phase credits
  double sum_y = 0.0;
  Index passes = 0;

  while (sum_y < 1.0 - 1e-12) {
    if (++passes > opt.max_passes)
      throw StallDetected("no convergence after " + std::to_string(opt.max_passes) + " passes");

    Vector psis(m);
    for (Index i = 0; i < m; ++i) psis[i] = psi(st, s, i, j);
    const std::vector<Index> order = detail::psi_order(psis, opt.descending_psi);

    double cum = 0.0;
    Index prefix_len = 0;
    for (Index k = 0; k < m; ++k) {
      cum += st.x[order[static_cast<size_t>(k)]];
      if (cum >= 1.0 - 1e-12) { prefix_len = k + 1; break; }
    }
    if (prefix_len == 0) throw PrefixUndefined("total open mass below 1");

    // deltas from the step-start state
    Vector dx = Vector::Zero(m), dy = Vector::Zero(m);
    double np = st.N;      // effective denominator, raised for small steps
    bool small = false;
    for (int round = 0; round < 2; ++round) {
      bool overflow = false;
      for (Index k = 0; k < prefix_len; ++k) {
        const Index i = order[static_cast<size_t>(k)];
        const bool partial = !st.fully_open[static_cast<size_t>(i)];
        dx[i] = partial ? st.x[i] / (s.costs[i] * np) : 0.0;
        const double cap = 2.0 * st.x[i] - st.y(j, i);
        double d;
        if (!schedulable(psis[i])) {
          d = 0.0;
        } else if (psis[i] == 0.0) {
          d = cap;
        } else {
          d = std::min(st.x[i] / (psis[i] * np), cap);
        }
        const double room_x = 1.0 - st.x[i], room_y = 1.0 - st.y(j, i);
        if (round == 0) {
          if (dx[i] > room_x) {
            overflow = true;
            np = std::max(np, st.x[i] / s.costs[i] / room_x);
          }
          if (d > room_y) {
            overflow = true;
            // the rate branch alone can be retuned by the denominator; a
            // cap-branch overflow is denominator-independent and is clamped
            // to land exactly on 1 below
            if (psis[i] > 0.0 && schedulable(psis[i]) && room_y > 0.0)
              np = std::max(np, st.x[i] / psis[i] / room_y);
          }
        }
        dy[i] = std::min(d, room_y);
      }
      if (round == 0) {
        if (!overflow) break;
        small = true;  // rerun with the raised denominator
      }
    }

    const double phi_before = potential(st, s).total;
    bool opened = false;
    double gained = 0.0;
    for (Index k = 0; k < prefix_len; ++k) {
      const Index i = order[static_cast<size_t>(k)];
      const bool partial = !st.fully_open[static_cast<size_t>(i)];
      st.x[i] += dx[i];
      st.y(j, i) += dy[i];
      gained += dy[i];
      if (dy[i] > 0.0) {
        const double q = s.proc(j, i), qp = s.proc_pow(j, i);
        if (partial) {
          if (dy[i] * q > dx[i] * s.cost_pow_inv[i] * (1.0 + kRelTol) + kAbsTol ||
              dy[i] * qp > dx[i] * s.costs[i] * (1.0 + kRelTol) + kAbsTol)
            throw AssertionFailure("partial-phase load growth outpaces cost growth");
          y0_row[i] += dy[i];
          st.j0_load[i] += dy[i] * q;
          st.j0_loadp[i] += dy[i] * qp;
        } else {
          st.j1_load[i] += dy[i] * q;
          st.j1_loadp[i] += dy[i] * qp;
        }
      }
      if (partial && st.x[i] >= 1.0 - (small ? 1e-12 : 0.0)) {
        st.x[i] = 1.0;
        st.fully_open[static_cast<size_t>(i)] = 1;
        opened = true;
      }
      if (dy[i] > 0.0 && small && st.y(j, i) > 1.0 - 1e-12) st.y(j, i) = 1.0;
    }
    sum_y += gained;

    const double phi_after = potential(st, s).total;
    if (phi_after > phi_before + 5.0 / st.N + 1e-9)
      throw AssertionFailure("potential step increase exceeds 5/N");
    if (phi_after < phi_before - 1e-9)
      throw AssertionFailure("potential decreased within a step");
    if (gained < opt.stall_eps && !opened)
      throw StallDetected("pass made no progress on job " + std::to_string(j));

    if (small) ++st.small_steps; else ++st.regular_steps;
    int category = 0;
    if (opt.reference_assignment && !small) {
      const Index ref = (*opt.reference_assignment)[static_cast<size_t>(j)];
      // phase at step start: a machine opened in this very step was partial
      const bool ref_full_at_start =
          st.fully_open[static_cast<size_t>(ref)] &&
          !(dx[ref] > 0.0 && st.x[ref] >= 1.0);
      if (ref_full_at_start) {
        category = 3;
      } else {
        bool in_prefix = false;
        for (Index k = 0; k < prefix_len; ++k)
          if (order[static_cast<size_t>(k)] == ref) { in_prefix = true; break; }
        category = in_prefix ? 1 : 2;
      }
      ++st.category_steps[category];
    }
    if (opt.keep_log) {
      StepRecord rec;
      rec.index = static_cast<Index>(st.log.size());
      rec.job = j;
      rec.small = small;
      rec.prefix_size = prefix_len;
      rec.phi_before = phi_before;
      rec.phi_after = phi_after;
      rec.category = category;
      rec.opened_machine = opened;
      st.log.push_back(rec);
    }
  }

  // close the job: rescale its row to exact covering and keep the load
  // accumulators consistent with the rescaled mass
  const double total = st.y.row(j).sum();
  const double factor = 1.0 / total;
  for (Index i = 0; i < m; ++i) {
    const double yi = st.y(j, i);
    if (yi == 0.0) continue;
    const double q = s.proc(j, i), qp = s.proc_pow(j, i);
    const double d0 = (factor - 1.0) * y0_row[i];
    const double d1 = (factor - 1.0) * (yi - y0_row[i]);
    st.j0_load[i] += d0 * q;
    st.j0_loadp[i] += d0 * qp;
    st.j1_load[i] += d1 * q;
    st.j1_loadp[i] += d1 * qp;
    st.y(j, i) = yi * factor;
  }
}

struct FractionalReport {
  double cost = 0.0;       // sum c_i x_i
  double objective = 0.0;  // cost plus lp^p of fractional loads
  double potential = 0.0;
  double cost_ratio = 0.0;       // cost / potential
  double objective_ratio = 0.0;  // objective / potential
  double potential_trend = 0.0;  // potential / (m ln m)
  Index small_steps = 0;
  Index regular_steps = 0;
};

// Final accounting. The two inequalities are exact consequences of the
// phase bookkeeping (cost never exceeds the potential, and the true loads
// never exceed the proxy loads), so they are asserted, not just reported.
inline FractionalReport fractional_report(const FractionalState& st, const ScaledInstance& s) {
  FractionalReport r;
  const PotentialBreakdown pb = potential(st, s);
  r.potential = pb.total;
  r.cost = st.x.dot(s.costs);
  r.objective = lp_objective(st.x, st.y, s, 2.0);
  if (r.cost > r.potential * (1.0 + kRelTol))
    throw AssertionFailure("opening cost exceeds potential");
  if (r.objective > 2.0 * r.potential * (1.0 + kRelTol))
    throw AssertionFailure("fractional objective exceeds twice the potential");
  r.cost_ratio = r.potential > 0.0 ? r.cost / r.potential : 0.0;
  r.objective_ratio = r.potential > 0.0 ? r.objective / r.potential : 0.0;
  const double md = static_cast<double>(st.x.size());
  const double scale = md * std::log(std::max(md, 2.0));
  r.potential_trend = pb.total / scale;
  r.small_steps = st.small_steps;
  r.regular_steps = st.regular_steps;
  return r;
}

// Run the whole job sequence, recording the per-job x snapshots the
// rounding schemes consume.
inline FractionalState run_fractional(const ScaledInstance& s, Index jobs,
                                      const FractionalOptions& opt = {}) {
  FractionalState st = init_fractional(s, jobs);
  st.x_after_job.reserve(static_cast<size_t>(jobs));
  for (Index j = 0; j < jobs; ++j) {
    assign_job_fractional(st, s, j, opt);
    st.x_after_job.push_back(st.x);
  }
  if (st.small_steps > jobs + s.costs.size())
    throw AssertionFailure("small step count exceeds n + m");
  return st;
}

}  // namespace covsched
