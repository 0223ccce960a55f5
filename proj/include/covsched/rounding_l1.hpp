#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "covsched/rounding.hpp"

namespace covsched {

// alpha used by the l1 scheme when none is given.
inline double default_alpha_l1(Index n) { return 4.0 * std::log(static_cast<double>(n)); }

// Machines sorted by processing time with the minimal leading group that
// carries at least half of the job's fractional mass.
struct HalfPrefix {
  std::vector<Index> ordered_machines;  // ascending processing time, ties to lower index
  Index prefix_end = 0;                 // prefix is ordered_machines[0, prefix_end)
  double prefix_mass = 0.0;
};

inline HalfPrefix half_prefix(const Vector& p_row, const Vector& y_row) {
  HalfPrefix hp;
  hp.ordered_machines.resize(static_cast<size_t>(p_row.size()));
  std::iota(hp.ordered_machines.begin(), hp.ordered_machines.end(), Index{0});
  std::stable_sort(hp.ordered_machines.begin(), hp.ordered_machines.end(),
                   [&](Index a, Index b) {
                     if (p_row[a] != p_row[b]) return p_row[a] < p_row[b];
                     return a < b;
                   });
  for (Index k = 0; k < static_cast<Index>(hp.ordered_machines.size()); ++k) {
    hp.prefix_mass += y_row[hp.ordered_machines[static_cast<size_t>(k)]];
    if (hp.prefix_mass >= 0.5) { hp.prefix_end = k + 1; break; }
  }
  if (hp.prefix_end == 0)
    throw std::invalid_argument("job carries less than half a unit of fractional mass");
  return hp;
}

struct L1Options {
  // the prefix rule allows any open member; the default takes the fastest,
  // the uniform mode draws among the open members for sensitivity runs
  bool uniform_choice = false;
};

// Place one job: a blue-open machine inside the half-mass prefix if one
// exists (fastest such by default), otherwise the red copy of the overall
// fastest machine. Every blue placement carries the deterministic
// certificate q <= 2 * (job's fractional load), checked here.
inline Decision assign_job_l1(RoundingState& st, const ScaledInstance& s, Index j,
                              const Vector& y_row, const L1Options& opt = {}) {
  const Vector p_row = s.proc.row(j);
  const HalfPrefix hp = half_prefix(p_row, y_row);

  Decision d;
  d.job = j;
  std::vector<Index> open_members;
  for (Index k = 0; k < hp.prefix_end; ++k) {
    const Index i = hp.ordered_machines[static_cast<size_t>(k)];
    if (st.blue_open[static_cast<size_t>(i)]) open_members.push_back(i);
  }

  if (!open_members.empty()) {
    Index pick = open_members.front();  // prefix order is ascending processing time
    if (opt.uniform_choice && open_members.size() > 1)
      pick = open_members[st.rng.below(open_members.size())];
    d.machine = pick;
    d.color = Color::Blue;
    d.case_tag = 1;
    const double frac_load = y_row.dot(
        p_row.unaryExpr([](double q) { return schedulable(q) ? q : 0.0; }));
    if (p_row[pick] > 2.0 * frac_load * (1.0 + kRelTol) + kAbsTol)
      throw AssertionFailure("blue placement exceeds twice the fractional load");
  } else {
    Index best = -1;
    for (Index i : hp.ordered_machines)
      if (schedulable(p_row[i])) { best = i; break; }
    if (best < 0) throw InvariantBreach("job has no schedulable machine");
    d.machine = best;
    d.color = Color::Red;
    d.case_tag = 2;
    if (!st.red_open[static_cast<size_t>(best)]) {
      st.red_open[static_cast<size_t>(best)] = 1;
      st.red_cost += s.costs[best];
    }
  }

  (d.color == Color::Blue ? st.blue_load : st.red_load)[d.machine] += p_row[d.machine];
  ++st.case_counts[d.case_tag];
  st.assignment.push_back(d);
  return d;
}

struct L1Report {
  double blue_cost = 0.0, red_cost = 0.0, total_cost = 0.0;
  double blue_l1 = 0.0, red_l1 = 0.0;
  Index blue_jobs = 0, red_jobs = 0;
  std::vector<double> certificates;  // per blue job: 2*frac_load - q, all >= 0
};

// Final l1 accounting. The summed per-job certificates give the
// deterministic bound blue_l1 <= 2 * potential, asserted here.
inline L1Report l1_report(const RoundingState& st, const ScaledInstance& s,
                          const FractionalState& frac, double potential_total) {
  L1Report r;
  r.blue_cost = st.blue_cost;
  r.red_cost = st.red_cost;
  r.total_cost = st.blue_cost + st.red_cost;
  r.blue_l1 = st.blue_load.sum();
  r.red_l1 = st.red_load.sum();
  for (const Decision& d : st.assignment) {
    if (d.color != Color::Blue) { ++r.red_jobs; continue; }
    ++r.blue_jobs;
    double frac_load = 0.0;
    for (Index i = 0; i < frac.y.cols(); ++i) {
      const double q = s.proc(d.job, i);
      if (frac.y(d.job, i) > 0.0 && schedulable(q)) frac_load += frac.y(d.job, i) * q;
    }
    const double slack = 2.0 * frac_load - s.proc(d.job, d.machine);
    if (slack < -(2.0 * frac_load * kRelTol + kAbsTol))
      throw AssertionFailure("blue certificate violated");
    r.certificates.push_back(slack);
  }
  if (r.blue_l1 > 2.0 * potential_total * (1.0 + kRelTol) + kAbsTol)
    throw AssertionFailure("blue l1 load exceeds twice the potential");
  return r;
}

// One full l1 run: identical opening chain, prefix-based assignment.
inline RoundingState run_rounding_l1(const FractionalState& frac, const ScaledInstance& s,
                                     double alpha, uint64_t seed, const L1Options& opt = {}) {
  RoundingState st = init_rounding(s, alpha, seed);
  open_blue_step(st, s, frac.x_initial);
  const Index n = frac.y.rows();
  for (Index j = 0; j < n; ++j) {
    open_blue_step(st, s, frac.x_after_job[static_cast<size_t>(j)]);
    assign_job_l1(st, s, j, frac.y.row(j), opt);
  }
  return st;
}

}  // namespace covsched
