#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "covsched/fractional.hpp"
#include "covsched/instance.hpp"
#include "covsched/rng.hpp"
#include "covsched/types.hpp"

namespace covsched {

struct InvariantBreach : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// alpha used by the general-norm scheme when none is given. Desk-scale
// instances usually saturate every opening probability at this value, so
// tests exercise the case logic with small explicit alphas instead.
inline double default_alpha(Index m, Index n) {
  return 48.0 * std::log(static_cast<double>(m) * static_cast<double>(n));
}

enum class Color { Blue, Red };

struct Decision {
  Index job = 0;
  Index machine = 0;
  Color color = Color::Blue;
  int case_tag = 0;  // 1..3 for the general scheme; 1 = prefix, 2 = fallback for l1
};

// Integer-side state. Every machine has a blue copy, opened by the coupled
// random rule so that P[open] tracks min(alpha * x_i, 1) exactly, and a red
// copy opened deterministically when the greedy fallback needs it.
//
// Randomness contract: one xoshiro256++ stream per run, seeded once. Each
// opening sweep draws one uniform per still-closed machine in ascending
// index order (even when the opening probability is zero); an assignment
// that samples (case 1 or 2, or the uniform l1 choice) draws exactly one
// more. Nothing else consumes the stream, so runs replay bit-identically
// from the seed.
struct RoundingState {
  double alpha = 1.0;
  Rng rng;
  std::vector<char> blue_open, red_open;
  Vector blue_load, red_load;  // assigned processing per copy
  Vector x_snapshot;           // fractional x at the last opening sweep
  std::vector<Decision> assignment;
  double blue_cost = 0.0, red_cost = 0.0;
  Index case_counts[4] = {0, 0, 0, 0};
};

inline RoundingState init_rounding(const ScaledInstance& s, double alpha, uint64_t seed) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  const Index m = s.costs.size();
  RoundingState st;
  st.alpha = alpha;
  st.rng = Rng(seed);
  st.blue_open.assign(static_cast<size_t>(m), 0);
  st.red_open.assign(static_cast<size_t>(m), 0);
  st.blue_load = st.red_load = Vector::Zero(m);
  st.x_snapshot = Vector::Zero(m);  // coupling chain starts from zero mass
  return st;
}

// Advance the blue copies to a new fractional snapshot. Conditional on
// being closed with previous mass xp, a machine opens with probability
// alpha*(xn - xp) / (1 - alpha*xp), which telescopes to the unconditional
// marginal min(alpha * xn, 1).
inline std::vector<Index> open_blue_step(RoundingState& st, const ScaledInstance& s,
                                         const Vector& x_new) {
  const Index m = st.x_snapshot.size();
  if (x_new.size() != m) throw std::invalid_argument("snapshot dimension mismatch");
  std::vector<Index> opened;
  for (Index i = 0; i < m; ++i) {
    if (x_new[i] < st.x_snapshot[i] - 1e-12)
      throw std::invalid_argument("fractional mass decreased between sweeps");
    if (st.blue_open[static_cast<size_t>(i)]) continue;
    const double denom = 1.0 - st.alpha * st.x_snapshot[i];
    if (denom <= 0.0)
      throw InvariantBreach("machine " + std::to_string(i) +
                            " closed past its sure-opening point");
    const double pr =
        std::min(std::max(st.alpha * (x_new[i] - st.x_snapshot[i]) / denom, 0.0), 1.0);
    if (st.rng.uniform01() < pr) {
      st.blue_open[static_cast<size_t>(i)] = 1;
      st.blue_cost += s.costs[i];
      opened.push_back(i);
    }
  }
  st.x_snapshot = x_new;
  return opened;
}

// z_ij = 4 y_ij / (alpha x_i) for low-mass machines (x below 1/alpha);
// entries for the rest are reported as zero and never consulted.
inline Vector z_values(const Vector& y_row, const Vector& x_now, double alpha) {
  Vector z = Vector::Zero(y_row.size());
  for (Index i = 0; i < y_row.size(); ++i)
    if (x_now[i] < 1.0 / alpha && y_row[i] > 0.0) z[i] = 4.0 * y_row[i] / (alpha * x_now[i]);
  return z;
}

namespace detail {

// Sample an index with probability weight[i]/total over the given candidate
// set (ascending). Walks the cumulative sum; fp dust at the top end falls
// to the last positive-weight candidate.
template <typename Weight>
Index sample_proportional(Rng& rng, const std::vector<Index>& candidates, Weight&& weight,
                          double total) {
  const double target = rng.uniform01() * total;
  double acc = 0.0;
  Index last_positive = -1;
  for (Index i : candidates) {
    const double w = weight(i);
    if (w <= 0.0) continue;
    last_positive = i;
    acc += w;
    if (target < acc) return i;
  }
  return last_positive;
}

}  // namespace detail

// Place one job on an open copy. High-mass machines (x >= 1/alpha, whose
// blue copies are surely open) take it in proportion to y when they carry
// at least half its fractional mass; otherwise open low-mass blue copies
// take it in proportion to z when those weights sum to at least 1; the
// remaining jobs go to the red copy minimizing the p-th-power load
// increment, opening it if needed.
inline Decision assign_job_integer(RoundingState& st, const ScaledInstance& s, Index j,
                                   const Vector& y_row, const Vector& x_now) {
  const Index m = x_now.size();
  Decision d;
  d.job = j;

  std::vector<Index> high, low_open;
  double high_mass = 0.0;
  for (Index i = 0; i < m; ++i) {
    if (x_now[i] >= 1.0 / st.alpha) {
      high.push_back(i);
      high_mass += y_row[i];
    } else if (st.blue_open[static_cast<size_t>(i)]) {
      low_open.push_back(i);
    }
  }

  if (high_mass >= 0.5) {
    const Index pick =
        detail::sample_proportional(st.rng, high, [&](Index i) { return y_row[i]; }, high_mass);
    if (!st.blue_open[static_cast<size_t>(pick)])
      throw InvariantBreach("high-mass machine " + std::to_string(pick) + " has no blue copy");
    d.machine = pick;
    d.color = Color::Blue;
    d.case_tag = 1;
  } else {
    const Vector z = z_values(y_row, x_now, st.alpha);
    double z_mass = 0.0;
    for (Index i : low_open) z_mass += z[i];
    if (z_mass >= 1.0) {
      const Index pick =
          detail::sample_proportional(st.rng, low_open, [&](Index i) { return z[i]; }, z_mass);
      d.machine = pick;
      d.color = Color::Blue;
      d.case_tag = 2;
    } else {
      Index best = -1;
      double best_inc = kUnschedulable;
      for (Index i = 0; i < m; ++i) {
        const double q = s.proc(j, i);
        if (!schedulable(q)) continue;
        const double inc =
            powp(st.red_load[i] + q, s.norm_p) - powp(st.red_load[i], s.norm_p);
        if (inc < best_inc) { best_inc = inc; best = i; }
      }
      if (best < 0) throw InvariantBreach("job has no schedulable machine");
      d.machine = best;
      d.color = Color::Red;
      d.case_tag = 3;
      if (!st.red_open[static_cast<size_t>(best)]) {
        st.red_open[static_cast<size_t>(best)] = 1;
        st.red_cost += s.costs[best];
      }
    }
  }

  const double q = s.proc(j, d.machine);
  (d.color == Color::Blue ? st.blue_load : st.red_load)[d.machine] += q;
  ++st.case_counts[d.case_tag];
  st.assignment.push_back(d);
  return d;
}

struct RoundingReport {
  double blue_cost = 0.0, red_cost = 0.0, total_cost = 0.0;
  double blue_norm = 0.0, red_norm = 0.0;  // lp norms of the per-copy loads
  Index case_counts[4] = {0, 0, 0, 0};
  double cost_over_potential = 0.0;
  double norm_over_potential = 0.0;  // blue lp^p mass relative to potential
};

inline RoundingReport rounding_report(const RoundingState& st, const ScaledInstance& s,
                                      double potential_total) {
  RoundingReport r;
  r.blue_cost = st.blue_cost;
  r.red_cost = st.red_cost;
  r.total_cost = st.blue_cost + st.red_cost;
  r.blue_norm = lp_norm(st.blue_load, s.norm_p);
  r.red_norm = lp_norm(st.red_load, s.norm_p);
  for (int c = 0; c < 4; ++c) r.case_counts[c] = st.case_counts[c];
  if (potential_total > 0.0) {
    r.cost_over_potential = r.total_cost / potential_total;
    r.norm_over_potential = lp_pow_sum(st.blue_load, s.norm_p) / potential_total;
  }
  return r;
}

// One full randomized run against a completed fractional solution: an
// opening sweep up to the pre-job mass, then per job an opening sweep and
// an assignment.
inline RoundingState run_rounding_lp(const FractionalState& frac, const ScaledInstance& s,
                                     double alpha, uint64_t seed) {
  RoundingState st = init_rounding(s, alpha, seed);
  open_blue_step(st, s, frac.x_initial);
  const Index n = frac.y.rows();
  for (Index j = 0; j < n; ++j) {
    open_blue_step(st, s, frac.x_after_job[static_cast<size_t>(j)]);
    assign_job_integer(st, s, j, frac.y.row(j), frac.x_after_job[static_cast<size_t>(j)]);
  }
  return st;
}

}  // namespace covsched
