#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "covsched/instance.hpp"
#include "covsched/types.hpp"

namespace covsched {

struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One non-dominated offline schedule: no enumerated schedule is at most as
// expensive and at most as loaded with one strict improvement.
struct ParetoPoint {
  double cost = 0.0;
  double lp_norm = 0.0;
  std::vector<Index> assignment;  // machine per job
};

// Exhaustive offline frontier of (opening cost, lp load norm) over every
// machine choice per job. Enumeration treats job 0 as the outermost digit,
// machines ascending, so ties resolve to the earliest assignment in that
// order. Guarded to m^n <= 1e7 enumerations.
inline std::vector<ParetoPoint> brute_force_opt(const Instance& inst) {
  const Index m = inst.machines();
  const Index n = inst.jobs();
  if (static_cast<double>(n) * std::log(static_cast<double>(m)) > std::log(1e7) + 1e-9)
    throw TooLarge("m^n exceeds the enumeration cap of 1e7");

  // cheapest load norm seen per distinct cost value
  std::map<double, std::pair<double, std::vector<Index>>> best;
  std::vector<Index> pick(static_cast<size_t>(n), 0);
  Vector loads = Vector::Zero(m);
  std::vector<char> used(static_cast<size_t>(m), 0);

  auto record = [&]() {
    double cost = 0.0;
    for (Index i = 0; i < m; ++i)
      if (used[static_cast<size_t>(i)]) cost += inst.costs[i];
    const double norm = lp_norm(loads, inst.norm_p);
    auto it = best.find(cost);
    if (it == best.end())
      best.emplace(cost, std::make_pair(norm, pick));
    else if (norm < it->second.first)
      it->second = {norm, pick};
  };

  // explicit-stack DFS over jobs; each level tries machines ascending
  std::vector<Index> usage_count(static_cast<size_t>(m), 0);
  auto descend = [&](auto&& self, Index j) -> void {
    if (j == n) { record(); return; }
    for (Index i = 0; i < m; ++i) {
      const double q = inst.proc(j, i);
      if (!schedulable(q)) continue;
      pick[static_cast<size_t>(j)] = i;
      loads[i] += q;
      if (usage_count[static_cast<size_t>(i)]++ == 0) used[static_cast<size_t>(i)] = 1;
      self(self, j + 1);
      if (--usage_count[static_cast<size_t>(i)] == 0) used[static_cast<size_t>(i)] = 0;
      loads[i] -= q;
    }
  };
  descend(descend, 0);

  std::vector<ParetoPoint> frontier;
  double best_norm = kUnschedulable;
  for (const auto& [cost, entry] : best) {
    if (entry.first >= best_norm) continue;  // dominated by a cheaper point
    best_norm = entry.first;
    frontier.push_back({cost, entry.first, entry.second});
  }
  return frontier;
}

struct GreedyResult {
  std::vector<Index> assignment;
  Vector loads;
  double lp_norm_value = 0.0;
  double cost = 0.0;  // zero when costs are ignored
};

// Cost-blind arrival-order greedy: each job goes where it raises the p-th
// power of the load vector the least, ties to the lower index. Written
// against std::pow on purpose so it shares no arithmetic helpers with the
// production assignment paths it cross-checks.
inline GreedyResult greedy_lp_norm(const Instance& inst, bool ignore_costs = false) {
  const Index m = inst.machines();
  const Index n = inst.jobs();
  GreedyResult g;
  g.loads = Vector::Zero(m);
  g.assignment.reserve(static_cast<size_t>(n));
  for (Index j = 0; j < n; ++j) {
    Index pick = -1;
    double best_inc = kUnschedulable;
    for (Index i = 0; i < m; ++i) {
      const double q = inst.proc(j, i);
      if (!schedulable(q)) continue;
      const double inc = std::pow(g.loads[i] + q, inst.norm_p) -
                         std::pow(g.loads[i], inst.norm_p);
      if (inc < best_inc) { best_inc = inc; pick = i; }
    }
    if (pick < 0) throw InvalidInstance("job " + std::to_string(j) + " runs on no machine");
    g.assignment.push_back(pick);
    g.loads[pick] += inst.proc(j, pick);
  }
  double mass = 0.0;
  for (Index i = 0; i < m; ++i)
    if (g.loads[i] > 0.0) mass += std::pow(g.loads[i], inst.norm_p);
  g.lp_norm_value = std::pow(mass, 1.0 / inst.norm_p);
  if (!ignore_costs) {
    std::vector<char> used(static_cast<size_t>(m), 0);
    for (Index i : g.assignment) used[static_cast<size_t>(i)] = 1;
    for (Index i = 0; i < m; ++i)
      if (used[static_cast<size_t>(i)]) g.cost += inst.costs[i];
  }
  return g;
}

struct MonteCarloSummary {
  double mean = 0.0;
  double stderr_value = 0.0;
  std::vector<double> values;
};

// Runs a seeded procedure with seeds base_seed, base_seed+1, ... and
// summarizes. Standard error is the sample standard deviation over
// sqrt(trials), zero for a single trial.
template <typename Procedure>
MonteCarloSummary monte_carlo(Procedure&& run, Index trials, uint64_t base_seed) {
  if (trials < 1) throw std::invalid_argument("at least one trial required");
  MonteCarloSummary mc;
  mc.values.reserve(static_cast<size_t>(trials));
  for (Index t = 0; t < trials; ++t)
    mc.values.push_back(run(base_seed + static_cast<uint64_t>(t)));
  double sum = 0.0;
  for (double v : mc.values) sum += v;
  mc.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (double v : mc.values) ss += (v - mc.mean) * (v - mc.mean);
    mc.stderr_value = std::sqrt(ss / static_cast<double>(trials - 1)) /
                      std::sqrt(static_cast<double>(trials));
  }
  return mc;
}

}  // namespace covsched
