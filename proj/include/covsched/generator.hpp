#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "covsched/instance.hpp"
#include "covsched/oracles.hpp"
#include "covsched/rng.hpp"
#include "covsched/types.hpp"

namespace covsched {

// Scalar distributions for instance sampling. SetCover draws each entry as
// 1 with the given density and unschedulable otherwise (processing times
// only), mimicking set-cover incidence.
struct DistSpec {
  enum Kind { Uniform, LogUniform, SetCover } kind = Uniform;
  double a = 0.0, b = 1.0;  // bounds; SetCover uses a as the density

  static DistSpec uniform(double lo, double hi) { return {Uniform, lo, hi}; }
  static DistSpec loguniform(double lo, double hi) { return {LogUniform, lo, hi}; }
  static DistSpec setcover(double density) { return {SetCover, density, 0.0}; }
};

struct GeneratorSpec {
  Index m = 2, n = 2;
  double norm_p = 1.0;
  DistSpec cost_dist = DistSpec::uniform(1.0, 10.0);
  DistSpec proc_dist = DistSpec::uniform(1.0, 10.0);
};

struct GeneratedInstance {
  Instance instance;
  bool certified = false;   // (C, L) sits on the brute-force frontier
  Index frontier_size = 0;  // 0 when the heuristic stamp was used
  Index frontier_index = -1;
};

namespace detail {

inline double draw_scalar(Rng& rng, const DistSpec& d) {
  switch (d.kind) {
    case DistSpec::Uniform: return rng.uniform(d.a, d.b);
    case DistSpec::LogUniform:
      if (!(d.a > 0.0) || !(d.b >= d.a))
        throw std::invalid_argument("loguniform needs 0 < lo <= hi");
      return std::exp(rng.uniform(std::log(d.a), std::log(d.b)));
    default: throw std::invalid_argument("scalar draw from a set-cover spec");
  }
}

}  // namespace detail

// Deterministic sampling given the seed. Draw order is fixed: one draw per
// machine cost (ascending), then one per processing entry in job-major
// order; a set-cover row that comes out empty takes one extra draw to place
// its forced entry. The guarantee pair is stamped from the brute-force
// frontier's median point when enumeration is feasible, otherwise from the
// cost-blind greedy schedule (labeled uncertified).
inline GeneratedInstance generate_instance(const GeneratorSpec& spec, uint64_t seed) {
  if (spec.m < 1 || spec.n < 1) throw std::invalid_argument("need m, n >= 1");
  if (spec.cost_dist.kind == DistSpec::SetCover)
    throw std::invalid_argument("machine costs cannot be set-cover distributed");

  Rng rng(seed);
  GeneratedInstance out;
  Instance& inst = out.instance;
  inst.norm_p = spec.norm_p;
  inst.costs.resize(spec.m);
  for (Index i = 0; i < spec.m; ++i)
    inst.costs[i] = detail::draw_scalar(rng, spec.cost_dist);

  inst.proc.resize(spec.n, spec.m);
  for (Index j = 0; j < spec.n; ++j) {
    bool any = false;
    for (Index i = 0; i < spec.m; ++i) {
      if (spec.proc_dist.kind == DistSpec::SetCover) {
        const bool hit = rng.uniform01() < spec.proc_dist.a;
        inst.proc(j, i) = hit ? 1.0 : kUnschedulable;
        any = any || hit;
      } else {
        inst.proc(j, i) = detail::draw_scalar(rng, spec.proc_dist);
        any = true;
      }
    }
    if (!any) inst.proc(j, rng.below(static_cast<uint64_t>(spec.m))) = 1.0;
  }

  try {
    const std::vector<ParetoPoint> frontier = brute_force_opt(inst);
    const auto idx = static_cast<Index>((frontier.size() - 1) / 2);
    const ParetoPoint& pt = frontier[static_cast<size_t>(idx)];
    inst.guarantee_cost = pt.cost;
    inst.guarantee_load = pt.lp_norm;
    out.certified = true;
    out.frontier_size = static_cast<Index>(frontier.size());
    out.frontier_index = idx;
  } catch (const TooLarge&) {
    const GreedyResult g = greedy_lp_norm(inst);
    inst.guarantee_cost = g.cost;
    inst.guarantee_load = g.lp_norm_value;
  }
  // degenerate stamps (all-zero costs or loads) would fail validation
  inst.guarantee_cost = std::max(inst.guarantee_cost, kAbsTol);
  inst.guarantee_load = std::max(inst.guarantee_load, kAbsTol);
  validate(inst);
  return out;
}

}  // namespace covsched
