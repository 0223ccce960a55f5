#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "covsched/instance.hpp"
#include "covsched/ocg.hpp"
#include "covsched/types.hpp"

namespace covsched {

// Mixed packing/covering problem: covering rows arrive online, the packing
// rows P x <= p are known up front and only their violation is priced.
// d_max and the coefficient extremes describe the whole stream and are
// declared by the caller (the online model reveals them in advance).
struct OmpcProblem {
  Matrix packing;   // r x m, entries >= 0, every row somewhere positive
  Vector rhs;       // r, positive
  double norm_p = 1.0;
  Index d_max = 0;  // max variables in any packing or covering constraint
  double c_max = 1.0, c_min = 1.0;  // covering coefficient extremes
  double p_max = 1.0, p_min = 1.0;  // packing coefficient extremes

  Index rows() const { return packing.rows(); }
  Index vars() const { return packing.cols(); }
  double rho() const { return c_max / c_min; }
  double kappa() const { return p_max / p_min; }
};

inline void validate(const OmpcProblem& pr) {
  if (pr.rows() < 1 || pr.vars() < 1)
    throw std::invalid_argument("packing matrix must be non-empty");
  if (pr.rhs.size() != pr.rows())
    throw std::invalid_argument("one rhs entry per packing row required");
  for (Index k = 0; k < pr.rows(); ++k) {
    if (!(pr.rhs[k] > 0.0)) throw std::invalid_argument("packing rhs must be positive");
    if (pr.packing.row(k).maxCoeff() <= 0.0)
      throw std::invalid_argument("packing row " + std::to_string(k) + " is all zero");
  }
  if (pr.packing.minCoeff() < 0.0)
    throw std::invalid_argument("packing coefficients must be >= 0");
  if (pr.d_max < 1 || pr.d_max > pr.vars())
    throw std::invalid_argument("d_max must lie in [1, #vars]");
  if (!(pr.c_min > 0.0) || pr.c_max < pr.c_min || !(pr.p_min > 0.0) || pr.p_max < pr.p_min)
    throw std::invalid_argument("coefficient extremes are inconsistent");
  if (!(pr.norm_p >= 1.0) || pr.norm_p > max_norm_p(pr.rows()))
    throw std::invalid_argument("violation norm exponent out of range");
}

// Start-point scale for the violation objective; guarantees the start point
// is no more violated than any covering-feasible reference.
inline double gamma_for_ompc(const OmpcProblem& pr) {
  return static_cast<double>(pr.d_max) * pr.c_max * pr.kappa();
}

// Per-row violations lambda_k = (P x)_k / p_k.
inline Vector packing_violations(const OmpcProblem& pr, const Vector& x) {
  return (pr.packing * x).cwiseQuotient(pr.rhs);
}

inline double violation_norm(const OmpcProblem& pr, const Vector& x) {
  return lp_norm(packing_violations(pr, x), pr.norm_p);
}

// Violation objective handed to the covering solver: f(x) = sum_k lambda_k^p.
// Working with the p-th power rather than the norm keeps the gradient
// coordinates monotone under growth (all Hessian entries are >= 0 when
// P >= 0), which is what the solver's dual-balance certificate relies on,
// and makes beta = p exact (Euler: sum x_i df/dx_i = p f). The reported
// violation norm is value^(1/p). Gradient at x = 0 is taken as its limit, 0
// for p > 1.
inline ConvexObjective make_lp_violation_objective(const OmpcProblem& pr) {
  validate(pr);
  ConvexObjective f;
  f.name = "lp-violation";
  f.beta_measure = pr.norm_p;
  f.gamma_scale = gamma_for_ompc(pr);
  const Matrix P = pr.packing;
  const Vector rhs = pr.rhs;
  const double p = pr.norm_p;
  f.value = [P, rhs, p](const Vector& x) {
    const Vector lam = (P * x).cwiseQuotient(rhs);
    return lp_pow_sum(lam, p);
  };
  f.gradient = [P, rhs, p](const Vector& x) {
    const Vector lam = (P * x).cwiseQuotient(rhs);
    Vector g = Vector::Zero(x.size());
    for (Index k = 0; k < P.rows(); ++k) {
      if (lam[k] == 0.0 && p > 1.0) continue;
      const double w = p * (p == 1.0 ? 1.0 : powp(lam[k], p - 1.0)) / rhs[k];
      for (Index i = 0; i < P.cols(); ++i) g[i] += w * P(k, i);
    }
    return g;
  };
  return f;
}

struct SolverNotMonotone : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One adaptive round of the two-block forcing procedure.
struct AdversaryRound {
  Index level_node = 0;                 // tree node whose children are probed
  std::vector<Index> constraint_vars;   // support of the presented row
  std::vector<double> response;         // solver values on that support, after
  double block_mass_left = 0.0, block_mass_right = 0.0;
  Index removed_var = -1;
  int removed_side = 0;                 // 1 or 2
};

struct AdversaryLevel {
  Index node = 0;                // parent whose two children were probed
  Index block_left = 0, block_right = 0;
  double weight_left = 0.0, weight_right = 0.0;  // full block mass at level end
  int emptied_side = 0;          // side whose alive set ran out
  double certificate = 0.0;      // max(weight_left, weight_right)
  double harmonic_half = 0.0;    // H_d / 2
  Index witness_var = -1;        // never-removed variable of the surviving side
};

struct AdversaryTranscript {
  Index d = 0, r = 0;
  Index num_vars = 0;
  std::vector<AdversaryRound> rounds;
  std::vector<AdversaryLevel> levels;
  Index final_node = 0;           // leaf reached by the heavier-child descent
  Vector final_x;
  Vector witness;                 // offline solution, weight 1 per level witness
  Vector solver_violations;       // packing violations lambda per leaf, solver
  Vector witness_violations;      // same for the witness
  double solver_violation_norm = 0.0;
  double witness_violation_norm = 0.0;
};

inline double harmonic(Index d) {
  double h = 0.0;
  for (Index k = 1; k <= d; ++k) h += 1.0 / static_cast<double>(k);
  return h;
}

namespace detail {
// Complete binary tree with r leaves, heap-numbered from 1; every non-root
// node owns one block of d consecutive variables.
inline Index block_of_node(Index node) { return node - 2; }
inline Index block_var(Index block, Index v, Index d) { return block * d + v; }
}  // namespace detail

// Packing rows of the tree instance: one row per leaf, coefficient 1 on
// every variable of every block along the root-to-leaf path, rhs 1.
inline OmpcProblem adversary_problem(Index d, Index r, double norm_p = 1.0) {
  if (d < 2) throw std::invalid_argument("block size d must be at least 2");
  if (r < 2 || (r & (r - 1)) != 0)
    throw std::invalid_argument("leaf count r must be a power of two, >= 2");
  const Index vars = 2 * (r - 1) * d;
  OmpcProblem pr;
  pr.packing = Matrix::Zero(r, vars);
  pr.rhs = Vector::Ones(r);
  for (Index leaf = 0; leaf < r; ++leaf) {
    for (Index node = r + leaf; node >= 2; node /= 2) {
      const Index b = detail::block_of_node(node);
      for (Index v = 0; v < d; ++v) pr.packing(leaf, detail::block_var(b, v, d)) = 1.0;
    }
  }
  pr.norm_p = norm_p;
  // every covering row the adversary presents is 0/1 over at most 2d vars
  pr.d_max = 2 * d;
  pr.c_max = pr.c_min = 1.0;
  pr.p_max = pr.p_min = 1.0;
  return pr;
}

// Drive any monotone online covering solver down the tree. Per level the
// two-block procedure presents the union of the alive sets as a covering
// row; after each response the side holding the larger alive mass loses its
// largest variable (constraint forces alive mass >= 1, so that side holds
// >= 1/2 and the removed variable >= 1/(2*alive)). A side only empties
// after removals at alive counts d..1, so the emptied block is certified to
// carry at least H_d/2. Recursion follows the heavier child by total block
// mass. Solver must expose process(row) and values().
template <typename Solver>
AdversaryTranscript run_lower_bound_adversary(Index d, Index r, Solver& solver,
                                              double norm_p = 1.0) {
  const OmpcProblem pr = adversary_problem(d, r, norm_p);
  const Index vars = pr.vars();
  if (solver.values().size() != vars)
    throw std::invalid_argument("solver dimension does not match 2(r-1)d");

  AdversaryTranscript tr;
  tr.d = d;
  tr.r = r;
  tr.num_vars = vars;
  tr.witness = Vector::Zero(vars);
  Vector prev = solver.values();

  const double hd_half = harmonic(d) / 2.0;
  Index node = 1;
  while (2 * node + 1 < 2 * r) {  // descend while node still has children
    const Index c1 = 2 * node, c2 = 2 * node + 1;
    const Index b1 = detail::block_of_node(c1), b2 = detail::block_of_node(c2);
    std::vector<char> alive1(static_cast<size_t>(d), 1), alive2(static_cast<size_t>(d), 1);
    Index alive1_count = d, alive2_count = d;

    while (alive1_count > 0 && alive2_count > 0) {
      Vector row = Vector::Zero(vars);
      std::vector<Index> support;
      for (Index v = 0; v < d; ++v) {
        if (alive1[static_cast<size_t>(v)]) {
          row[detail::block_var(b1, v, d)] = 1.0;
          support.push_back(detail::block_var(b1, v, d));
        }
      }
      for (Index v = 0; v < d; ++v) {
        if (alive2[static_cast<size_t>(v)]) {
          row[detail::block_var(b2, v, d)] = 1.0;
          support.push_back(detail::block_var(b2, v, d));
        }
      }
      solver.process(row);
      const Vector& cur = solver.values();
      for (Index i = 0; i < vars; ++i)
        if (cur[i] < prev[i] - 1e-12)
          throw SolverNotMonotone("variable " + std::to_string(i) + " decreased");
      prev = cur;

      double mass1 = 0.0, mass2 = 0.0;
      for (Index v = 0; v < d; ++v) {
        if (alive1[static_cast<size_t>(v)]) mass1 += cur[detail::block_var(b1, v, d)];
        if (alive2[static_cast<size_t>(v)]) mass2 += cur[detail::block_var(b2, v, d)];
      }
      const int side = mass1 >= mass2 ? 1 : 2;
      const Index block = side == 1 ? b1 : b2;
      auto& alive = side == 1 ? alive1 : alive2;
      auto& count = side == 1 ? alive1_count : alive2_count;
      Index best = -1;
      double best_val = -1.0;
      for (Index v = 0; v < d; ++v) {
        if (!alive[static_cast<size_t>(v)]) continue;
        const double val = cur[detail::block_var(block, v, d)];
        if (val > best_val) { best_val = val; best = v; }
      }
      alive[static_cast<size_t>(best)] = 0;
      --count;

      AdversaryRound round;
      round.level_node = node;
      round.constraint_vars = std::move(support);
      for (Index gi : round.constraint_vars) round.response.push_back(cur[gi]);
      round.removed_var = detail::block_var(block, best, d);
      round.removed_side = side;
      double full1 = 0.0, full2 = 0.0;
      for (Index v = 0; v < d; ++v) {
        full1 += cur[detail::block_var(b1, v, d)];
        full2 += cur[detail::block_var(b2, v, d)];
      }
      round.block_mass_left = full1;
      round.block_mass_right = full2;
      tr.rounds.push_back(std::move(round));
    }

    AdversaryLevel lvl;
    lvl.node = node;
    lvl.block_left = b1;
    lvl.block_right = b2;
    const Vector& cur = solver.values();
    for (Index v = 0; v < d; ++v) {
      lvl.weight_left += cur[detail::block_var(b1, v, d)];
      lvl.weight_right += cur[detail::block_var(b2, v, d)];
    }
    lvl.emptied_side = alive1_count == 0 ? 1 : 2;
    lvl.certificate = std::max(lvl.weight_left, lvl.weight_right);
    lvl.harmonic_half = hd_half;
    // the surviving side still has variables that appeared in every round of
    // this level; weight 1 on the lowest-indexed one satisfies them all
    const auto& alive = lvl.emptied_side == 1 ? alive2 : alive1;
    const Index wblock = lvl.emptied_side == 1 ? b2 : b1;
    for (Index v = 0; v < d; ++v)
      if (alive[static_cast<size_t>(v)]) {
        lvl.witness_var = detail::block_var(wblock, v, d);
        break;
      }
    tr.witness[lvl.witness_var] = 1.0;
    tr.levels.push_back(lvl);

    node = lvl.weight_left >= lvl.weight_right ? c1 : c2;
  }

  tr.final_node = node;
  tr.final_x = solver.values();
  tr.solver_violations = packing_violations(pr, tr.final_x);
  tr.witness_violations = packing_violations(pr, tr.witness);
  tr.solver_violation_norm = lp_norm(tr.solver_violations, norm_p);
  tr.witness_violation_norm = lp_norm(tr.witness_violations, norm_p);
  return tr;
}

// Adapter exposing an OCG state as the solver interface the adversary
// expects.
struct OcgSolverAdapter {
  OcgState state;
  void process(const Vector& row) { process_constraint(state, row); }
  const Vector& values() const { return state.x; }
};

}  // namespace covsched
