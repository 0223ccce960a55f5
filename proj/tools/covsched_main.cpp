// Command-line driver: instance generation, the fractional and rounding
// pipelines, the covering solver on raw constraint streams, the adversary,
// and the brute-force oracle. Every run writes a schema_version 1 JSON
// report; repeated runs with the same flags produce byte-identical output
// except for the wall_clock_ms field.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>
#include <typeinfo>
#include <vector>

#include <CLI11.hpp>
#include <cxxabi.h>

#include "covsched/fractional.hpp"
#include "covsched/generator.hpp"
#include "covsched/instance.hpp"
#include "covsched/io.hpp"
#include "covsched/ocg.hpp"
#include "covsched/ompc.hpp"
#include "covsched/oracles.hpp"
#include "covsched/rounding.hpp"
#include "covsched/rounding_l1.hpp"

namespace {

using covsched::Index;
using covsched::Vector;
using covsched::ordered_json;

int64_t wall_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// "uniform:1,10" | "loguniform:0.5,8" | "setcover:0.4"
covsched::DistSpec parse_dist(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    size_t pos = 0;
    while (pos < rest.size()) {
      size_t used = 0;
      args.push_back(std::stod(rest.substr(pos), &used));
      pos += used;
      if (pos < rest.size() && rest[pos] == ',') ++pos;
    }
  }
  if (kind == "uniform" && args.size() == 2) return covsched::DistSpec::uniform(args[0], args[1]);
  if (kind == "loguniform" && args.size() == 2)
    return covsched::DistSpec::loguniform(args[0], args[1]);
  if (kind == "setcover" && args.size() == 1) return covsched::DistSpec::setcover(args[0]);
  throw CLI::ValidationError("--dist", "expected uniform:a,b | loguniform:a,b | setcover:d");
}

ordered_json vec_json(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json report_skeleton(const std::string& command) {
  ordered_json rep;
  rep["schema_version"] = 1;
  rep["command"] = command;
  rep["config"] = ordered_json::object();
  return rep;
}

void finish_report(ordered_json& rep, const std::string& out,
                   std::chrono::steady_clock::time_point t0) {
  rep["wall_clock_ms"] = wall_ms(t0);
  if (out.empty()) {
    std::fputs((rep.dump(2) + "\n").c_str(), stdout);
  } else {
    covsched::save_json(out, rep);
  }
}

struct GenArgs {
  Index m = 2, n = 2;
  double p = 1.0;
  std::string cost_dist = "uniform:1,10", proc_dist = "uniform:1,10";
  uint64_t seed = 1;
  std::string out;
};

int run_gen(const GenArgs& a) {
  covsched::GeneratorSpec spec;
  spec.m = a.m;
  spec.n = a.n;
  spec.norm_p = a.p;
  spec.cost_dist = parse_dist(a.cost_dist);
  spec.proc_dist = parse_dist(a.proc_dist);
  const covsched::GeneratedInstance gen = covsched::generate_instance(spec, a.seed);
  ordered_json meta;
  meta["seed"] = a.seed;
  meta["m"] = a.m;
  meta["n"] = a.n;
  meta["cost_dist"] = a.cost_dist;
  meta["proc_dist"] = a.proc_dist;
  meta["certified"] = gen.certified;
  if (gen.certified) {
    meta["frontier_size"] = gen.frontier_size;
    meta["frontier_index"] = gen.frontier_index;
  }
  const ordered_json j = covsched::instance_to_json(gen.instance, meta);
  if (a.out.empty()) std::fputs((j.dump(2) + "\n").c_str(), stdout);
  else covsched::save_json(a.out, j);
  return 0;
}

struct FracArgs {
  std::string instance, out, csv, step_log, frac_out;
  bool descending_psi = false;
  bool doubling = false;
};

// With --doubling the stamped cost guarantee is ignored and tiers
// C' = (min cost) * 2^k are tried in order; the first tier whose surviving
// machines can still run every job is reported.
int run_frac(const FracArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  covsched::Instance inst = covsched::instance_from_json(covsched::load_json(a.instance));

  ordered_json tiers = ordered_json::array();
  if (a.doubling) {
    const double c_min = std::max(inst.costs.minCoeff(), covsched::kAbsTol);
    for (int k = 0; k < 64; ++k) {
      const double budget = c_min * std::pow(2.0, k);
      covsched::Instance probe = inst;
      probe.guarantee_cost = budget;
      bool feasible = true;
      try {
        const covsched::ScaledInstance s = covsched::preprocess(probe);
        for (Index j = 0; feasible && j < s.jobs(); ++j) {
          bool any = false;
          for (Index i = 0; i < s.machines(); ++i) any = any || covsched::schedulable(s.proc(j, i));
          feasible = any;
        }
      } catch (const covsched::AllMachinesDiscarded&) {
        feasible = false;
      }
      tiers.push_back({{"k", k}, {"budget", budget}, {"feasible", feasible}});
      if (feasible) { inst.guarantee_cost = budget; break; }
    }
  }

  const covsched::ScaledInstance s = covsched::preprocess(inst);
  covsched::FractionalOptions opt;
  opt.descending_psi = a.descending_psi;
  opt.keep_log = !a.step_log.empty();
  const covsched::FractionalState st = covsched::run_fractional(s, inst.jobs(), opt);
  const covsched::FractionalReport rep = covsched::fractional_report(st, s);

  double max_cover_err = 0.0, max_ratio = 0.0;
  for (Index j = 0; j < st.y.rows(); ++j) {
    max_cover_err = std::max(max_cover_err, std::abs(st.y.row(j).sum() - 1.0));
    for (Index i = 0; i < st.y.cols(); ++i)
      if (st.x[i] > 0.0) max_ratio = std::max(max_ratio, st.y(j, i) / st.x[i]);
  }

  ordered_json out = report_skeleton("frac");
  out["config"] = {{"instance", a.instance},
                   {"descending_psi", a.descending_psi},
                   {"doubling", a.doubling}};
  if (a.doubling) out["tiers"] = tiers;
  out["preprocess"] = {{"machines_kept", s.machines()},
                       {"beta_scale", s.beta_scale},
                       {"proc_scale", s.proc_scale}};
  out["metrics"] = {{"Phi", rep.potential},
                    {"cost", rep.cost},
                    {"objective", rep.objective},
                    {"cost_le_Phi", rep.cost <= rep.potential * (1.0 + covsched::kRelTol)},
                    {"objective_le_2Phi",
                     rep.objective <= 2.0 * rep.potential * (1.0 + covsched::kRelTol)},
                    {"potential_trend", rep.potential_trend},
                    {"small_steps", rep.small_steps},
                    {"regular_steps", rep.regular_steps},
                    {"max_cover_error", max_cover_err},
                    {"max_y_over_x", max_ratio},
                    {"realized_partial_load", vec_json(st.j0_load)}};

  if (!a.csv.empty()) {
    covsched::FractionalCsvRow row;
    row.instance_id = a.instance;
    row.m = s.machines();
    row.n = s.jobs();
    row.p = s.norm_p;
    row.phi = rep.potential;
    row.cost = rep.cost;
    row.objective = rep.objective;
    row.small_steps = rep.small_steps;
    row.regular_steps = rep.regular_steps;
    covsched::write_text_file(a.csv, covsched::fractional_csv({row}));
  }
  if (!a.step_log.empty())
    covsched::write_text_file(a.step_log, covsched::step_log_csv(st.log));
  if (!a.frac_out.empty())
    covsched::save_json(a.frac_out, covsched::fractional_to_json(st));
  finish_report(out, a.out, t0);
  return 0;
}

struct RoundArgs {
  std::string instance, frac_in, out, csv;
  double alpha = 0.0;  // 0 = scheme default
  Index trials = 1;
  uint64_t seed = 1;
  bool uniform_choice = false;  // l1 only
};

int run_round(const RoundArgs& a, bool l1) {
  const auto t0 = std::chrono::steady_clock::now();
  const covsched::Instance inst =
      covsched::instance_from_json(covsched::load_json(a.instance));
  if (l1 && inst.norm_p != 1.0)
    throw CLI::ValidationError("--instance", "round-l1 requires a p = 1 instance");
  const covsched::ScaledInstance s = covsched::preprocess(inst);

  covsched::FractionalState frac;
  if (a.frac_in.empty()) {
    frac = covsched::run_fractional(s, inst.jobs());
  } else {
    frac = covsched::fractional_from_json(covsched::load_json(a.frac_in));
    if (frac.y.cols() != s.machines())
      throw CLI::ValidationError("--frac-in", "solution does not match the instance");
    covsched::rehydrate_phases(frac, s);
  }
  const double phi = covsched::potential(frac, s).total;
  const double alpha = a.alpha > 0.0
                           ? a.alpha
                           : (l1 ? covsched::default_alpha_l1(inst.jobs())
                                 : covsched::default_alpha(s.machines(), inst.jobs()));

  std::vector<covsched::RoundingCsvRow> rows;
  double cost_sum = 0.0, cost_sq = 0.0;
  Index case_totals[4] = {0, 0, 0, 0};
  for (Index t = 0; t < a.trials; ++t) {
    const uint64_t seed = a.seed + static_cast<uint64_t>(t);
    covsched::RoundingState st =
        l1 ? covsched::run_rounding_l1(frac, s, alpha, seed, {a.uniform_choice})
           : covsched::run_rounding_lp(frac, s, alpha, seed);
    if (l1) covsched::l1_report(st, s, frac, phi);  // assert the certificates
    const covsched::RoundingReport rr = covsched::rounding_report(st, s, phi);
    covsched::RoundingCsvRow row;
    row.trial = t;
    row.seed = seed;
    row.case1 = st.case_counts[1];
    row.case2 = st.case_counts[2];
    row.case3 = st.case_counts[3];
    row.blue_cost = rr.blue_cost;
    row.red_cost = rr.red_cost;
    row.blue_norm = rr.blue_norm;
    row.red_norm = rr.red_norm;
    rows.push_back(row);
    cost_sum += rr.total_cost;
    cost_sq += rr.total_cost * rr.total_cost;
    for (int c = 1; c < 4; ++c) case_totals[c] += st.case_counts[c];
  }
  const double td = static_cast<double>(a.trials);
  const double mean = cost_sum / td;
  const double var = a.trials > 1 ? (cost_sq - td * mean * mean) / (td - 1.0) : 0.0;
  const double se = a.trials > 1 ? std::sqrt(std::max(var, 0.0) / td) : 0.0;

  ordered_json out = report_skeleton(l1 ? "round-l1" : "round-lp");
  out["config"] = {{"instance", a.instance}, {"alpha", alpha},
                   {"trials", a.trials},     {"seed", a.seed},
                   {"frac_in", a.frac_in},   {"uniform_choice", a.uniform_choice}};
  out["metrics"] = {
      {"Phi", phi},
      {"mean_total_cost", mean},
      {"stderr_total_cost", se},
      {"cost_bound_alpha_plus_1_Phi", (alpha + 1.0) * phi},
      {"mean_cost_within_bound", mean <= (alpha + 1.0) * phi + 4.0 * se},
      {"case_totals", {case_totals[1], case_totals[2], case_totals[3]}},
      {"jobs_per_trial", inst.jobs()}};
  if (!a.csv.empty()) covsched::write_text_file(a.csv, covsched::rounding_csv(rows));
  finish_report(out, a.out, t0);
  return 0;
}

struct OcgArgs {
  Index dim = 1;
  std::string weights;  // comma list for the linear objective
  std::string packing;  // JSON file switching to the violation objective
  std::string constraints, out, duals_csv;
  double gamma = 0.0, step_eps = 1e-3, c_min = 0.0;
  std::string x_star;  // comma list reference for the guarantee bound
};

int run_ocg(const OcgArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();

  covsched::ConvexObjective objective;
  if (!a.packing.empty()) {
    const ordered_json pj = covsched::load_json(a.packing);
    covsched::OmpcProblem pr;
    const auto& P = pj.at("P");
    const auto rows = static_cast<Index>(P.size());
    const auto cols = static_cast<Index>(P.at(0).size());
    pr.packing.resize(rows, cols);
    for (Index k = 0; k < rows; ++k)
      for (Index i = 0; i < cols; ++i)
        pr.packing(k, i) = P.at(static_cast<size_t>(k)).at(static_cast<size_t>(i)).get<double>();
    pr.rhs.resize(rows);
    for (Index k = 0; k < rows; ++k) pr.rhs[k] = pj.at("rhs").at(static_cast<size_t>(k)).get<double>();
    pr.norm_p = pj.value("p", 1.0);
    pr.d_max = pj.value("d_max", cols);
    pr.c_max = pj.value("c_max", 1.0);
    pr.c_min = pj.value("c_min", 1.0);
    double pmax = 0.0, pmin = covsched::kUnschedulable;
    for (Index k = 0; k < rows; ++k)
      for (Index i = 0; i < cols; ++i)
        if (pr.packing(k, i) > 0.0) {
          pmax = std::max(pmax, pr.packing(k, i));
          pmin = std::min(pmin, pr.packing(k, i));
        }
    pr.p_max = pmax;
    pr.p_min = pmin;
    if (pr.vars() != a.dim)
      throw CLI::ValidationError("--packing", "packing width must equal --dim");
    objective = covsched::make_lp_violation_objective(pr);
  } else {
    Vector w = Vector::Ones(a.dim);
    if (!a.weights.empty()) {
      size_t pos = 0;
      Index i = 0;
      while (pos < a.weights.size() && i < a.dim) {
        size_t used = 0;
        w[i++] = std::stod(a.weights.substr(pos), &used);
        pos += used;
        if (pos < a.weights.size() && a.weights[pos] == ',') ++pos;
      }
      if (i != a.dim)
        throw CLI::ValidationError("--weights", "need one weight per dimension");
    }
    const double gamma = a.gamma > 0.0 ? a.gamma : static_cast<double>(a.dim);
    objective = covsched::linear_objective(w, gamma);
  }
  if (a.gamma > 0.0) objective.gamma_scale = a.gamma;

  covsched::OcgState st = covsched::init_state(objective, a.dim, a.step_eps);
  if (a.c_min > 0.0) st.declared_c_min = a.c_min;

  const auto stream = covsched::parse_constraint_stream(covsched::read_text_file(a.constraints));
  for (const auto& sparse : stream)
    covsched::process_constraint(st, covsched::dense_row(sparse, a.dim));

  const covsched::StationarityReport sg = covsched::stationarity_gap(st);
  double dual_sum = 0.0;
  for (double y : st.duals) dual_sum += y;

  ordered_json out = report_skeleton("ocg");
  out["config"] = {{"dim", a.dim},
                   {"constraints", a.constraints},
                   {"step_eps", a.step_eps},
                   {"objective", a.packing.empty() ? "linear" : "lp-violation"},
                   {"gamma", objective.gamma_scale},
                   {"c_min_mode", a.c_min > 0.0 ? "declared" : "retrospective"}};
  double max_ratio = 0.0;
  for (Index i = 0; i < sg.ratios.size(); ++i) max_ratio = std::max(max_ratio, sg.ratios[i]);
  out["metrics"] = {{"f_start", st.f_start},
                    {"f_end", objective.value(st.x)},
                    {"dual_sum", dual_sum},
                    {"rate_bound_ok",
                     objective.value(st.x) - st.f_start <=
                         dual_sum * (1.0 + 2.0 * a.step_eps) + covsched::kAbsTol},
                    {"min_row_slack", covsched::min_row_slack(st)},
                    {"stationarity_max", max_ratio},
                    {"alpha", sg.alpha},
                    {"steps_taken", st.steps_taken},
                    {"x", vec_json(st.x)}};
  if (!a.x_star.empty()) {
    Vector xs = Vector::Zero(a.dim);
    size_t pos = 0;
    Index i = 0;
    while (pos < a.x_star.size() && i < a.dim) {
      size_t used = 0;
      xs[i++] = std::stod(a.x_star.substr(pos), &used);
      pos += used;
      if (pos < a.x_star.size() && a.x_star[pos] == ',') ++pos;
    }
    const covsched::GuaranteeReport g = covsched::guarantee_bound(st, xs);
    out["guarantee"] = {{"achieved", g.achieved},
                        {"bound", g.bound},
                        {"alpha", g.alpha},
                        {"beta", g.beta},
                        {"within_bound", g.within_bound}};
  }
  if (!a.duals_csv.empty())
    covsched::write_text_file(a.duals_csv, covsched::dual_ledger_csv(st.duals));
  finish_report(out, a.out, t0);
  return 0;
}

struct AdversaryArgs {
  Index d = 2, r = 2;
  double step_eps = 1e-3, p = 1.0;
  std::string out;
};

int run_adversary(const AdversaryArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const Index vars = 2 * (a.r - 1) * a.d;
  covsched::OcgSolverAdapter solver;
  solver.state = covsched::init_state(
      covsched::linear_objective(Vector::Ones(vars), static_cast<double>(vars)), vars,
      a.step_eps);
  solver.state.declared_c_min = 1.0;
  const covsched::AdversaryTranscript tr =
      covsched::run_lower_bound_adversary(a.d, a.r, solver, a.p);

  ordered_json out = report_skeleton("adversary");
  out["config"] = {{"d", a.d}, {"r", a.r}, {"step_eps", a.step_eps}, {"p", a.p}};
  ordered_json rounds = ordered_json::array();
  for (const auto& rd : tr.rounds) {
    ordered_json row;
    row["node"] = rd.level_node;
    row["vars"] = rd.constraint_vars;
    row["response"] = rd.response;
    row["mass_left"] = rd.block_mass_left;
    row["mass_right"] = rd.block_mass_right;
    row["removed_var"] = rd.removed_var;
    row["removed_side"] = rd.removed_side;
    rounds.push_back(std::move(row));
  }
  out["rounds"] = std::move(rounds);
  ordered_json levels = ordered_json::array();
  bool all_certified = true;
  for (const auto& lv : tr.levels) {
    const bool ok = lv.certificate >= lv.harmonic_half - 1e-6;
    all_certified = all_certified && ok;
    levels.push_back({{"node", lv.node},
                      {"weight_left", lv.weight_left},
                      {"weight_right", lv.weight_right},
                      {"certificate", lv.certificate},
                      {"harmonic_half", lv.harmonic_half},
                      {"certified", ok},
                      {"witness_var", lv.witness_var}});
  }
  out["levels"] = std::move(levels);
  out["metrics"] = {{"final_node", tr.final_node},
                    {"all_levels_certified", all_certified},
                    {"solver_violation_norm", tr.solver_violation_norm},
                    {"witness_violation_norm", tr.witness_violation_norm},
                    {"witness", vec_json(tr.witness)}};
  finish_report(out, a.out, t0);
  return all_certified ? 0 : 1;
}

struct BruteArgs {
  std::string instance, out;
};

int run_brute(const BruteArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const covsched::Instance inst =
      covsched::instance_from_json(covsched::load_json(a.instance));
  const std::vector<covsched::ParetoPoint> frontier = covsched::brute_force_opt(inst);
  ordered_json out = report_skeleton("brute");
  out["config"] = {{"instance", a.instance}};
  ordered_json pts = ordered_json::array();
  for (const auto& pt : frontier)
    pts.push_back({{"cost", pt.cost}, {"lp_norm", pt.lp_norm}, {"assignment", pt.assignment}});
  out["frontier"] = std::move(pts);
  finish_report(out, a.out, t0);
  return 0;
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
};

// Validate report files and emit a combined summary. Round-trips each
// input through the parser so schema drift is caught early.
int run_report(const ReportArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  ordered_json out = report_skeleton("report");
  out["config"] = {{"inputs", a.inputs}};
  ordered_json items = ordered_json::array();
  for (const std::string& path : a.inputs) {
    const ordered_json rep = covsched::load_json(path);
    if (!rep.contains("schema_version") || rep["schema_version"] != 1)
      throw std::runtime_error(path + ": unsupported report schema");
    if (ordered_json::parse(rep.dump()) != rep)
      throw std::runtime_error(path + ": report does not round-trip");
    ordered_json item;
    item["path"] = path;
    item["command"] = rep.value("command", "");
    if (rep.contains("metrics")) item["metrics"] = rep["metrics"];
    items.push_back(std::move(item));
  }
  out["reports"] = std::move(items);
  finish_report(out, a.out, t0);
  return 0;
}

std::string describe(const std::exception& e) {
  int status = 0;
  char* name = abi::__cxa_demangle(typeid(e).name(), nullptr, nullptr, &status);
  std::string type = status == 0 && name ? name : typeid(e).name();
  std::free(name);
  return type + ": " + e.what();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covering-based scheduling and online covering experiments"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* cgen = app.add_subcommand("gen", "generate a seeded instance with a certified guarantee pair");
  cgen->add_option("--m", gen.m, "machines")->check(CLI::PositiveNumber);
  cgen->add_option("--n", gen.n, "jobs")->check(CLI::PositiveNumber);
  cgen->add_option("--p", gen.p, "load norm exponent");
  cgen->add_option("--cost-dist", gen.cost_dist, "uniform:a,b | loguniform:a,b");
  cgen->add_option("--proc-dist", gen.proc_dist, "uniform:a,b | loguniform:a,b | setcover:density");
  cgen->add_option("--seed", gen.seed, "generator seed");
  cgen->add_option("--out", gen.out, "instance JSON path (default stdout)");

  FracArgs frac;
  auto* cfrac = app.add_subcommand("frac", "run the fractional assignment pipeline");
  cfrac->add_option("--instance", frac.instance, "instance JSON")->required();
  cfrac->add_option("--out", frac.out, "report JSON path (default stdout)");
  cfrac->add_option("--csv", frac.csv, "metrics CSV path");
  cfrac->add_option("--step-log", frac.step_log, "per-step CSV path");
  cfrac->add_option("--frac-out", frac.frac_out, "fractional solution JSON path");
  cfrac->add_flag("--descending-psi", frac.descending_psi,
                  "comparison mode: reverse the preference order");
  cfrac->add_flag("--doubling", frac.doubling, "find the cost budget by doubling guesses");

  RoundArgs rlp, rl1;
  auto* crlp = app.add_subcommand("round-lp", "randomized rounding, general norm");
  crlp->add_option("--instance", rlp.instance, "instance JSON")->required();
  crlp->add_option("--frac-in", rlp.frac_in, "precomputed fractional solution JSON");
  crlp->add_option("--alpha", rlp.alpha, "opening scale (default 48 ln(mn))");
  crlp->add_option("--trials", rlp.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  crlp->add_option("--seed", rlp.seed, "base seed");
  crlp->add_option("--out", rlp.out, "report JSON path (default stdout)");
  crlp->add_option("--csv", rlp.csv, "per-trial CSV path");

  auto* crl1 = app.add_subcommand("round-l1", "prefix-rule rounding, l1 norm");
  crl1->add_option("--instance", rl1.instance, "instance JSON (p must be 1)")->required();
  crl1->add_option("--frac-in", rl1.frac_in, "precomputed fractional solution JSON");
  crl1->add_option("--alpha", rl1.alpha, "opening scale (default 4 ln n)");
  crl1->add_option("--trials", rl1.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  crl1->add_option("--seed", rl1.seed, "base seed");
  crl1->add_option("--out", rl1.out, "report JSON path (default stdout)");
  crl1->add_option("--csv", rl1.csv, "per-trial CSV path");
  crl1->add_flag("--uniform-choice", rl1.uniform_choice,
                 "draw uniformly among open prefix members");

  OcgArgs ocg;
  auto* cocg = app.add_subcommand("ocg", "online covering solver on a constraint stream");
  cocg->add_option("--dim", ocg.dim, "number of variables")->required()->check(CLI::PositiveNumber);
  cocg->add_option("--constraints", ocg.constraints, "stream file: 'k: i=c ...'")->required();
  cocg->add_option("--weights", ocg.weights, "linear objective weights, comma list (default ones)");
  cocg->add_option("--packing", ocg.packing, "packing JSON {P, rhs, p}: use the violation objective");
  cocg->add_option("--gamma", ocg.gamma, "start-point scale override");
  cocg->add_option("--step-eps", ocg.step_eps, "per-step relative growth cap");
  cocg->add_option("--c-min", ocg.c_min, "declared smallest positive coefficient");
  cocg->add_option("--x-star", ocg.x_star, "feasible reference, comma list: report the bound");
  cocg->add_option("--out", ocg.out, "report JSON path (default stdout)");
  cocg->add_option("--duals-csv", ocg.duals_csv, "dual ledger CSV path");

  AdversaryArgs adv;
  auto* cadv = app.add_subcommand("adversary", "drive the solver through the forcing tree");
  cadv->add_option("--d", adv.d, "block size (>= 2)")->required();
  cadv->add_option("--r", adv.r, "leaf count (power of two)")->required();
  cadv->add_option("--step-eps", adv.step_eps, "solver step cap");
  cadv->add_option("--p", adv.p, "violation norm exponent");
  cadv->add_option("--out", adv.out, "transcript JSON path (default stdout)");

  BruteArgs brute;
  auto* cbrute = app.add_subcommand("brute", "exhaustive cost/load frontier");
  cbrute->add_option("--instance", brute.instance, "instance JSON")->required();
  cbrute->add_option("--out", brute.out, "frontier JSON path (default stdout)");

  ReportArgs report;
  auto* creport = app.add_subcommand("report", "validate and combine report files");
  creport->add_option("--in", report.inputs, "report JSON files")->required();
  creport->add_option("--out", report.out, "combined JSON path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cgen->parsed()) return run_gen(gen);
    if (cfrac->parsed()) return run_frac(frac);
    if (crlp->parsed()) return run_round(rlp, false);
    if (crl1->parsed()) return run_round(rl1, true);
    if (cocg->parsed()) return run_ocg(ocg);
    if (cadv->parsed()) return run_adversary(adv);
    if (cbrute->parsed()) return run_brute(brute);
    if (creport->parsed()) return run_report(report);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error [%s]\n", describe(e).c_str());
    return 1;
  }
  return 0;
}
