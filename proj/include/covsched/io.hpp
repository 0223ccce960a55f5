#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "covsched/fractional.hpp"
#include "covsched/instance.hpp"
#include "covsched/rounding.hpp"
#include "covsched/types.hpp"

namespace covsched {

using ordered_json = nlohmann::ordered_json;

// --- instance files ---------------------------------------------------
// {"costs":[...], "proc":[[...]], "p":..., "C":..., "L":..., "meta":{...}}
// proc row j lists job j's processing time per machine; null marks an
// unschedulable pair. "meta" is free-form and round-trips untouched.

inline ordered_json instance_to_json(const Instance& inst,
                                     ordered_json meta = ordered_json()) {
  ordered_json j;
  j["costs"] = ordered_json::array();
  for (Index i = 0; i < inst.machines(); ++i) j["costs"].push_back(inst.costs[i]);
  j["proc"] = ordered_json::array();
  for (Index r = 0; r < inst.jobs(); ++r) {
    ordered_json row = ordered_json::array();
    for (Index i = 0; i < inst.machines(); ++i) {
      const double q = inst.proc(r, i);
      if (schedulable(q)) row.push_back(q); else row.push_back(nullptr);
    }
    j["proc"].push_back(std::move(row));
  }
  j["p"] = inst.norm_p;
  j["C"] = inst.guarantee_cost;
  j["L"] = inst.guarantee_load;
  if (!meta.is_null()) j["meta"] = std::move(meta);
  return j;
}

inline Instance instance_from_json(const ordered_json& j) {
  Instance inst;
  const auto& costs = j.at("costs");
  inst.costs.resize(static_cast<Index>(costs.size()));
  for (Index i = 0; i < inst.costs.size(); ++i)
    inst.costs[i] = costs.at(static_cast<size_t>(i)).get<double>();
  const auto& proc = j.at("proc");
  const auto n = static_cast<Index>(proc.size());
  inst.proc.resize(n, inst.costs.size());
  for (Index r = 0; r < n; ++r) {
    const auto& row = proc.at(static_cast<size_t>(r));
    if (static_cast<Index>(row.size()) != inst.costs.size())
      throw InvalidInstance("proc row " + std::to_string(r) + " has wrong width");
    for (Index i = 0; i < inst.costs.size(); ++i) {
      const auto& cell = row.at(static_cast<size_t>(i));
      inst.proc(r, i) = cell.is_null() ? kUnschedulable : cell.get<double>();
    }
  }
  inst.norm_p = j.at("p").get<double>();
  inst.guarantee_cost = j.at("C").get<double>();
  inst.guarantee_load = j.at("L").get<double>();
  validate(inst);
  return inst;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void save_json(const std::string& path, const ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

inline ordered_json load_json(const std::string& path) {
  return ordered_json::parse(read_text_file(path));
}

// --- fractional solution dump -----------------------------------------
// The rounding schemes replay from the per-job snapshots:
// {"x_initial":[...], "x_after":[[...]], "y":[[...]]}

inline ordered_json fractional_to_json(const FractionalState& st) {
  ordered_json j;
  j["x_initial"] = ordered_json::array();
  for (Index i = 0; i < st.x_initial.size(); ++i) j["x_initial"].push_back(st.x_initial[i]);
  j["x_after"] = ordered_json::array();
  for (const Vector& x : st.x_after_job) {
    ordered_json row = ordered_json::array();
    for (Index i = 0; i < x.size(); ++i) row.push_back(x[i]);
    j["x_after"].push_back(std::move(row));
  }
  j["y"] = ordered_json::array();
  for (Index r = 0; r < st.y.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Index i = 0; i < st.y.cols(); ++i) row.push_back(st.y(r, i));
    j["y"].push_back(std::move(row));
  }
  return j;
}

// Enough of a FractionalState to drive the rounding schemes. Phase
// accumulators are not serialized; rehydrate_phases rebuilds a usable
// stand-in before anything potential-based touches the state.
inline FractionalState fractional_from_json(const ordered_json& j) {
  FractionalState st;
  const auto& x0 = j.at("x_initial");
  st.x_initial.resize(static_cast<Index>(x0.size()));
  for (Index i = 0; i < st.x_initial.size(); ++i)
    st.x_initial[i] = x0.at(static_cast<size_t>(i)).get<double>();
  for (const auto& row : j.at("x_after")) {
    Vector x(static_cast<Index>(row.size()));
    for (Index i = 0; i < x.size(); ++i) x[i] = row.at(static_cast<size_t>(i)).get<double>();
    st.x_after_job.push_back(std::move(x));
  }
  const auto& y = j.at("y");
  const auto n = static_cast<Index>(y.size());
  st.y.resize(n, st.x_initial.size());
  for (Index r = 0; r < n; ++r) {
    const auto& row = y.at(static_cast<size_t>(r));
    for (Index i = 0; i < st.y.cols(); ++i)
      st.y(r, i) = row.at(static_cast<size_t>(i)).get<double>();
  }
  st.x = st.x_after_job.empty() ? st.x_initial : st.x_after_job.back();
  return st;
}

// Rebuild the phase bookkeeping of a deserialized state. The split of a
// machine's load between its partial and full phase is historical and not
// recoverable, so every unit on a fully open machine is booked as
// full-phase mass. That never understates the proxy load (partial-phase
// credits are bounded by the c^(1/p) x term they would otherwise hide in),
// so potentials computed from a rehydrated state upper-bound the live run's
// and every "<= potential" certificate stays sound.
inline void rehydrate_phases(FractionalState& st, const ScaledInstance& s) {
  const Index m = st.x.size();
  const Index n = st.y.rows();
  st.j0_load = st.j0_loadp = st.j1_load = st.j1_loadp = Vector::Zero(m);
  st.fully_open.assign(static_cast<size_t>(m), 0);
  for (Index i = 0; i < m; ++i) {
    const bool full = st.x[i] >= 1.0 - 1e-12;
    st.fully_open[static_cast<size_t>(i)] = full ? 1 : 0;
    for (Index j = 0; j < n; ++j) {
      const double yji = st.y(j, i);
      if (yji <= 0.0 || !schedulable(s.proc(j, i))) continue;
      (full ? st.j1_load : st.j0_load)[i] += yji * s.proc(j, i);
      (full ? st.j1_loadp : st.j0_loadp)[i] += yji * s.proc_pow(j, i);
    }
  }
  const double md = static_cast<double>(m);
  st.N = std::max(static_cast<double>(n) * md * std::log(md), 1.0);
}

// --- CSV emission ------------------------------------------------------
// Numbers print as %.17g so identical runs emit identical bytes.

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string dual_ledger_csv(const std::vector<double>& duals) {
  std::string out = "constraint_index,y_j\n";
  for (size_t k = 0; k < duals.size(); ++k)
    out += std::to_string(k) + "," + csv_num(duals[k]) + "\n";
  return out;
}

struct FractionalCsvRow {
  std::string instance_id;
  Index m = 0, n = 0;
  double p = 1.0;
  double phi = 0.0, cost = 0.0, objective = 0.0;
  Index small_steps = 0, regular_steps = 0;
};

inline std::string fractional_csv(const std::vector<FractionalCsvRow>& rows) {
  std::string out = "instance_id,m,n,p,Phi,cost,objective,small_steps,regular_steps\n";
  for (const auto& r : rows) {
    out += r.instance_id + "," + std::to_string(r.m) + "," + std::to_string(r.n) + "," +
           csv_num(r.p) + "," + csv_num(r.phi) + "," + csv_num(r.cost) + "," +
           csv_num(r.objective) + "," + std::to_string(r.small_steps) + "," +
           std::to_string(r.regular_steps) + "\n";
  }
  return out;
}

struct RoundingCsvRow {
  Index trial = 0;
  uint64_t seed = 0;
  Index case1 = 0, case2 = 0, case3 = 0;
  double blue_cost = 0.0, red_cost = 0.0, blue_norm = 0.0, red_norm = 0.0;
};

inline std::string rounding_csv(const std::vector<RoundingCsvRow>& rows) {
  std::string out = "trial,seed,case1,case2,case3,blue_cost,red_cost,blue_norm,red_norm\n";
  for (const auto& r : rows) {
    out += std::to_string(r.trial) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.case1) + "," + std::to_string(r.case2) + "," +
           std::to_string(r.case3) + "," + csv_num(r.blue_cost) + "," + csv_num(r.red_cost) +
           "," + csv_num(r.blue_norm) + "," + csv_num(r.red_norm) + "\n";
  }
  return out;
}

inline std::string step_log_csv(const std::vector<StepRecord>& log) {
  std::string out = "step_index,job,small,prefix,phi_before,phi_after\n";
  for (const auto& s : log) {
    out += std::to_string(s.index) + "," + std::to_string(s.job) + "," +
           (s.small ? "1" : "0") + "," + std::to_string(s.prefix_size) + "," +
           csv_num(s.phi_before) + "," + csv_num(s.phi_after) + "\n";
  }
  return out;
}

// --- covering-constraint stream ----------------------------------------
// One row per line: "k: i1=c1 i2=c2 ...". The leading index is an echo aid
// only; '#' starts a comment line.

inline std::vector<std::vector<std::pair<Index, double>>> parse_constraint_stream(
    const std::string& body) {
  std::vector<std::vector<std::pair<Index, double>>> rows;
  std::istringstream lines(body);
  std::string line;
  while (std::getline(lines, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("constraint line lacks ':' separator: " + line);
    std::istringstream toks(line.substr(colon + 1));
    std::vector<std::pair<Index, double>> row;
    std::string tok;
    while (toks >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("constraint term lacks '=': " + tok);
      row.emplace_back(static_cast<Index>(std::stoll(tok.substr(0, eq))),
                       std::stod(tok.substr(eq + 1)));
    }
    if (row.empty()) throw std::runtime_error("constraint line has no terms: " + line);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Vector dense_row(const std::vector<std::pair<Index, double>>& sparse, Index dim) {
  Vector row = Vector::Zero(dim);
  for (const auto& [i, c] : sparse) {
    if (i < 0 || i >= dim)
      throw std::runtime_error("constraint index " + std::to_string(i) + " out of range");
    row[i] = c;
  }
  return row;
}

}  // namespace covsched
