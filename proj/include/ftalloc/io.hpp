#pragma once

// JSON instance files and reports.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ftalloc/errors.hpp"
#include "ftalloc/oracle.hpp"
#include "ftalloc/rational.hpp"
#include "ftalloc/solver.hpp"

namespace ftalloc {

using ordered_json = nlohmann::ordered_json;

struct InstanceSpec {
  std::vector<Rational> probs;
  Rational theta;
  Rational epsilon = Rational(1, 10);
  Rational delta = Rational(1, 20);
};

// Numbers snap to the nearest rational with denominator <= 10^6; strings are exact.
inline Rational rational_from_json(const nlohmann::json& v, const std::string& field) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number()) return rational_from_double(v.get<double>());
  throw InvalidInput("field '" + field + "' must be a number or a rational string");
}

inline InstanceSpec parse_instance(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInput("instance must be a JSON object");
  for (const char* key : {"probs", "theta"})
    if (!j.contains(key)) throw InvalidInput(std::string("instance is missing '") + key + "'");
  if (!j["probs"].is_array()) throw InvalidInput("'probs' must be an array");
  InstanceSpec s;
  for (const auto& p : j["probs"]) s.probs.push_back(rational_from_json(p, "probs"));
  s.theta = rational_from_json(j["theta"], "theta");
  if (j.contains("epsilon")) s.epsilon = rational_from_json(j["epsilon"], "epsilon");
  if (j.contains("delta")) s.delta = rational_from_json(j["delta"], "delta");
  return s;
}

inline InstanceSpec parse_instance_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  return parse_instance(j);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline InstanceSpec load_instance(const std::string& path) { return parse_instance_text(read_file(path)); }

inline ordered_json instance_to_json(const InstanceSpec& s) {
  ordered_json j;
  j["probs"] = ordered_json::array();
  for (const auto& p : s.probs) j["probs"].push_back(to_string(p));
  j["theta"] = to_string(s.theta);
  j["epsilon"] = to_string(s.epsilon);
  j["delta"] = to_string(s.delta);
  return j;
}

inline ordered_json weights_json(std::span<const Rational> w) {
  ordered_json exact = ordered_json::array(), approx = ordered_json::array();
  for (const auto& x : w) {
    exact.push_back(to_string(x));
    approx.push_back(to_double(x));
  }
  ordered_json j;
  j["exact"] = std::move(exact);
  j["float"] = std::move(approx);
  return j;
}

inline ordered_json rational_json(const std::optional<Rational>& r) {
  if (!r) return nullptr;
  ordered_json j;
  j["exact"] = to_string(*r);
  j["float"] = to_double(*r);
  return j;
}

inline ordered_json config_json(const SolverConfig& c) {
  ordered_json j;
  j["mode"] = to_string(c.mode);
  j["c_l"] = to_string(c.c_L);
  j["kappa"] = c.kappa_override ? ordered_json(to_string(*c.kappa_override)) : ordered_json(nullptr);
  j["l_cap"] = c.L_cap ? ordered_json(*c.L_cap) : ordered_json(nullptr);
  j["mc_constant"] = to_string(c.mc_constant);
  j["seed"] = c.seed;
  j["exact_eval_max_n"] = c.exact_eval_max_n;
  j["state_space_limit"] = c.state_space_limit;
  // threads is omitted on purpose: it never changes the output
  return j;
}

inline ordered_json estimate_json(const ObjectiveEstimate& e) {
  ordered_json j;
  j["value"] = e.value;
  j["kind"] = to_string(e.kind);
  j["m"] = e.m;
  j["seed"] = e.seed;
  return j;
}

inline ordered_json report_to_json(const SolveReport& r, bool with_timings = false, bool with_pool = false) {
  ordered_json j;
  j["n"] = r.n;
  j["theta"] = to_string(r.theta);
  j["epsilon"] = to_string(r.epsilon);
  j["delta"] = to_string(r.delta);
  j["trivial"] = r.trivial;
  j["trivial_reason"] = r.trivial_reason ? ordered_json(to_string(*r.trivial_reason)) : ordered_json(nullptr);
  j["chosen"] = weights_json(r.chosen);
  j["provenance"] = r.provenance;
  j["obj_estimate"] = estimate_json(r.estimate);
  j["obj_exact"] = rational_json(r.exact);
  j["obj_exact_input"] = rational_json(r.exact_input);
  if (!r.trivial) {
    j["L"] = r.L;
    j["L_formula"] = r.L_formula;
    j["gamma"] = to_string(r.gamma);
    j["kappa_large_ci"] = r.kappa_large ? ordered_json(to_string(*r.kappa_large)) : ordered_json(nullptr);
    j["kappa_small_ci"] = r.kappa_small ? ordered_json(to_string(*r.kappa_small)) : ordered_json(nullptr);
  }
  ordered_json pool;
  pool["size"] = r.pool_size;
  pool["junta"] = r.count_junta;
  ordered_json small = ordered_json::object();
  for (const auto& [K, c] : r.count_small_ci) small[std::to_string(K)] = c;
  pool["small_ci"] = std::move(small);
  pool["large_ci"] = r.count_large_ci;
  j["pool"] = std::move(pool);
  if (with_pool) {
    ordered_json members = ordered_json::array();
    for (const auto& e : r.pool) {
      ordered_json m;
      m["provenance"] = e.label;
      m["weights_sorted"] = weights_json(e.weights);
      m["hits"] = e.hits;
      members.push_back(std::move(m));
    }
    j["pool_members"] = std::move(members);
  }
  j["config"] = config_json(r.config);
  j["seed"] = r.config.seed;
  if (with_timings) {
    ordered_json t = ordered_json::object();
    for (const auto& [name, ms] : r.timings_ms) t[name] = ms;
    j["timings_ms"] = std::move(t);
  }
  return j;
}

inline ordered_json baseline_to_json(const BaselineResult& b) {
  ordered_json j;
  j["best_k"] = b.best_k;
  j["value"] = rational_json(b.value);
  ordered_json per = ordered_json::array();
  for (std::size_t k = 0; k < b.per_k.size(); ++k) {
    ordered_json row = rational_json(b.per_k[k]);
    row["k"] = k + 1;
    per.push_back(std::move(row));
  }
  j["per_k"] = std::move(per);
  return j;
}

inline ordered_json oracle_to_json(const OracleResult& o) {
  ordered_json j;
  j["opt"] = rational_json(o.opt_value);
  j["witness"] = weights_json(o.witness);
  j["lps_solved"] = o.sets_examined;
  j["grid_path"] = o.grid_path;
  if (o.grid_path) j["validation"] = "integer weights with |u_i| <= 6; the 94572 realized sets are unchanged at bound 8";
  return j;
}

} // namespace ftalloc
