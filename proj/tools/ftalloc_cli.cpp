// Command-line front end: solve, eval, oracle, baseline, bench, gen.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ftalloc/ftalloc.hpp"

namespace {

using namespace ftalloc;

struct ConfigArgs {
  std::string mode = "theory";
  std::string kappa, c_l = "1", mc_constant = "1";
  std::size_t l_cap = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t exact_eval_max_n = 22;
  std::uint64_t state_space_limit = 5'000'000;

  void attach(CLI::App* app) {
    app->add_option("--mode", mode, "theory or practical")->check(CLI::IsMember({"theory", "practical"}));
    app->add_option("--kappa", kappa, "granularity override, e.g. 1/8 (practical mode)");
    app->add_option("--l-cap", l_cap, "cap on the cutoff L (practical mode)");
    app->add_option("--c-l", c_l, "constant in the cutoff L");
    app->add_option("--mc-constant", mc_constant, "constant in the Monte-Carlo sample sizes");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--threads", threads, "worker threads; never changes the output");
    app->add_option("--exact-eval-max-n", exact_eval_max_n, "largest n evaluated exactly");
    app->add_option("--state-space-limit", state_space_limit, "abort tail DPs above this many states");
  }

  SolverConfig build() const {
    SolverConfig c;
    c.mode = mode == "practical" ? Mode::practical : Mode::theory;
    if (!kappa.empty()) c.kappa_override = parse_rational(kappa);
    if (l_cap > 0) c.L_cap = l_cap;
    c.c_L = parse_rational(c_l);
    c.mc_constant = parse_rational(mc_constant);
    c.seed = seed;
    c.threads = threads;
    c.exact_eval_max_n = exact_eval_max_n;
    c.state_space_limit = state_space_limit;
    c.validate();
    return c;
  }
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw InvalidInput("cannot write " + out);
  f << text << '\n';
}

std::vector<Rational> parse_weight_list(const std::string& s) {
  std::vector<Rational> w;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) w.push_back(parse_rational(item));
  return w;
}

ordered_json bench_row(const std::string& name, const InstanceSpec& spec, const SolverConfig& cfg) {
  ordered_json row;
  row["instance"] = name;
  row["n"] = spec.probs.size();
  row["theta"] = to_string(spec.theta);
  std::optional<Rational> solver_exact, opt;
  try {
    auto rep = solve(spec.probs, spec.theta, spec.epsilon, spec.delta, cfg);
    row["solver_provenance"] = rep.provenance;
    row["solver_estimate"] = rep.estimate.value;
    solver_exact = rep.exact_input;
    row["solver_exact"] = rational_json(rep.exact_input);
    row["error"] = nullptr;
  } catch (const GuardTrip& e) {
    row["solver_provenance"] = nullptr;
    row["solver_estimate"] = nullptr;
    row["solver_exact"] = nullptr;
    row["error"] = e.what();
  }
  auto base = uniform_split_baseline(spec.probs, spec.theta);
  row["baseline_k"] = base.best_k;
  row["baseline_value"] = rational_json(base.value);
  if (spec.probs.size() <= kMaxHalfspaceDim) opt = brute_force_optimum(spec.probs, spec.theta, cfg.threads).opt_value;
  row["oracle_opt"] = rational_json(opt);
  row["gap_solver"] = opt && solver_exact ? rational_json(Rational(*opt - *solver_exact)) : ordered_json(nullptr);
  row["gap_baseline"] = opt ? rational_json(Rational(*opt - base.value)) : ordered_json(nullptr);
  return row;
}

std::string bench_tsv(const ordered_json& rows) {
  std::ostringstream out;
  out << "instance\tn\ttheta\tsolver_provenance\tsolver_estimate\tsolver_exact\tbaseline_k\tbaseline_value"
         "\toracle_opt\tgap_solver\tgap_baseline\terror\n";
  auto cell = [](const ordered_json& v) -> std::string {
    if (v.is_null()) return "";
    if (v.is_object()) return v["float"].dump();
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  for (const auto& r : rows) {
    out << cell(r["instance"]) << '\t' << cell(r["n"]) << '\t' << cell(r["theta"]) << '\t'
        << cell(r["solver_provenance"]) << '\t' << cell(r["solver_estimate"]) << '\t' << cell(r["solver_exact"])
        << '\t' << cell(r["baseline_k"]) << '\t' << cell(r["baseline_value"]) << '\t' << cell(r["oracle_opt"])
        << '\t' << cell(r["gap_solver"]) << '\t' << cell(r["gap_baseline"]) << '\t' << cell(r["error"]) << '\n';
  }
  std::string s = out.str();
  s.pop_back();
  return s;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-tolerant storage allocation solver"};
  app.require_subcommand(1);
  std::string out;

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance file");
  std::string solve_path;
  bool timings = false, pool = false;
  ConfigArgs solve_cfg;
  solve_cmd->add_option("instance", solve_path, "instance JSON")->required();
  solve_cmd->add_flag("--timings", timings, "include wall-clock timings (breaks byte-identity)");
  solve_cmd->add_flag("--pool", pool, "list every pool member with its sample hits");
  solve_cmd->add_option("--out", out, "write the report here instead of stdout");
  solve_cfg.attach(solve_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a weight vector on an instance");
  std::string eval_path, eval_weights;
  std::size_t eval_m = 100000;
  ConfigArgs eval_cfg;
  eval_cmd->add_option("instance", eval_path, "instance JSON")->required();
  eval_cmd->add_option("--weights", eval_weights, "comma-separated weights, e.g. 1/4,1/4,1/2")->required();
  eval_cmd->add_option("--mc-samples", eval_m, "samples when exact evaluation is out of range");
  eval_cmd->add_option("--out", out, "output file");
  eval_cfg.attach(eval_cmd);

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "exact optimum for n <= 5");
  std::string oracle_path;
  unsigned oracle_threads = 1;
  oracle_cmd->add_option("instance", oracle_path, "instance JSON")->required();
  oracle_cmd->add_option("--threads", oracle_threads, "worker threads");
  oracle_cmd->add_option("--out", out, "output file");

  // baseline
  auto* base_cmd = app.add_subcommand("baseline", "uniform k-split table");
  std::string base_path;
  base_cmd->add_option("instance", base_path, "instance JSON")->required();
  base_cmd->add_option("--out", out, "output file");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "solver versus baseline versus oracle");
  std::vector<std::string> bench_paths;
  bool tsv = false;
  ConfigArgs bench_cfg;
  bench_cmd->add_option("instances", bench_paths, "instance JSON files")->required();
  bench_cmd->add_flag("--tsv", tsv, "tab-separated output");
  bench_cmd->add_option("--out", out, "output file");
  bench_cfg.attach(bench_cmd);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "random instance with p_i uniform on [lo, hi]");
  std::size_t gen_n = 0;
  std::string gen_lo = "0.3", gen_hi = "0.7", gen_theta = "1/2", gen_eps = "1/10", gen_delta = "1/20";
  std::uint64_t gen_seed = 0;
  long gen_den = 1000;
  gen_cmd->add_option("--n", gen_n, "number of nodes")->required();
  gen_cmd->add_option("--lo", gen_lo, "lower end of the probability range");
  gen_cmd->add_option("--hi", gen_hi, "upper end of the probability range");
  gen_cmd->add_option("--theta", gen_theta, "threshold");
  gen_cmd->add_option("--epsilon", gen_eps, "accuracy");
  gen_cmd->add_option("--delta", gen_delta, "failure probability");
  gen_cmd->add_option("--denominator", gen_den, "probabilities are multiples of 1/denominator");
  gen_cmd->add_option("--seed", gen_seed, "seed");
  gen_cmd->add_option("--out", out, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve_cmd) {
      auto spec = load_instance(solve_path);
      auto rep = solve(spec.probs, spec.theta, spec.epsilon, spec.delta, solve_cfg.build());
      emit(report_to_json(rep, timings, pool).dump(2), out);
    } else if (*eval_cmd) {
      auto spec = load_instance(eval_path);
      auto cfg = eval_cfg.build();
      auto w = parse_weight_list(eval_weights);
      if (w.size() != spec.probs.size()) throw InvalidInput("weights and probs differ in length");
      if (!is_feasible(w)) throw InvalidInput("weights must be non-negative with sum <= 1");
      ordered_json j;
      j["weights"] = weights_json(w);
      auto exact = try_exact(spec.probs, w, spec.theta, cfg.exact_eval_max_n);
      if (exact) {
        j["objective"] = rational_json(exact);
        j["kind"] = "exact";
      } else {
        SampleSet samples(to_doubles(spec.probs), eval_m, cfg.seed, cfg.threads);
        j["objective"] = static_cast<double>(samples.count_successes(w, spec.theta)) / static_cast<double>(eval_m);
        j["kind"] = "monte_carlo";
        j["m"] = eval_m;
        j["seed"] = cfg.seed;
      }
      emit(j.dump(2), out);
    } else if (*oracle_cmd) {
      if (oracle_threads == 0) throw InvalidInput("threads must be positive");
      auto spec = load_instance(oracle_path);
      emit(oracle_to_json(brute_force_optimum(spec.probs, spec.theta, oracle_threads)).dump(2), out);
    } else if (*base_cmd) {
      auto spec = load_instance(base_path);
      emit(baseline_to_json(uniform_split_baseline(spec.probs, spec.theta)).dump(2), out);
    } else if (*bench_cmd) {
      auto cfg = bench_cfg.build();
      ordered_json rows = ordered_json::array();
      for (const auto& path : bench_paths) rows.push_back(bench_row(path, load_instance(path), cfg));
      emit(tsv ? bench_tsv(rows) : rows.dump(2), out);
    } else if (*gen_cmd) {
      if (gen_n == 0) throw InvalidInput("n must be positive");
      if (gen_den <= 0) throw InvalidInput("denominator must be positive");
      Rational lo = parse_rational(gen_lo), hi = parse_rational(gen_hi);
      if (lo < 0 || hi > 1 || lo > hi) throw InvalidInput("need 0 <= lo <= hi <= 1");
      const Integer lo_u = ceil_int(lo * gen_den), hi_u = floor_int(hi * gen_den);
      if (lo_u > hi_u) throw InvalidInput("no multiple of 1/denominator lies in [lo, hi]");
      const std::uint64_t span = Integer(hi_u - lo_u + 1).get_ui();
      std::mt19937_64 rng(gen_seed);
      InstanceSpec spec;
      for (std::size_t i = 0; i < gen_n; ++i) {
        Integer u = lo_u + Integer(static_cast<unsigned long>(rng() % span));
        spec.probs.push_back(make_rational(u.get_si(), gen_den));
      }
      spec.theta = parse_rational(gen_theta);
      spec.epsilon = parse_rational(gen_eps);
      spec.delta = parse_rational(gen_delta);
      emit(instance_to_json(spec).dump(2), out);
    }
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const GuardTrip& e) {
    std::cerr << "guard trip: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
