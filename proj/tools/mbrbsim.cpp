#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include "mbrb/battery.hpp"
#include "mbrb/errors.hpp"
#include "mbrb/oracle.hpp"
#include "mbrb/params.hpp"
#include "mbrb/properties.hpp"
#include "mbrb/scenario.hpp"
#include "mbrb/sweep.hpp"

using namespace mbrb;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfig = 2;

struct ParamFlags {
  Int n = 0, tb = 0, tm = 0;
  std::optional<Int> c;
  std::string algo;
  std::optional<Int> qd, qf;
  bool single = false;
  bool sb = false;

  void attach(CLI::App* app) {
    app->add_option("--n", n, "number of processes")->required();
    app->add_option("--tb", tb, "Byzantine bound t_b")->required();
    app->add_option("--tm", tm, "message adversary budget t_m")->required();
    app->add_option("--c", c, "effective number of correct processes (default n - t_b)");
    app->add_option("--algo", algo, "mbrb algorithm")->check(CLI::IsMember({"bracha", "ir", "imbs-raynal"}));
    app->add_option("--qd", qd, "delivery quorum");
    app->add_option("--qf", qf, "forwarding quorum");
    app->add_flag("--single", single, "single-message mode");
    app->add_flag("--sb", sb, "signature-based kl-cast (uses --qd)");
  }

  MbrbAlgorithm mbrb_algo() const { return algo == "bracha" ? MbrbAlgorithm::bracha : MbrbAlgorithm::imbs_raynal; }
};

void print_report(const AssumptionReport& r, const std::string& prefix = "") {
  if (r.alpha) std::cout << prefix << "alpha = " << *r.alpha << '\n';
  for (const auto& v : r.verdicts)
    std::cout << prefix << v.name << ": " << (v.satisfied ? "holds" : "FAILS") << "  lhs=" << v.lhs
              << (v.detail.empty() ? "" : "  " + v.detail) << '\n';
  if (r.informational) std::cout << prefix << "(informational: c > n - t_b)\n";
}

void print_guarantees(const KlcastGuarantees& g, const std::string& prefix = "") {
  std::cout << prefix << "k' = " << g.k_prime << "\n"
            << prefix << "k = " << g.k << "\n"
            << prefix << "ell = " << g.ell << "\n"
            << prefix << "delta = " << (g.delta ? "true" : "false") << "\n"
            << prefix << "global = " << to_string(g.global_mode) << "\n";
}

int check_assumptions(const ParamFlags& f) {
  const auto sys = SystemParams::make(f.n, f.tb, f.tm, f.c);
  if (!f.algo.empty()) {
    const auto algo = f.mbrb_algo();
    const auto b = algo == MbrbAlgorithm::bracha ? check_b87(sys) : check_ir16(sys);
    std::cout << (algo == MbrbAlgorithm::bracha ? "B87" : "IR16") << ": " << (b.holds ? "holds" : "FAILS")
              << "  slack=" << b.slack << '\n';
    if (!b.holds) return kFail;
    const auto g = mbrb_configs(algo, sys);
    for (const auto& o : g.objects) {
      std::cout << o.name << " (q_d=" << o.config.q_d << ", q_f=" << o.config.q_f
                << ", single=" << (o.config.single ? "true" : "false") << ")\n";
      print_report(o.assumptions, "  ");
    }
    return kPass;
  }
  if (!f.qd) throw ConfigError("--qd is required without --algo");
  if (f.sb) {
    const auto r = check_sb_assumptions(sys, *f.qd);
    print_report(r);
    return r.satisfied() ? kPass : kFail;
  }
  if (!f.qf) throw ConfigError("--qf is required for signature-free kl-cast");
  const auto r = check_sf_assumptions(sys, KlcastConfig::make(*f.qd, *f.qf, f.single));
  print_report(r);
  return r.satisfied() ? kPass : kFail;
}

int guarantees(const ParamFlags& f) {
  const auto sys = SystemParams::make(f.n, f.tb, f.tm, f.c);
  try {
    if (!f.algo.empty()) {
      const auto g = mbrb_configs(f.mbrb_algo(), sys);
      for (const auto& o : g.objects) {
        std::cout << o.name << ":\n";
        print_guarantees(o.guarantees, "  ");
      }
      std::cout << "ell_mbrb = " << g.ell_mbrb << '\n';
      return kPass;
    }
    if (!f.qd) throw ConfigError("--qd is required without --algo");
    if (f.sb) {
      print_guarantees(sb_guarantees(sys, *f.qd));
      return kPass;
    }
    if (!f.qf) throw ConfigError("--qf is required for signature-free kl-cast");
    print_guarantees(sf_guarantees(sys, KlcastConfig::make(*f.qd, *f.qf, f.single)));
    return kPass;
  } catch (const AssumptionViolation& e) {
    std::cout << "assumptions violated: " << e.what() << '\n';
    return kFail;
  }
}

void print_verdicts(const PropertyVerdicts& v) {
  for (const auto& r : v.records) {
    std::cout << (r.applicable ? (r.holds ? "PASS " : "FAIL ") : "n/a  ") << r.name;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ')';
    std::cout << '\n';
    if (!r.holds && r.applicable) std::cout << format_witness(r);
  }
  for (const auto& [id, entry] : v.census) {
    std::cout << "census (" << id.sn << ", p" << id.origin.index << "):";
    for (const auto& [m, who] : entry.deliverers) std::cout << ' ' << m << '=' << who.size();
    std::cout << '\n';
  }
}

int simulate(const std::string& path, std::optional<std::uint64_t> seed, const std::string& trace_out) {
  const auto s = load_scenario(path);
  validate(s);
  const auto expected = expected_guarantees(s);
  const Trace t = run_to_quiescence(s, seed.value_or(s.seed));
  if (!trace_out.empty()) {
    std::ofstream out(trace_out);
    if (!out) throw ConfigError("cannot write " + trace_out);
    out << trace_to_jsonl(t);
  }
  const auto v = check_properties(t, s, expected);
  std::cout << "steps=" << t.steps << " quiescent=" << (t.quiescent ? "yes" : "no")
            << " ur_broadcasts=" << t.stats.ur_broadcasts << " suppressed=" << t.stats.suppressed
            << " received=" << t.stats.received << '\n';
  print_verdicts(v);
  return v.all_hold() && t.quiescent ? kPass : kFail;
}

int battery(const std::string& path, std::size_t seeds, unsigned threads) {
  const auto s = load_scenario(path);
  const auto start = std::chrono::steady_clock::now();
  const auto seed_list = seed_range(s.seed, seeds);
  const auto rep = run_battery(s, seed_list, threads);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "runs=" << rep.runs << " failures=" << rep.failures.size() << " non_quiescent=" << rep.non_quiescent
            << " time=" << secs << "s\n";
  if (rep.min_census) std::cout << "census min=" << *rep.min_census << " max=" << *rep.max_census << '\n';
  for (const auto& [name, count] : rep.failure_counts) std::cout << "  " << name << ": " << count << '\n';
  for (const auto& f : rep.failures) std::cout << "seed " << f.seed << ' ' << f.property << '\n' << f.witness;
  return rep.ok() ? kPass : kFail;
}

int oracle(const std::string& path, std::uint64_t max_branches) {
  const auto s = load_scenario(path);
  OracleOptions opts;
  opts.max_branches = max_branches;
  try {
    const auto rep = exhaustive_oracle(s, opts);
    std::cout << "states=" << rep.states << " transitions=" << rep.transitions << " terminals=" << rep.terminals
              << " victim_choices=" << rep.victim_choices << " menu=" << rep.menu_size << '\n';
    if (rep.min_deliverers) std::cout << "min deliverers=" << *rep.min_deliverers << '\n';
    std::cout << "budget " << (rep.budget_ok ? "respected" : "VIOLATED") << '\n';
    for (const auto& [name, count] : rep.failure_counts) std::cout << "FAIL " << name << " on " << count << " terminals\n";
    for (const auto& c : rep.counterexamples) std::cout << c.property << '\n' << c.witness;
    return rep.ok() ? kPass : kFail;
  } catch (const StateSpaceOverflow& e) {
    std::cout << "overflow: " << e.what() << '\n'
              << "partial coverage: states=" << e.states_explored << " terminals=" << e.terminals_seen << '\n';
    return kFail;
  }
}

int run_sweep(Int n, const std::string& algo_name, Int tb_max, Int tm_max, const std::string& out_path) {
  const auto algo = algo_name == "bracha" ? MbrbAlgorithm::bracha : MbrbAlgorithm::imbs_raynal;
  const auto csv = sweep_csv(algo, sweep(n, algo, 0, tb_max, 0, tm_max));
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write " + out_path);
    out << csv;
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kl-cast and MBRB simulator"};
  app.require_subcommand(1);

  ParamFlags check_flags, guar_flags;
  auto* check_cmd = app.add_subcommand("check-assumptions", "evaluate the assumptions for a parameter point");
  check_flags.attach(check_cmd);
  auto* guar_cmd = app.add_subcommand("guarantees", "print k', k, ell, delta or ell_mbrb");
  guar_flags.attach(guar_cmd);

  std::string scenario_path, trace_out;
  std::optional<std::uint64_t> seed;
  auto* sim_cmd = app.add_subcommand("simulate", "run one scenario to quiescence and check properties");
  sim_cmd->add_option("--scenario", scenario_path)->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--seed", seed, "overrides the scenario seed");
  sim_cmd->add_option("--trace", trace_out, "write the trace as JSON lines");

  std::size_t seeds = 100;
  unsigned threads = 0;
  auto* bat_cmd = app.add_subcommand("battery", "run a scenario over consecutive seeds");
  bat_cmd->add_option("--scenario", scenario_path)->required()->check(CLI::ExistingFile);
  bat_cmd->add_option("--seeds", seeds, "number of seeds, starting at the scenario seed");
  bat_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");

  std::uint64_t max_branches = OracleOptions{}.max_branches;
  auto* ora_cmd = app.add_subcommand("oracle", "exhaustively explore a tiny scenario");
  ora_cmd->add_option("--scenario", scenario_path)->required()->check(CLI::ExistingFile);
  ora_cmd->add_option("--max-branches", max_branches, "cap on explored states");

  Int sweep_n = 100, tb_max = 33, tm_max = 49;
  std::string sweep_algo = "bracha", sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "tabulate ell_mbrb over a (t_b, t_m) grid as CSV");
  sweep_cmd->add_option("--n", sweep_n);
  sweep_cmd->add_option("--algo", sweep_algo)->check(CLI::IsMember({"bracha", "ir", "imbs-raynal"}));
  sweep_cmd->add_option("--tb-max", tb_max);
  sweep_cmd->add_option("--tm-max", tm_max);
  sweep_cmd->add_option("--out", sweep_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kConfig;
  }

  try {
    if (*check_cmd) return check_assumptions(check_flags);
    if (*guar_cmd) return guarantees(guar_flags);
    if (*sim_cmd) return simulate(scenario_path, seed, trace_out);
    if (*bat_cmd) return battery(scenario_path, seeds, threads);
    if (*ora_cmd) return oracle(scenario_path, max_branches);
    if (*sweep_cmd) return run_sweep(sweep_n, sweep_algo, tb_max, tm_max, sweep_out);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kPass;
}
