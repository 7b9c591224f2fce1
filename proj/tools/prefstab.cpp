// prefstab: evolutionary stability of preference configurations.
//
// Subcommands: validate | stability | invade | simulate | examples.
// All flag values are exact rationals ("3/18"); nothing on the analysis
// path ever goes through floating point.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "prefstab/corpus.hpp"
#include "prefstab/dynamics.hpp"
#include "prefstab/scenario.hpp"
#include "prefstab/version.hpp"

using namespace prefstab;

namespace {

int thread_cap() {
  const char* env = std::getenv("PREFSTAB_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

// --p reselects the regime of a loaded scenario: "1" uses b, "0" uses s, a
// rational strictly between picks the partial regime (needs both maps).
Configuration with_observability(Configuration c, const std::string& p_flag) {
  if (p_flag.empty()) return c;
  Rational p = parse_rational(p_flag);
  if (p < 0 || p > 1) throw StructuralError("--p must lie in [0,1]");
  if (p == 1) {
    if (!c.b) throw StructuralError("scenario carries no observable strategy function b");
    c.regime = Regime::kP1;
    c.s.reset();
  } else if (p == 0) {
    if (!c.s) throw StructuralError("scenario carries no blind strategy function s");
    c.regime = Regime::kP0;
    c.b.reset();
  } else {
    if (!c.b || !c.s) throw StructuralError("partial observability needs both b and s");
    c.regime = Regime::kPartial;
    c.p = p;
  }
  return c;
}

void print_validation(const Configuration& c, const ValidationReport& report, bool balanced) {
  Json j = validation_to_json(report);
  j["balanced"] = balanced;
  std::cout << j.dump(2) << "\n";
  if (report.ok) {
    std::cout << "configuration: ok, " << (balanced ? "balanced" : "NOT balanced") << "\n";
  } else {
    for (auto& v : report.violations) {
      std::cout << "violation: population " << v.population + 1;
      if (v.deviation >= 0) std::cout << ", deviation to action index " << v.deviation;
      std::cout << ": " << v.message << "\n";
    }
  }
}

MutantSubProfile parse_mutants(const Configuration& c, const std::string& coalition_flag) {
  MutantSubProfile m;
  std::stringstream ss(coalition_flag);
  std::string part;
  while (std::getline(ss, part, ',')) m.coalition.push_back(std::stoi(part) - 1);
  std::sort(m.coalition.begin(), m.coalition.end());
  for (int j : m.coalition) {
    m.types.emplace(j, indifferent_type(c.game, j));
    m.shares.emplace(j, Rational(1, 100));
  }
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evolutionary stability of preference configurations"};
  app.set_version_flag("--version", std::string("prefstab ") + kVersion);
  app.require_subcommand(1);

  std::string scenario_path, p_flag, out_path, filter;
  int grid = 10, support_limit = 6, steps = 100;
  long max_assignments = 4000000;
  std::string coalition_flag = "", shares_flag = "";
  bool aggregate_comparison = false;

  auto add_common = [&](CLI::App* cmd, bool needs_file) {
    if (needs_file) cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    cmd->add_option("--p", p_flag, "degree of observability: 1, 0, or a rational in (0,1)");
    cmd->add_option("--grid", grid, "grid resolution for mixed-strategy searches");
    cmd->add_option("--support-limit", support_limit, "support size cap for equilibrium enumeration");
    cmd->add_option("--max-assignments", max_assignments, "invader-search assignment cap");
    cmd->add_option("--out", out_path, "also write the JSON report to this file");
  };

  auto* validate = app.add_subcommand("validate", "check equilibrium conditions and balance");
  add_common(validate, true);
  auto* stability = app.add_subcommand("stability", "stability verdict with certificate or route");
  add_common(stability, true);
  auto* invade = app.add_subcommand("invade", "search for an invader certificate for one coalition");
  add_common(invade, true);
  invade->add_option("--coalition", coalition_flag, "1-based population list, e.g. 1,2")->required();
  invade->add_flag("--aggregate-comparison", aggregate_comparison,
                   "also report the summed-fitness comparison of the certificate");
  auto* simulate_cmd = app.add_subcommand("simulate", "replicator trajectory for an invader certificate");
  add_common(simulate_cmd, true);
  simulate_cmd->add_option("--coalition", coalition_flag, "1-based population list")->required();
  simulate_cmd->add_option("--shares", shares_flag, "entry share per coalition member, e.g. 1/100,1/100");
  simulate_cmd->add_option("--steps", steps, "number of replicator steps");
  auto* examples = app.add_subcommand("examples", "replay the built-in regression corpus");
  examples->add_option("--filter", filter, "run only checks of one example (ex1..ex6, nongeneric)");

  CLI11_PARSE(app, argc, argv);

  StabilityOptions options;
  options.grid_resolution = grid;
  options.support_limit = support_limit;
  options.max_assignments = max_assignments;
  options.threads = thread_cap();

  try {
    if (examples->parsed()) {
      int failed = 0, ran = 0;
      for (auto& check : corpus::corpus_checks()) {
        if (!filter.empty() && check.example != filter) continue;
        ++ran;
        std::string d;
        bool ok = check.run(d);
        std::cout << (ok ? "PASS " : "FAIL ") << check.example << ": " << check.name << "\n";
        if (!ok) {
          std::cout << "      " << d << "\n";
          ++failed;
        }
      }
      std::cout << ran - failed << "/" << ran << " corpus checks passed\n";
      return failed ? 1 : 0;
    }

    Configuration c = with_observability(scenario_from_json(load_json_file(scenario_path)), p_flag);
    auto report = validate_configuration(c);

    if (validate->parsed()) {
      bool balanced = report.ok && is_balanced(c);
      print_validation(c, report, balanced);
      return report.ok ? 0 : 2;
    }
    if (!report.ok) {
      print_validation(c, report, false);
      return 2;
    }

    if (stability->parsed()) {
      auto verdict = check_stability(c, options);
      Json j = verdict_to_json(c, verdict, options);
      std::cout << j.dump(2) << "\n";
      if (!out_path.empty()) save_json_file(out_path, j);
      switch (verdict.kind) {
        case VerdictKind::kStable: return 0;
        case VerdictKind::kUnstable: return 3;
        case VerdictKind::kUnknown: return 4;
      }
    }
    if (invade->parsed()) {
      auto mutants = parse_mutants(c, coalition_flag);
      auto cert = find_invader(c, mutants.coalition, options);
      if (!cert) {
        std::cout << "no invader certificate found (absence is not a stability proof)\n";
        return 4;
      }
      StabilityVerdict wrapped;
      wrapped.kind = VerdictKind::kUnstable;
      wrapped.route = cert->route;
      wrapped.certificate = cert;
      Json j = verdict_to_json(c, wrapped, options);
      if (aggregate_comparison) {
        Poly agg = aggregate_fitness_diff(c, cert->mutants, cert->assignment);
        std::vector<std::string> names;
        for (int i = 0; i < c.game.players(); ++i) names.push_back("e" + std::to_string(i + 1));
        j["aggregate_fitness_diff"] = poly_to_json(agg, names);
      }
      std::cout << j.dump(2) << "\n";
      if (!out_path.empty()) save_json_file(out_path, j);
      return 3;
    }
    if (simulate_cmd->parsed()) {
      auto mutants = parse_mutants(c, coalition_flag);
      if (!shares_flag.empty()) {
        std::stringstream ss(shares_flag);
        std::string part;
        size_t i = 0;
        while (std::getline(ss, part, ',') && i < mutants.coalition.size())
          mutants.shares[mutants.coalition[i++]] = parse_rational(part);
      }
      auto cert = find_invader(c, mutants.coalition, options);
      if (!cert) {
        std::cout << "no invader certificate found; nothing to simulate\n";
        return 4;
      }
      cert->mutants.shares = mutants.shares;
      auto traj = simulate(c, cert->mutants, cert->assignment, steps);
      write_trajectory_csv(std::cout, traj);
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error at line " << e.line << ", column " << e.column << ": " << e.what() << "\n";
    return 2;
  } catch (const SolverLimitError& e) {
    std::cerr << "solver limit: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
