// Command-line front end: generate games, solve planner equilibria, sweep
// budget grids to CSV, and run the built-in verification example.
//
// Exit codes: 0 success, 1 input error, 2 non-convergence, 3 verification
// failure.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "netgame/netgame.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitVerifyFailed = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    netgame::detail::write_file(out_path, text);
  }
}

struct SolveFlags {
  std::string mode = "noncoop";
  double tol = 1e-10;
  int max_sweeps = 10000;
};

netgame::PlannerMode parse_mode(const std::string& mode) {
  if (mode == "noncoop" || mode == "noncooperative")
    return netgame::PlannerMode::noncooperative;
  if (mode == "coop" || mode == "cooperative") return netgame::PlannerMode::cooperative;
  throw netgame::StructuralError("unknown mode: " + mode);
}

int cmd_gen(const std::string& preset_name, const std::string& sign_name,
            const std::string& spec_path, std::uint64_t seed, const std::string& out) {
  netgame::NetworkSpec spec;
  if (!spec_path.empty()) {
    spec = netgame::network_spec_from_json(
        netgame::detail::parse_json(netgame::detail::read_file(spec_path), spec_path));
  } else {
    spec = netgame::preset(netgame::network_type_from_string(preset_name),
                           netgame::sign_pattern_from_string(sign_name));
  }
  spec.seed = seed;
  const netgame::Game game = netgame::generate(spec);
  emit(netgame::game_to_json(game, /*with_prng_id=*/true).dump(2) + "\n", out);
  return kExitOk;
}

int cmd_solve(const std::string& game_path, const std::string& budgets_path,
              const std::vector<double>& caps, const SolveFlags& flags,
              const std::string& out) {
  const netgame::Game game = netgame::load_game(game_path);
  netgame::BudgetAllocation alloc;
  if (!budgets_path.empty()) {
    alloc = netgame::load_budgets(budgets_path);
  } else if (!caps.empty()) {
    alloc.caps = Eigen::Map<const netgame::Vector>(
        caps.data(), static_cast<Eigen::Index>(caps.size()));
  } else {
    throw netgame::StructuralError("solve: provide --budgets FILE or --caps values");
  }
  netgame::BrdOptions opts;
  opts.tol = flags.tol;
  opts.max_sweeps = flags.max_sweeps;
  const netgame::EquilibriumSolution sol =
      netgame::brd_solve(game, alloc, parse_mode(flags.mode), opts);
  emit(netgame::solution_to_json(sol).dump(2) + "\n", out);
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, bool mean, int threads,
              const std::string& out) {
  netgame::SweepConfig cfg = netgame::sweep_config_from_json(
      netgame::detail::parse_json(netgame::detail::read_file(config_path), config_path));
  if (mean) cfg.mean = true;
  if (threads > 0) cfg.threads = threads;
  const std::vector<netgame::SweepRow> rows = netgame::run_sweep(cfg);
  emit(netgame::sweep_to_csv(rows, cfg), out);
  if (cfg.compute_direction) {
    double lo = 1.0, sum = 0.0;
    int n = 0;
    for (const auto& r : rows)
      if (r.direction) {
        lo = std::min(lo, *r.direction);
        sum += *r.direction;
        ++n;
      }
    if (n > 0)
      std::cerr << "direction similarity over " << n << " cells: min " << lo << ", mean "
                << sum / n << "\n";
  }
  return kExitOk;
}

int cmd_verify_example(double tol) {
  const netgame::VerifyExampleResult result = netgame::run_verify_example(tol);
  if (result.pass) {
    std::cout << "verify-example: pass\n";
    return kExitOk;
  }
  for (const std::string& f : result.failures)
    std::cerr << "verify-example: " << f << "\n";
  return kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-constrained intervention solver for community network games"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random game file");
  std::string gen_preset = "type3", gen_sign = "all_positive", gen_spec, gen_out;
  std::uint64_t gen_seed = 0;
  gen->add_option("--preset", gen_preset, "Network preset: type1|type2|type3");
  gen->add_option("--sign", gen_sign, "Sign pattern: all_positive|conflicting");
  gen->add_option("--spec", gen_spec, "Network spec JSON (overrides --preset/--sign)");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output path (stdout when omitted)");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve the planners' equilibrium for a game");
  std::string solve_game, solve_budgets, solve_out;
  std::vector<double> solve_caps;
  SolveFlags solve_flags;
  solve->add_option("game", solve_game, "Game JSON file")->required();
  solve->add_option("--budgets", solve_budgets, "Budget JSON file ({\"caps\": [...]})");
  solve->add_option("--caps", solve_caps, "Per-group caps, e.g. --caps 25 0")
      ->expected(-1);
  solve->add_option("--mode", solve_flags.mode, "coop|noncoop (default noncoop)");
  solve->add_option("--tol", solve_flags.tol, "Convergence tolerance");
  solve->add_option("--max-sweeps", solve_flags.max_sweeps, "Sweep limit");
  solve->add_option("--out", solve_out, "Output path (stdout when omitted)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run an experiment grid to CSV");
  std::string sweep_config, sweep_out;
  bool sweep_mean = false;
  int sweep_threads = 0;
  sweep->add_option("config", sweep_config, "Sweep config JSON file")->required();
  sweep->add_flag("--mean", sweep_mean, "Average rows across seeds");
  sweep->add_option("--threads", sweep_threads, "Worker pool size");
  sweep->add_option("--out", sweep_out, "Output path (stdout when omitted)");

  // verify-example
  auto* verify = app.add_subcommand("verify-example", "Run the built-in two-agent check");
  double verify_tol = 1e-9;
  verify->add_option("--tol", verify_tol, "Comparison tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_preset, gen_sign, gen_spec, gen_seed, gen_out);
    if (solve->parsed())
      return cmd_solve(solve_game, solve_budgets, solve_caps, solve_flags, solve_out);
    if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_mean, sweep_threads, sweep_out);
    if (verify->parsed()) return cmd_verify_example(verify_tol);
  } catch (const netgame::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (residual " << e.residual << ")\n";
    return kExitNoConvergence;
  } catch (const netgame::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
