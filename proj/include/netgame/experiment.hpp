#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "netgame/efficiency.hpp"
#include "netgame/equilibrium.hpp"
#include "netgame/errors.hpp"
#include "netgame/game.hpp"
#include "netgame/io.hpp"
#include "netgame/netgen.hpp"
#include "netgame/planner.hpp"

namespace netgame {

inline constexpr const char* kSweepCsvHeader =
    "seed,C,rule,w_noncoop,w_coop,e_l2,l2_lower_bound,bound_gap,e_l1,iterations,error";

/// One experiment grid: a network preset swept over seeds, total budgets,
/// and allocation rules. When `budgets` is empty every seed gets a geometric
/// grid of nine totals spanning [0.1, 1000] times the squared norm of its
/// benefit vector.
struct SweepConfig {
  NetworkType network_type = NetworkType::type3;
  SignPattern sign_pattern = SignPattern::all_positive;
  std::vector<AllocationRuleKind> allocation_rules = {
      AllocationRuleKind::proportional, AllocationRuleKind::identical,
      AllocationRuleKind::coop_socially_optimal};
  std::vector<double> budgets;
  std::vector<std::uint64_t> seeds;
  bool compute_l1 = false;
  bool compute_bound = true;
  bool compute_direction = false;
  bool zero_b = false;  ///< force b = 0 after generation
  bool mean = false;    ///< aggregate rows across seeds
  int threads = 1;
  BrdOptions brd;
};

inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  try {
    SweepConfig cfg;
    cfg.network_type = network_type_from_string(j.at("network_type").get<std::string>());
    cfg.sign_pattern = sign_pattern_from_string(j.at("sign_pattern").get<std::string>());
    if (j.contains("allocation_rules")) {
      cfg.allocation_rules.clear();
      for (const auto& r : j.at("allocation_rules"))
        cfg.allocation_rules.push_back(allocation_rule_from_string(r.get<std::string>()));
    }
    if (j.contains("budgets")) cfg.budgets = j.at("budgets").get<std::vector<double>>();
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("compute_l1")) cfg.compute_l1 = j.at("compute_l1").get<bool>();
    if (j.contains("compute_bound")) cfg.compute_bound = j.at("compute_bound").get<bool>();
    if (j.contains("compute_direction"))
      cfg.compute_direction = j.at("compute_direction").get<bool>();
    if (j.contains("zero_b")) cfg.zero_b = j.at("zero_b").get<bool>();
    if (j.contains("mean")) cfg.mean = j.at("mean").get<bool>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("tol")) cfg.brd.tol = j.at("tol").get<double>();
    if (j.contains("max_sweeps")) cfg.brd.max_sweeps = j.at("max_sweeps").get<int>();
    if (j.contains("sweep_style")) {
      const std::string style = j.at("sweep_style").get<std::string>();
      if (style == "gauss_seidel")
        cfg.brd.sweep = SweepStyle::gauss_seidel;
      else if (style == "jacobi")
        cfg.brd.sweep = SweepStyle::jacobi;
      else
        throw StructuralError("sweep config: unknown sweep_style " + style);
    }
    if (cfg.seeds.empty()) throw StructuralError("sweep config: seeds must be nonempty");
    if (cfg.allocation_rules.empty())
      throw StructuralError("sweep config: allocation_rules must be nonempty");
    if (cfg.budgets.empty() && cfg.zero_b)
      throw StructuralError("sweep config: zero_b needs an explicit budget grid");
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("sweep config json: ") + e.what());
  }
}

/// One sweep cell. `direction` is a side observation (not a CSV column).
struct SweepRow {
  std::uint64_t seed = 0;
  int budget_index = 0;
  double budget = 0.0;
  AllocationRuleKind rule = AllocationRuleKind::proportional;
  bool ok = false;
  std::string error;
  double w_noncoop = 0.0;
  double w_coop = 0.0;
  double e_l2 = 0.0;
  double l2_lower_bound = 0.0;
  double bound_gap = 0.0;
  std::optional<double> e_l1;
  int iterations = 0;
  std::optional<double> direction;
};

namespace detail {

struct SeedInstance {
  Game game;
  InfluenceOperators ops;
  std::vector<double> budgets;
};

inline std::vector<double> default_budget_grid(const Game& game) {
  const double reference = game.b.squaredNorm();
  std::vector<double> grid;
  for (int i = 0; i < 9; ++i)
    grid.push_back(0.1 * std::pow(10.0, 0.5 * i) * reference);
  return grid;
}

inline void run_cell(const SweepConfig& cfg, const SeedInstance& inst, SweepRow& row) {
  try {
    const BudgetAllocation alloc =
        allocate(row.rule, inst.game, inst.ops, row.budget);
    const EquilibriumSolution noncoop =
        brd_solve(inst.game, inst.ops, alloc, PlannerMode::noncooperative, cfg.brd);
    const EquilibriumSolution coop =
        brd_solve(inst.game, inst.ops, alloc, PlannerMode::cooperative, cfg.brd);
    const EfficiencyReport report =
        make_efficiency_report(inst.game, inst.ops, alloc, noncoop, coop, cfg.compute_l1);
    row.w_noncoop = report.w_noncoop;
    row.w_coop = report.w_coop;
    row.e_l2 = report.e_l2;
    if (cfg.compute_bound) {
      row.l2_lower_bound = report.l2_lower_bound;
      row.bound_gap = report.bound_gap;
    }
    row.e_l1 = report.e_l1_at_ybar;
    row.iterations = noncoop.iterations;
    if (cfg.compute_direction)
      row.direction = direction_similarity(inst.game, inst.ops, noncoop);
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
    std::replace(row.error.begin(), row.error.end(), ',', ';');
    std::replace(row.error.begin(), row.error.end(), '\n', ' ');
  }
}

}  // namespace detail

/// Runs the grid. Cells are independent; with threads > 1 they execute in a
/// small worker pool, and rows always come back in (seed, budget, rule)
/// order regardless of completion order.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  std::vector<detail::SeedInstance> instances;
  instances.reserve(cfg.seeds.size());
  for (std::uint64_t seed : cfg.seeds) {
    NetworkSpec spec = preset(cfg.network_type, cfg.sign_pattern);
    spec.seed = seed;
    Game game = generate(spec);
    if (cfg.zero_b) game.b.setZero();
    InfluenceOperators ops = influence_operators(game);
    std::vector<double> budgets =
        cfg.budgets.empty() ? detail::default_budget_grid(game) : cfg.budgets;
    instances.push_back({std::move(game), std::move(ops), std::move(budgets)});
  }

  std::vector<SweepRow> rows;
  for (std::size_t s = 0; s < cfg.seeds.size(); ++s)
    for (std::size_t bi = 0; bi < instances[s].budgets.size(); ++bi)
      for (AllocationRuleKind rule : cfg.allocation_rules) {
        SweepRow row;
        row.seed = cfg.seeds[s];
        row.budget_index = static_cast<int>(bi);
        row.budget = instances[s].budgets[bi];
        row.rule = rule;
        rows.push_back(row);
      }

  const std::size_t per_seed = rows.size() / cfg.seeds.size();
  auto worker_body = [&](std::size_t i) {
    detail::run_cell(cfg, instances[i / per_seed], rows[i]);
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) worker_body(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
          worker_body(i);
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

/// Renders rows as CSV (header included). With `mean` set, rows are averaged
/// across seeds per (budget position, rule); the seed column then reads
/// "mean" and cells that failed are left out of the averages.
inline std::string sweep_to_csv(const std::vector<SweepRow>& rows, const SweepConfig& cfg) {
  std::ostringstream out;
  out << kSweepCsvHeader << '\n';
  if (!cfg.mean) {
    for (const SweepRow& r : rows) {
      out << r.seed << ',';
      if (r.ok) {
        out << format_double(r.budget) << ',' << to_string(r.rule) << ','
            << format_double(r.w_noncoop) << ',' << format_double(r.w_coop) << ','
            << format_double(r.e_l2) << ','
            << (cfg.compute_bound ? format_double(r.l2_lower_bound) : "") << ','
            << (cfg.compute_bound ? format_double(r.bound_gap) : "") << ','
            << (r.e_l1 ? format_double(*r.e_l1) : "") << ',' << r.iterations << ',';
      } else {
        out << format_double(r.budget) << ',' << to_string(r.rule) << ",,,,,,,,"
            << r.error;
      }
      out << '\n';
    }
    return out.str();
  }

  // Aggregate over seeds, keyed by budget position and rule; row order
  // follows the first seed's grid.
  struct Acc {
    int n = 0;
    int failed = 0;
    double budget = 0, w_nc = 0, w_c = 0, e_l2 = 0, bound = 0, gap = 0, iters = 0;
    double e_l1 = 0;
    int n_l1 = 0;
  };
  std::vector<std::pair<std::pair<int, AllocationRuleKind>, Acc>> groups;
  auto slot = [&](int bi, AllocationRuleKind rule) -> Acc& {
    for (auto& g : groups)
      if (g.first.first == bi && g.first.second == rule) return g.second;
    groups.push_back({{bi, rule}, Acc{}});
    return groups.back().second;
  };
  for (const SweepRow& r : rows) {
    Acc& a = slot(r.budget_index, r.rule);
    if (!r.ok) {
      ++a.failed;
      continue;
    }
    ++a.n;
    a.budget += r.budget;
    a.w_nc += r.w_noncoop;
    a.w_c += r.w_coop;
    a.e_l2 += r.e_l2;
    a.bound += r.l2_lower_bound;
    a.gap += r.bound_gap;
    a.iters += r.iterations;
    if (r.e_l1) {
      a.e_l1 += *r.e_l1;
      ++a.n_l1;
    }
  }
  for (const auto& [key, a] : groups) {
    const double n = std::max(1, a.n);
    out << "mean," << format_double(a.budget / n) << ',' << to_string(key.second) << ','
        << format_double(a.w_nc / n) << ',' << format_double(a.w_c / n) << ','
        << format_double(a.e_l2 / n) << ','
        << (cfg.compute_bound ? format_double(a.bound / n) : "") << ','
        << (cfg.compute_bound ? format_double(a.gap / n) : "") << ','
        << (a.n_l1 > 0 ? format_double(a.e_l1 / a.n_l1) : "") << ','
        << format_double(a.iters / n) << ','
        << (a.failed > 0 ? "errors=" + std::to_string(a.failed) : "") << '\n';
  }
  return out.str();
}

inline std::string run_sweep_csv(const SweepConfig& cfg) {
  return sweep_to_csv(run_sweep(cfg), cfg);
}

/// Two agents, each its own group and planner, coupled at strength 1/2 with
/// unit benefits. Small enough to check every number by hand; used by the
/// verify-example command and throughout the tests.
inline Game demo_two_agent_game() {
  Matrix g(2, 2);
  g << 0.0, 0.5, 0.5, 0.0;
  Vector b(2);
  b << 1.0, 1.0;
  return Game{std::move(g), std::move(b), Partition({{0}, {1}}, 2)};
}

struct VerifyExampleResult {
  bool pass = true;
  std::vector<std::string> failures;
};

/// Built-in end-to-end check on the two-agent game: equilibrium actions under
/// caps (25, 0), the budget-transfer incentive of the rich planner, the
/// re-solved equilibrium after moving to caps (16, 9), and the resulting
/// Pareto improvement of both group welfares.
inline VerifyExampleResult run_verify_example(double tol = 1e-9) {
  VerifyExampleResult result;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) {
      result.pass = false;
      result.failures.push_back(what);
    }
  };
  auto close = [&](double got, double want) { return std::abs(got - want) <= tol; };

  const Game game = demo_two_agent_game();
  const InfluenceOperators ops = influence_operators(game);

  const BudgetAllocation before{(Vector(2) << 25.0, 0.0).finished()};
  const EquilibriumSolution sol_before =
      brd_solve(game, ops, before, PlannerMode::noncooperative);
  expect(close(sol_before.y_star(0), 5.0) && close(sol_before.y_star(1), 0.0),
         "pre-transfer intervention differs from (5, 0)");
  expect(close(sol_before.x_star(0), 26.0 / 3.0) && close(sol_before.x_star(1), 16.0 / 3.0),
         "pre-transfer actions differ from (26/3, 16/3)");

  const TransferIncentive incentive =
      transfer_incentive(game, ops, before, sol_before, 0, 1);
  expect(incentive.incentive, "planner 1 shows no incentive to share its budget");

  const BudgetAllocation after{(Vector(2) << 16.0, 9.0).finished()};
  const EquilibriumSolution sol_after =
      brd_solve(game, ops, after, PlannerMode::noncooperative);
  expect(close(sol_after.y_star(0), 4.0) && close(sol_after.y_star(1), 3.0),
         "post-transfer intervention differs from (4, 3)");
  // x_2 = 2 + (2/3)(y_1 + 2 y_2) = 2 + (2/3)(4 + 6) = 26/3.
  expect(close(sol_after.x_star(0), 28.0 / 3.0) && close(sol_after.x_star(1), 26.0 / 3.0),
         "post-transfer actions differ from (28/3, 26/3)");

  for (int k = 0; k < 2; ++k) {
    const double w_before = group_welfare_at_ne(game, ops, sol_before.y_star, k);
    const double w_after = group_welfare_at_ne(game, ops, sol_after.y_star, k);
    expect(w_after > w_before,
           "group " + std::to_string(k + 1) + " welfare did not improve after the transfer");
  }
  return result;
}

}  // namespace netgame
