// Acceptance suite: one line per criterion, PASS or FAIL with measured
// numbers. Exit code is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "netgame/netgame.hpp"
#include "support.hpp"

using namespace netgame;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct ConfigId {
  NetworkType type;
  SignPattern sign;
  const char* name;
};

const std::vector<ConfigId> kConfigs = {
    {NetworkType::type1, SignPattern::all_positive, "type1/all_positive"},
    {NetworkType::type1, SignPattern::conflicting, "type1/conflicting"},
    {NetworkType::type2, SignPattern::all_positive, "type2/all_positive"},
    {NetworkType::type2, SignPattern::conflicting, "type2/conflicting"},
    {NetworkType::type3, SignPattern::all_positive, "type3/all_positive"},
    {NetworkType::type3, SignPattern::conflicting, "type3/conflicting"},
};

const std::vector<AllocationRuleKind> kRules = {AllocationRuleKind::proportional,
                                                AllocationRuleKind::identical,
                                                AllocationRuleKind::coop_socially_optimal};

Game make_game(const ConfigId& cfg, std::uint64_t seed, bool zero_b) {
  NetworkSpec spec = preset(cfg.type, cfg.sign);
  spec.seed = seed;
  Game game = generate(spec);
  if (zero_b) game.b.setZero();
  return game;
}

// --- criterion 1: built-in example exactness --------------------------------

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  const VerifyExampleResult result = run_verify_example(1e-9);
  const double elapsed = seconds_since(start);
  std::string detail = "equilibria at caps (25,0) and (16,9), transfer incentive, Pareto "
                       "improvement; " +
                       std::to_string(elapsed) + " s";
  if (!result.pass)
    for (const auto& f : result.failures) detail += "; " + f;
  report(1, "worked-example exactness at 1e-9", result.pass && elapsed < 1.0, detail);
}

// --- criterion 2: budget tightness over the solved corpus -------------------

void criterion_2() {
  const auto start = std::chrono::steady_clock::now();
  const double factors[3] = {1.0, 10.0, 100.0};
  double worst = 0.0;
  int instances = 0;
  for (const ConfigId& cfg : kConfigs) {
    for (std::uint64_t seed = 1; seed <= 17; ++seed) {
      const Game game = make_game(cfg, seed, false);
      const InfluenceOperators ops = influence_operators(game);
      const AllocationRuleKind rule = kRules[seed % 3];
      const double total = factors[(seed / 3) % 3] * game.b.squaredNorm();
      const BudgetAllocation alloc = allocate(rule, game, ops, total);
      for (auto mode : {PlannerMode::noncooperative, PlannerMode::cooperative}) {
        const EquilibriumSolution sol = brd_solve(game, ops, alloc, mode);
        ++instances;
        for (int k = 0; k < game.partition.num_groups(); ++k) {
          const double used = group_slice(sol.y_star, game.partition, k).squaredNorm();
          const double err = alloc.caps(k) == 0.0
                                 ? used
                                 : std::abs(used - alloc.caps(k)) / alloc.caps(k);
          worst = std::max(worst, err);
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%d solved instances (n=50), max relative budget slack %.3e (limit 1e-6), "
                "%.1f s (limit 120)",
                instances, worst, elapsed);
  report(2, "budget tightness in both modes", worst <= 1e-6 && elapsed < 120.0, detail);
}

// --- criterion 3: equivalence of the two noncooperative routes --------------

void criterion_3() {
  double worst = 0.0;
  int instances = 0;
  for (const ConfigId& cfg : kConfigs) {
    for (std::uint64_t seed = 1; seed <= 34; ++seed) {
      const Game game = make_game(cfg, seed, false);
      const InfluenceOperators ops = influence_operators(game);
      const AllocationRuleKind rule = kRules[seed % 3];
      const BudgetAllocation alloc =
          allocate(rule, game, ops, 10.0 * game.b.squaredNorm());
      const EquilibriumSolution direct =
          brd_solve(game, ops, alloc, PlannerMode::noncooperative);
      const EquilibriumSolution tilde = solve_noncoop_via_tilde(game, ops, alloc);
      worst = std::max(worst, (direct.y_star - tilde.y_star).cwiseAbs().maxCoeff());
      ++instances;
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%d games, max sup-norm deviation %.3e (limit 1e-6)",
                instances, worst);
  report(3, "halved-block route equals direct noncooperative solve", worst <= 1e-6, detail);
}

// --- criteria 4/5/6 share the zero-benefit corpus ---------------------------

struct ZeroBCell {
  int config;
  AllocationRuleKind rule;
  std::uint64_t seed;
  double gap;
  double e_l2;
  double coop_identity_err;
  double direction;
};

std::vector<ZeroBCell> solve_zero_b_corpus(double total_budget, int seeds) {
  std::vector<ZeroBCell> cells;
  for (std::size_t c = 0; c < kConfigs.size(); ++c) {
    for (std::uint64_t seed = 1; seed <= static_cast<std::uint64_t>(seeds); ++seed) {
      const Game game = make_game(kConfigs[c], seed, true);
      const InfluenceOperators ops = influence_operators(game);
      for (AllocationRuleKind rule : kRules) {
        const BudgetAllocation alloc = allocate(rule, game, ops, total_budget);
        const EquilibriumSolution noncoop =
            brd_solve(game, ops, alloc, PlannerMode::noncooperative);
        const EquilibriumSolution coop =
            brd_solve(game, ops, alloc, PlannerMode::cooperative);
        const EfficiencyReport rep =
            make_efficiency_report(game, ops, alloc, noncoop, coop, false);
        ZeroBCell cell;
        cell.config = static_cast<int>(c);
        cell.rule = rule;
        cell.seed = seed;
        cell.gap = rep.bound_gap;
        cell.e_l2 = rep.e_l2;
        const double w = rep.w_coop;
        cell.coop_identity_err =
            std::abs(w - coop_welfare_identity(coop.shadow_prices, alloc.caps)) / (1.0 + w);
        cell.direction = direction_similarity(game, ops, noncoop);
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

void criteria_4_5_6() {
  const std::vector<ZeroBCell> cells = solve_zero_b_corpus(10.0, 20);

  // Criterion 4a: gap ranges per configuration.
  double lo[6], hi[6];
  for (int c = 0; c < 6; ++c) {
    lo[c] = 1e300;
    hi[c] = -1e300;
  }
  for (const ZeroBCell& cell : cells) {
    lo[cell.config] = std::min(lo[cell.config], cell.gap);
    hi[cell.config] = std::max(hi[cell.config], cell.gap);
  }
  bool five_ok = true;
  for (int c = 0; c < 6; ++c) {
    if (c == 1) continue;  // type1/conflicting handled below
    five_ok = five_ok && lo[c] >= 0.0 && hi[c] <= 0.01;
  }
  const bool t1c_ok = lo[1] >= 0.02 && hi[1] <= 0.15;

  // Criterion 4c: gap variation across a 100x budget range.
  double variation = 0.0;
  {
    const std::vector<ZeroBCell> at1 = solve_zero_b_corpus(1.0, 5);
    const std::vector<ZeroBCell> at100 = solve_zero_b_corpus(100.0, 5);
    for (std::size_t i = 0; i < at1.size(); ++i)
      variation = std::max(variation, std::abs(at1[i].gap - at100[i].gap));
  }
  const bool variation_ok = variation < 0.01;

  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "b=0, 20 seeds x 3 rules per configuration; gaps: five configs in "
                "[%.2e, %.2e] (need [0, 0.01]: %s); type1/conflicting in [%.2e, %.2e] "
                "(need [0.02, 0.15]: %s — unattainable at b=0, sign patterns are "
                "orthogonally similar there, see notes); 100x-budget gap variation %.2e "
                "(need < 0.01: %s)",
                std::min({lo[0], lo[2], lo[3], lo[4], lo[5]}),
                std::max({hi[0], hi[2], hi[3], hi[4], hi[5]}),
                five_ok ? "yes" : "NO", lo[1], hi[1], t1c_ok ? "yes" : "NO", variation,
                variation_ok ? "yes" : "NO");
  report(4, "shadow-price bound tightness", five_ok && t1c_ok && variation_ok, buf);

  // Criterion 5: cooperative welfare identity.
  double worst_identity = 0.0;
  for (const ZeroBCell& cell : cells)
    worst_identity = std::max(worst_identity, cell.coop_identity_err);
  char buf5[160];
  std::snprintf(buf5, sizeof(buf5),
                "max |W - sum(lambda_k C_k)| / (1 + W) = %.3e over %zu cells (limit 1e-6)",
                worst_identity, cells.size());
  report(5, "cooperative welfare equals the shadow-price sum at b=0",
         worst_identity <= 1e-6, buf5);

  // Criterion 6: direction alignment.
  double worst_dir = 1.0;
  for (const ZeroBCell& cell : cells) worst_dir = std::min(worst_dir, cell.direction);
  char buf6[160];
  std::snprintf(buf6, sizeof(buf6),
                "min cosine similarity %.12f over %zu noncooperative solutions "
                "(limit 1 - 1e-6)",
                worst_dir, cells.size());
  report(6, "optimal interventions align with the weighted dominant direction",
         worst_dir >= 1.0 - 1e-6, buf6);
}

// --- criterion 7: solver against the projected-gradient oracle --------------

void criterion_7() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 eng(20240817);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(eng() % 5);
    const Matrix m = testsupport::random_psd(eng, d, testsupport::uniform(eng, 0.3, 5.0));
    const Vector q = testsupport::random_vector(eng, d, -2.0, 2.0);
    const double r2 = testsupport::uniform(eng, 0.2, 9.0);
    const SphereMaxResult res = sphere_max(m, q, r2);
    const auto oracle = testsupport::pga_sphere_max(m, q, r2, 50, 20000, 7000 + trial);
    const double f = testsupport::sphere_objective(m, q, res.z);
    worst = std::max(worst, std::abs(f - oracle.objective) / (1.0 + std::abs(f)));
  }
  for (int trial = 0; trial < 10; ++trial) {
    // Constructed hard cases: q orthogonal to an isolated top eigenvector,
    // radius beyond the secular path's reach.
    const Eigen::Index d = 3 + static_cast<Eigen::Index>(eng() % 4);
    Matrix raw(d, d);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) raw(i, j) = gauss(eng);
    const Matrix v = Eigen::HouseholderQR<Matrix>(raw).householderQ();
    Vector w(d);
    w(0) = 2.0;
    for (Eigen::Index i = 1; i < d; ++i) w(i) = testsupport::uniform(eng, 0.1, 1.5);
    Vector coeffs = Vector::Zero(d);
    double reach = 0.0;
    for (Eigen::Index i = 1; i < d; ++i) {
      coeffs(i) = gauss(eng);
      const double t = coeffs(i) / (w(0) - w(i));
      reach += t * t;
    }
    const Matrix m = v * w.asDiagonal() * v.transpose();
    const Vector q = v * coeffs;
    const double r2 = 2.0 * reach + 1.0;
    const SphereMaxResult res = sphere_max(m, q, r2);
    const auto oracle = testsupport::pga_sphere_max(m, q, r2, 60, 20000, 9000 + trial);
    const double f = testsupport::sphere_objective(m, q, res.z);
    worst = std::max(worst, std::abs(f - oracle.objective) / (1.0 + std::abs(f)));
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "110 instances (100 random d<=6, 10 hard-case), max relative objective "
                "deviation %.3e (limit 1e-8), %.1f s",
                worst, seconds_since(start));
  report(7, "sphere maximizer matches the projected-gradient oracle", worst <= 1e-8,
         detail);
}

// --- criterion 8: analytic gradients against central differences ------------

void criterion_8() {
  std::mt19937_64 eng(31337);
  double worst = 0.0;
  int instance = 0;
  for (const ConfigId& cfg : kConfigs) {
    for (std::uint64_t seed = 40; seed < 44; ++seed) {  // 24 instances >= 20
      const Game game = make_game(cfg, seed, false);
      const InfluenceOperators ops = influence_operators(game);
      auto welfare = [&](const Vector& y) { return social_welfare_at_ne(game, ops, y); };
      ++instance;
      for (int point = 0; point < 20; ++point) {
        const Vector y = testsupport::random_vector(eng, game.n(), -1.0, 1.0);
        const Vector grad_w = social_welfare_gradient(game, ops, y);
        for (Eigen::Index i = 0; i < game.n(); i += 7) {  // stride the coordinates
          const double fd = testsupport::central_difference(welfare, y, i);
          worst = std::max(worst, std::abs(grad_w(i) - fd) / (1.0 + std::abs(fd)));
        }
        for (int k = 0; k < game.partition.num_groups(); ++k) {
          auto objective = [&](const Vector& yy) {
            return group_planner_objective(game, ops, yy, k);
          };
          const Vector grad_k = group_planner_gradient(game, ops, y, k);
          const auto& idx = game.partition.group(k);
          for (std::size_t p = 0; p < idx.size(); p += 5) {
            const double fd = testsupport::central_difference(objective, y, idx[p]);
            worst = std::max(worst,
                             std::abs(grad_k(static_cast<Eigen::Index>(p)) - fd) /
                                 (1.0 + std::abs(fd)));
          }
        }
      }
    }
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%d instances x 20 points, max relative gradient deviation %.3e "
                "(limit 1e-4)",
                instance, worst);
  report(8, "welfare and group-objective gradients match finite differences",
         worst <= 1e-4, detail);
}

// --- criterion 9: qualitative sweep behavior --------------------------------

void criterion_9() {
  // (a) Clashing type-2 groups lose real welfare at small budgets.
  double min_e_l2 = 1.0;
  {
    SweepConfig cfg;
    cfg.network_type = NetworkType::type2;
    cfg.sign_pattern = SignPattern::conflicting;
    cfg.seeds = {1, 2, 3, 4, 5};
    cfg.budgets = {};  // per-seed geometric grid spans the small-budget regime
    for (const SweepRow& row : run_sweep(cfg)) {
      if (row.ok) min_e_l2 = std::min(min_e_l2, row.e_l2);
    }
  }
  const bool dip_ok = min_e_l2 < 0.9;

  // (b) Zero benefits: welfare exactly linear in the total budget.
  double linearity = 0.0;
  {
    SweepConfig cfg;
    cfg.network_type = NetworkType::type3;
    cfg.sign_pattern = SignPattern::conflicting;
    cfg.seeds = {7, 8};
    cfg.budgets = {2.0, 4.0};
    cfg.zero_b = true;
    const std::vector<SweepRow> rows = run_sweep(cfg);
    for (std::size_t i = 0; i + kRules.size() < rows.size(); ++i) {
      const SweepRow& small = rows[i];
      const SweepRow& large = rows[i + kRules.size()];
      if (small.budget_index == 0 && large.budget_index == 1 && small.rule == large.rule) {
        linearity = std::max(linearity, std::abs(large.w_coop - 2.0 * small.w_coop) /
                                            (1.0 + large.w_coop));
        linearity = std::max(linearity, std::abs(large.w_noncoop - 2.0 * small.w_noncoop) /
                                            (1.0 + large.w_noncoop));
      }
    }
  }
  const bool linear_ok = linearity <= 1e-8;

  // (c) Efficiency flattens between 100x and 10000x the squared benefits.
  double flatten = 0.0;
  for (const ConfigId& cfg : kConfigs) {
    const Game game = make_game(cfg, 11, false);
    const InfluenceOperators ops = influence_operators(game);
    const double ref = game.b.squaredNorm();
    const double e100 =
        l2_efficiency(game, ops,
                      allocate(AllocationRuleKind::proportional, game, ops, 100.0 * ref),
                      {}, false)
            .e_l2;
    const double e10000 =
        l2_efficiency(game, ops,
                      allocate(AllocationRuleKind::proportional, game, ops, 10000.0 * ref),
                      {}, false)
            .e_l2;
    flatten = std::max(flatten, std::abs(e100 - e10000));
  }
  const bool flat_ok = flatten < 1e-3;

  char detail[384];
  std::snprintf(detail, sizeof(detail),
                "type2/conflicting min e_l2 %.4f (need < 0.9: %s); b=0 welfare linearity "
                "deviation %.2e (need <= 1e-8: %s); |e_l2(100C) - e_l2(10000C)| max %.2e "
                "(need < 1e-3: %s)",
                min_e_l2, dip_ok ? "yes" : "NO", linearity, linear_ok ? "yes" : "NO",
                flatten, flat_ok ? "yes" : "NO");
  report(9, "qualitative sweep behavior", dip_ok && linear_ok && flat_ok, detail);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criteria_4_5_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("acceptance: %d of 9 criteria failed, %.1f s total\n", failures,
              seconds_since(start));
  return failures;
}
