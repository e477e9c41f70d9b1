#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "netgame/equilibrium.hpp"
#include "netgame/errors.hpp"
#include "netgame/game.hpp"
#include "netgame/sphere_max.hpp"

namespace netgame {

/// Whether planners maximize their own group's welfare or the social welfare.
enum class PlannerMode { noncooperative, cooperative };

inline const char* to_string(PlannerMode mode) {
  return mode == PlannerMode::noncooperative ? "noncooperative" : "cooperative";
}

/// Update order within one best-response sweep. Gauss-Seidel applies each
/// group's response immediately; Jacobi computes all responses against the
/// previous profile. Both converge under the spectral condition; Gauss-Seidel
/// is the default because it contracts faster.
enum class SweepStyle { gauss_seidel, jacobi };

struct BrdOptions {
  double tol = 1e-10;      ///< sup-norm change of y per full sweep
  int max_sweeps = 10000;
  std::optional<Vector> y0;  ///< start profile; zeros when absent
  SweepStyle sweep = SweepStyle::gauss_seidel;
};

/// Converged planner equilibrium: intervention profile, induced agent
/// equilibrium, per-group shadow prices, and convergence metadata.
struct EquilibriumSolution {
  Vector y_star;
  Vector x_star;
  Vector shadow_prices;
  PlannerMode mode = PlannerMode::noncooperative;
  int iterations = 0;   ///< completed sweeps
  double residual = 0.0;  ///< sup-norm change over the last sweep
  std::vector<int> zero_cap_groups;  ///< groups whose shadow price is the zero-cap convention
};

/// Halves the off-diagonal blocks of a symmetric matrix under the partition;
/// diagonal blocks are kept. The result stays symmetric and, for the
/// influence matrix, positive definite.
inline Matrix half_offdiagonal_blocks(const Matrix& m, const Partition& partition) {
  Matrix t = 0.5 * m;
  for (int k = 0; k < partition.num_groups(); ++k) {
    const auto& idx = partition.group(k);
    for (Eigen::Index i : idx)
      for (Eigen::Index j : idx) t(i, j) = m(i, j);
  }
  return t;
}

/// Influence matrix with halved cross-group blocks. Running the cooperative
/// machinery on it reproduces the non-cooperative equilibrium: both problems
/// have identical per-group gradients.
inline Matrix build_a_tilde(const InfluenceOperators& ops, const Partition& partition) {
  return half_offdiagonal_blocks(ops.a, partition);
}

/// Group k's planner objective: (v_Sk)' (A v)_Sk / 2 with v = y + b. These
/// objectives sum to the social welfare over the groups, and their per-group
/// gradients are the ones the best responses maximize.
inline double group_planner_objective(const Game& game, const InfluenceOperators& ops,
                                      const Vector& y, int k) {
  const Vector v = game.b + y;
  const Vector av = ops.a * v;
  return 0.5 * group_slice(v, game.partition, k).dot(group_slice(av, game.partition, k));
}

/// Gradient of group k's planner objective with respect to y_Sk:
/// A_kk v_k + (1/2) sum_{l != k} A_kl v_l.
inline Vector group_planner_gradient(const Game& game, const InfluenceOperators& ops,
                                     const Vector& y, int k) {
  const Vector v = game.b + y;
  const Vector av = ops.a * v;
  const Matrix a_kk = matrix_block(ops.a, game.partition, k, k);
  const Vector v_k = group_slice(v, game.partition, k);
  const Vector av_k = group_slice(av, game.partition, k);
  return a_kk * v_k + 0.5 * (av_k - a_kk * v_k);
}

/// Gradient of group k's planner objective with respect to y_Sl, l != k:
/// (1/2) A_{Sl,Sk} v_Sk.
inline Vector group_planner_cross_gradient(const Game& game, const InfluenceOperators& ops,
                                           const Vector& y, int k, int l) {
  if (k == l) throw StructuralError("group_planner_cross_gradient: k == l");
  const Vector v = game.b + y;
  const Matrix a_lk = matrix_block(ops.a, game.partition, l, k);
  return 0.5 * a_lk * group_slice(v, game.partition, k);
}

namespace detail {

inline void check_allocation(const BudgetAllocation& alloc, const Partition& partition) {
  if (alloc.caps.size() != partition.num_groups())
    throw StructuralError("allocation: cap count does not match group count");
  for (Eigen::Index k = 0; k < alloc.caps.size(); ++k)
    if (!(alloc.caps(k) >= 0.0))
      throw PreconditionError("allocation: negative or NaN budget cap");
}

/// One planner's subproblem against a fixed rest-of-profile, expressed on the
/// quadratic form `quad` (the influence matrix or its halved-block variant).
/// `coupling` scales the cross-group linear term: 1/2 for the direct
/// non-cooperative objective, 1 for a plain quadratic.
inline SphereMaxResult block_response(const Game& game, const Matrix& quad,
                                      const Eigen::SelfAdjointEigenSolver<Matrix>& eig_kk,
                                      const Matrix& quad_kk, double coupling,
                                      const BudgetAllocation& alloc, const Vector& y, int k) {
  const Vector v = game.b + y;
  const Vector qv = quad * v;
  const Vector v_k = group_slice(v, game.partition, k);
  const Vector qv_k = group_slice(qv, game.partition, k);
  const Vector b_k = group_slice(game.b, game.partition, k);
  const Vector linear = quad_kk * b_k + coupling * (qv_k - quad_kk * v_k);
  return sphere_max(eig_kk, linear, alloc.caps(k));
}

/// Gauss-Seidel best-response sweeps over the groups until the profile stops
/// moving. Convergence is guaranteed when I-G is positive definite (the best
/// response map is a contraction); the sweep limit guards everything else.
inline EquilibriumSolution brd_generic(const Game& game, const InfluenceOperators& ops,
                                       const BudgetAllocation& alloc, const Matrix& quad,
                                       double coupling, PlannerMode mode_label,
                                       const BrdOptions& opts) {
  check_allocation(alloc, game.partition);
  if (!(opts.tol > 0.0)) throw PreconditionError("brd: tol must be positive");
  if (opts.max_sweeps < 1) throw PreconditionError("brd: max_sweeps must be >= 1");

  const int m = game.partition.num_groups();
  Vector y = opts.y0 ? *opts.y0 : Vector::Zero(game.n());
  if (y.size() != game.n()) throw StructuralError("brd: start profile length mismatch");

  std::vector<Matrix> blocks;
  std::vector<Eigen::SelfAdjointEigenSolver<Matrix>> eigs;
  blocks.reserve(static_cast<std::size_t>(m));
  eigs.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    blocks.push_back(matrix_block(quad, game.partition, k, k));
    eigs.emplace_back(blocks.back());
    if (eigs.back().info() != Eigen::Success)
      throw NumericalError("brd: eigensolver failed on a group block");
  }

  EquilibriumSolution sol;
  sol.mode = mode_label;
  sol.shadow_prices = Vector::Zero(m);

  double delta = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    delta = 0.0;
    const Vector previous =
        opts.sweep == SweepStyle::jacobi ? y : Vector();
    for (int k = 0; k < m; ++k) {
      const Vector& basis = opts.sweep == SweepStyle::jacobi ? previous : y;
      SphereMaxResult r =
          block_response(game, quad, eigs[static_cast<std::size_t>(k)],
                         blocks[static_cast<std::size_t>(k)], coupling, alloc, basis, k);
      const Vector old = group_slice(y, game.partition, k);
      delta = std::max(delta, (r.z - old).cwiseAbs().maxCoeff());
      group_scatter(y, game.partition, k, r.z);
      sol.shadow_prices(k) = r.lambda;
    }
    sol.iterations = sweep;
    if (delta < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "brd: no convergence after " << opts.max_sweeps
        << " sweeps (last residual " << delta << "); check that lambda_max(G) < 1 "
        << "or relax the tolerance";
    throw ConvergenceError(msg.str(), delta);
  }

  sol.residual = delta;
  sol.y_star = y;
  sol.x_star = agent_nash_equilibrium(game, ops, y);
  for (int k = 0; k < m; ++k)
    if (alloc.caps(k) == 0.0) sol.zero_cap_groups.push_back(k);
  return sol;
}

}  // namespace detail

/// Group k's best response to the rest of `y`: the argmax of its mode
/// objective over its own budget sphere. `.z` holds the group intervention,
/// `.lambda` the budget multiplier.
inline SphereMaxResult best_response(const Game& game, const InfluenceOperators& ops,
                                     const BudgetAllocation& alloc, const Vector& y, int k,
                                     PlannerMode mode) {
  detail::check_allocation(alloc, game.partition);
  const Matrix a_kk = matrix_block(ops.a, game.partition, k, k);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a_kk);
  if (eig.info() != Eigen::Success)
    throw NumericalError("best_response: eigensolver failed on A_kk");
  const double coupling = mode == PlannerMode::noncooperative ? 0.5 : 1.0;
  return detail::block_response(game, ops.a, eig, a_kk, coupling, alloc, y, k);
}

/// Best-response dynamics over the planners. Returns the unique equilibrium
/// profile, the induced agent equilibrium, and the per-group shadow prices
/// taken from the final sphere subproblems. Budgets are tight at the optimum.
inline EquilibriumSolution brd_solve(const Game& game, const InfluenceOperators& ops,
                                     const BudgetAllocation& alloc, PlannerMode mode,
                                     const BrdOptions& opts = {}) {
  const double coupling = mode == PlannerMode::noncooperative ? 0.5 : 1.0;
  return detail::brd_generic(game, ops, alloc, ops.a, coupling, mode, opts);
}

inline EquilibriumSolution brd_solve(const Game& game, const BudgetAllocation& alloc,
                                     PlannerMode mode, const BrdOptions& opts = {}) {
  return brd_solve(game, influence_operators(game), alloc, mode, opts);
}

/// Solves the non-cooperative problem through its equivalent quadratic with
/// halved cross-group blocks. Independent route to the same equilibrium as
/// brd_solve in noncooperative mode.
inline EquilibriumSolution solve_noncoop_via_tilde(const Game& game,
                                                   const InfluenceOperators& ops,
                                                   const BudgetAllocation& alloc,
                                                   const BrdOptions& opts = {}) {
  const Matrix tilde = build_a_tilde(ops, game.partition);
  return detail::brd_generic(game, ops, alloc, tilde, 1.0, PlannerMode::noncooperative, opts);
}

/// Cooperative planners with a pooled budget: a single sphere-constrained
/// maximization over all coordinates. With b = 0 the result aligns with the
/// top eigenvector of the influence matrix.
inline Vector solve_transferable(const Game& game, const InfluenceOperators& ops,
                                 double total_budget) {
  if (!(total_budget >= 0.0))
    throw PreconditionError("solve_transferable: negative or NaN budget");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(ops.a);
  if (eig.info() != Eigen::Success)
    throw NumericalError("solve_transferable: eigensolver failed on A");
  return sphere_max(eig, Vector(ops.a * game.b), total_budget).z;
}

inline Vector solve_transferable(const Game& game, double total_budget) {
  return solve_transferable(game, influence_operators(game), total_budget);
}

/// Diagnostic from the optimal-intervention direction analysis: cosine
/// similarity between a non-cooperative equilibrium profile and the dominant
/// direction of the shadow-price-weighted influence matrix. Equals 1 (up to
/// solver tolerance) when b = 0, and approaches 1 when every cap dwarfs the
/// group's squared benefits.
///
/// The weighted matrix is assembled as D^(1/2) T D^(1/2) with T the
/// halved-block influence matrix and D = diag(1 / lambda_k); its top
/// eigenvector is mapped back through D^(1/2), which keeps the b = 0 identity
/// exact for unequal shadow prices.
inline double direction_similarity(const Game& game, const InfluenceOperators& ops,
                                   const EquilibriumSolution& solution) {
  if (solution.mode != PlannerMode::noncooperative)
    throw PreconditionError("direction_similarity: needs a noncooperative solution");
  const int m = game.partition.num_groups();
  if (solution.shadow_prices.size() != m)
    throw StructuralError("direction_similarity: shadow price count mismatch");
  for (int k = 0; k < m; ++k)
    if (!(solution.shadow_prices(k) > 0.0))
      throw UndefinedValueError("direction_similarity: zero shadow price, weight matrix degenerate");

  Vector d_sqrt(game.n());
  for (Eigen::Index i = 0; i < game.n(); ++i)
    d_sqrt(i) = 1.0 / std::sqrt(solution.shadow_prices(game.partition.group_of(i)));

  const Matrix tilde = build_a_tilde(ops, game.partition);
  const Matrix weighted = d_sqrt.asDiagonal() * tilde * d_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(weighted);
  if (eig.info() != Eigen::Success)
    throw NumericalError("direction_similarity: eigensolver failed");
  const Vector v = d_sqrt.cwiseProduct(eig.eigenvectors().col(game.n() - 1));

  const double denom = solution.y_star.norm() * v.norm();
  if (denom == 0.0)
    throw UndefinedValueError("direction_similarity: zero intervention profile");
  return std::abs(solution.y_star.dot(v)) / denom;
}

}  // namespace netgame
