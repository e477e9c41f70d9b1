#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "netgame/errors.hpp"
#include "netgame/game.hpp"

namespace netgame {

/// Dense operators derived from the interaction matrix: the agent response
/// map (I-G)^{-1}, the influence matrix A = (I-G)^{-2}, and the symmetric
/// PSD square root of A. All three share one eigendecomposition of the
/// symmetric matrix I-G, which is also reused for every linear solve against
/// I-G. Immutable after construction and safe to share across threads.
struct InfluenceOperators {
  Matrix inv_i_minus_g;  ///< (I-G)^{-1}
  Matrix a;              ///< A = (I-G)^{-2}
  Matrix a_sqrt;         ///< unique symmetric PSD root of A; coincides with (I-G)^{-1}
  Vector eigenvalues;    ///< eigenvalues of I-G, ascending
  Matrix eigenvectors;   ///< corresponding orthonormal eigenvectors
  double lambda_max_g = 0.0;

  /// Solves (I-G) x = rhs through the stored eigendecomposition, with one
  /// step of iterative refinement.
  Vector solve_i_minus_g(const Vector& rhs) const {
    Vector x = eigenvectors *
               (eigenvectors.transpose() * rhs).cwiseQuotient(eigenvalues);
    Vector residual = rhs - (eigenvectors *
                             (eigenvalues.asDiagonal() * (eigenvectors.transpose() * x)));
    x += eigenvectors *
         (eigenvectors.transpose() * residual).cwiseQuotient(eigenvalues);
    return x;
  }
};

/// Builds the influence operators. Requires lambda_max(G) < 1 so that I-G is
/// positive definite; throws PreconditionError otherwise, and NumericalError
/// when I-G is numerically singular (condition estimate above 1e12).
inline InfluenceOperators influence_operators(const Game& game) {
  const Eigen::Index n = game.n();
  Matrix i_minus_g = Matrix::Identity(n, n) - game.g;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(i_minus_g);
  if (eig.info() != Eigen::Success)
    throw NumericalError("influence_operators: eigensolver failed on I-G");

  InfluenceOperators ops;
  ops.eigenvalues = eig.eigenvalues();
  ops.eigenvectors = eig.eigenvectors();
  const double w_min = ops.eigenvalues.minCoeff();
  const double w_max = ops.eigenvalues.maxCoeff();
  ops.lambda_max_g = 1.0 - w_min;
  if (w_min <= 0.0) {
    std::ostringstream msg;
    msg << "influence_operators: lambda_max(G) = " << ops.lambda_max_g
        << " >= 1, I-G is not positive definite";
    throw PreconditionError(msg.str());
  }
  if (w_max / w_min > 1e12) {
    std::ostringstream msg;
    msg << "influence_operators: I-G condition estimate " << w_max / w_min
        << " exceeds 1e12 (lambda_max(G) = " << ops.lambda_max_g << ")";
    throw NumericalError(msg.str());
  }

  const Matrix vt = ops.eigenvectors.transpose();
  ops.inv_i_minus_g =
      ops.eigenvectors * ops.eigenvalues.cwiseInverse().asDiagonal() * vt;
  ops.a = ops.eigenvectors *
          ops.eigenvalues.array().square().inverse().matrix().asDiagonal() * vt;
  // The PSD root of (I-G)^{-2} is (I-G)^{-1} itself; keep a separate field so
  // callers that reason about A^{1/2} do not depend on that identity.
  ops.a_sqrt = ops.inv_i_minus_g;
  return ops;
}

/// Unique Nash equilibrium of the agents' game under intervention y:
/// the solution of (I-G) x = b + y.
inline Vector agent_nash_equilibrium(const Game& game, const InfluenceOperators& ops,
                                     const Vector& y) {
  if (y.size() != game.n())
    throw StructuralError("agent_nash_equilibrium: intervention length mismatch");
  return ops.solve_i_minus_g(game.b + y);
}

inline Vector agent_nash_equilibrium(const Game& game, const Vector& y) {
  return agent_nash_equilibrium(game, influence_operators(game), y);
}

/// Action profile maximizing the sum of utilities for fixed interventions:
/// the solution of (I-2G) x = b + y. Requires lambda_max(G) < 1/2.
inline Vector social_best_actions(const Game& game, const Vector& y) {
  if (y.size() != game.n())
    throw StructuralError("social_best_actions: intervention length mismatch");
  const Eigen::Index n = game.n();
  Matrix i_minus_2g = Matrix::Identity(n, n) - 2.0 * game.g;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(i_minus_2g);
  if (eig.info() != Eigen::Success)
    throw NumericalError("social_best_actions: eigensolver failed on I-2G");
  const double w_min = eig.eigenvalues().minCoeff();
  if (w_min <= 0.0) {
    std::ostringstream msg;
    msg << "social_best_actions: lambda_max(G) = " << (1.0 - w_min) / 2.0
        << " >= 1/2, I-2G is not positive definite";
    throw PreconditionError(msg.str());
  }
  const Vector rhs = game.b + y;
  Vector x = eig.eigenvectors() *
             (eig.eigenvectors().transpose() * rhs).cwiseQuotient(eig.eigenvalues());
  Vector residual = rhs - i_minus_2g * x;
  x += eig.eigenvectors() *
       (eig.eigenvectors().transpose() * residual).cwiseQuotient(eig.eigenvalues());
  return x;
}

/// Utility of agent i at actions x under intervention y:
/// (b_i + y_i) x_i - x_i^2 / 2 + x_i * sum_j g_ij x_j.
inline double agent_utility(const Game& game, const Vector& x, const Vector& y,
                            Eigen::Index i) {
  if (i < 0 || i >= game.n()) throw StructuralError("agent_utility: agent index out of range");
  const double network = game.g.row(i).dot(x);  // g_ii = 0, so the self term drops
  return (game.b(i) + y(i)) * x(i) - 0.5 * x(i) * x(i) + x(i) * network;
}

/// Sum of all agents' utilities at an arbitrary action profile.
inline double social_welfare_at_actions(const Game& game, const Vector& x, const Vector& y) {
  const Vector v = game.b + y;
  return v.dot(x) - 0.5 * x.squaredNorm() + x.dot(game.g * x);
}

/// Group k's realized welfare at the agents' equilibrium. The quadratic-cost
/// structure collapses the summed utilities of the group to half the squared
/// norm of its equilibrium actions.
inline double group_welfare_at_ne(const Game& game, const InfluenceOperators& ops,
                                  const Vector& y, int k) {
  const Vector x = agent_nash_equilibrium(game, ops, y);
  return 0.5 * group_slice(x, game.partition, k).squaredNorm();
}

/// Social welfare at the agents' equilibrium: (y+b)' A (y+b) / 2.
inline double social_welfare_at_ne(const Game& game, const InfluenceOperators& ops,
                                   const Vector& y) {
  const Vector v = game.b + y;
  return 0.5 * v.dot(ops.a * v);
}

/// Gradient of social_welfare_at_ne with respect to y: A (y+b).
inline Vector social_welfare_gradient(const Game& game, const InfluenceOperators& ops,
                                      const Vector& y) {
  return ops.a * (game.b + y);
}

}  // namespace netgame
