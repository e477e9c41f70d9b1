#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here is deliberately separate from the library's solution paths: brute
// projected-gradient solvers, raw utility sums, finite differences.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "netgame/netgame.hpp"

namespace testsupport {

using netgame::Game;
using netgame::Matrix;
using netgame::Vector;

inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
  return lo + uniform01(eng) * (hi - lo);
}

inline Vector random_vector(std::mt19937_64& eng, Eigen::Index d, double lo, double hi) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = uniform(eng, lo, hi);
  return v;
}

/// Random point on the sphere of squared radius r2.
inline Vector random_sphere_point(std::mt19937_64& eng, Eigen::Index d, double r2) {
  Vector v(d);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = gauss(eng);
  const double norm = v.norm();
  if (norm == 0.0) return Vector::Unit(d, 0) * std::sqrt(r2);
  return v * (std::sqrt(r2) / norm);
}

/// Random symmetric PSD matrix with eigenvalues in [0, scale].
inline Matrix random_psd(std::mt19937_64& eng, Eigen::Index d, double scale) {
  Matrix raw(d, d);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) raw(i, j) = gauss(eng);
  const Eigen::HouseholderQR<Matrix> qr(raw);
  const Matrix q = qr.householderQ();
  Vector w(d);
  for (Eigen::Index i = 0; i < d; ++i) w(i) = uniform(eng, 0.0, scale);
  return q * w.asDiagonal() * q.transpose();
}

/// Random symmetric zero-diagonal interaction matrix rescaled to the target
/// top eigenvalue.
inline Matrix random_interactions(std::mt19937_64& eng, Eigen::Index n,
                                  double lambda_max_target, bool mixed_signs = true) {
  Matrix g = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = uniform(eng, mixed_signs ? -1.0 : 0.0, 1.0);
      g(i, j) = v;
      g(j, i) = v;
    }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  if (top > 0.0) g *= lambda_max_target / top;
  return g;
}

/// Small random game with a two-group partition and positive benefits.
inline Game random_game(std::mt19937_64& eng, Eigen::Index n, double lambda_max_target,
                        bool mixed_signs = true) {
  Matrix g = random_interactions(eng, n, lambda_max_target, mixed_signs);
  Vector b = random_vector(eng, n, 0.1, 0.5);
  const Eigen::Index split = std::max<Eigen::Index>(1, n / 2);
  std::vector<std::vector<Eigen::Index>> groups(2);
  for (Eigen::Index i = 0; i < n; ++i)
    groups[i < split ? 0 : 1].push_back(i);
  return Game{std::move(g), std::move(b), netgame::Partition(std::move(groups), n)};
}

/// Projected gradient ascent for max z'Mz/2 + q'z over ||z||^2 <= r2, with
/// restarts from random sphere points. Independent of the secular-equation
/// path; used as the optimization oracle.
struct PgaResult {
  double objective = -1e300;
  Vector z;
};

inline double sphere_objective(const Matrix& m, const Vector& q, const Vector& z) {
  return 0.5 * z.dot(m * z) + q.dot(z);
}

inline PgaResult pga_sphere_max(const Matrix& m, const Vector& q, double r2, int restarts,
                                int iterations, std::uint64_t seed) {
  PgaResult best;
  const Eigen::Index d = q.size();
  best.z = Vector::Zero(d);
  best.objective = sphere_objective(m, q, best.z);
  if (r2 <= 0.0) return best;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  const double lip = eig.eigenvalues().cwiseAbs().maxCoeff() + 1.0;
  const double radius = std::sqrt(r2);
  const double step = 1.0 / lip;

  std::mt19937_64 eng(seed);
  for (int s = 0; s < restarts; ++s) {
    Vector z = random_sphere_point(eng, d, r2);
    for (int t = 0; t < iterations; ++t) {
      Vector u = z + step * (m * z + q);
      const double norm = u.norm();
      if (norm > radius) u *= radius / norm;  // project back onto the ball
      const double move = (u - z).cwiseAbs().maxCoeff();
      z = u;
      if (move < 1e-15 * (1.0 + radius)) break;
    }
    const double f = sphere_objective(m, q, z);
    if (f > best.objective) {
      best.objective = f;
      best.z = z;
    }
  }
  return best;
}

/// Plain gradient ascent on the (concave, when I - 2G is PD) social welfare
/// over unconstrained actions; oracle for the socially best action profile.
inline Vector ga_social_best(const Game& game, const Vector& y, int iterations,
                             std::uint64_t seed, int restarts = 4) {
  const Eigen::Index n = game.n();
  const Matrix i_minus_2g = Matrix::Identity(n, n) - 2.0 * game.g;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(i_minus_2g, Eigen::EigenvaluesOnly);
  const double lip = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double step = 1.0 / (lip + 1.0);
  const Vector v = game.b + y;

  std::mt19937_64 eng(seed);
  Vector best = Vector::Zero(n);
  double best_f = netgame::social_welfare_at_actions(game, best, y);
  for (int s = 0; s < restarts; ++s) {
    Vector x = random_vector(eng, n, -2.0, 2.0);
    for (int t = 0; t < iterations; ++t) {
      const Vector grad = v - i_minus_2g * x;
      x += step * grad;
      if (grad.cwiseAbs().maxCoeff() < 1e-14) break;
    }
    const double f = netgame::social_welfare_at_actions(game, x, y);
    if (f > best_f) {
      best_f = f;
      best = x;
    }
  }
  return best;
}

/// Central finite difference of a scalar function along coordinate i.
template <typename F>
double central_difference(F&& f, const Vector& at, Eigen::Index i, double h = 1e-5) {
  Vector plus = at, minus = at;
  plus(i) += h;
  minus(i) -= h;
  return (f(plus) - f(minus)) / (2.0 * h);
}

/// Sum of raw per-agent utilities at the equilibrium induced by y.
inline double raw_welfare_at_ne(const Game& game, const netgame::InfluenceOperators& ops,
                                const Vector& y) {
  const Vector x = netgame::agent_nash_equilibrium(game, ops, y);
  double total = 0.0;
  for (Eigen::Index i = 0; i < game.n(); ++i)
    total += netgame::agent_utility(game, x, y, i);
  return total;
}

inline bool close_rel(double got, double want, double tol) {
  return std::abs(got - want) <= tol * (1.0 + std::max(std::abs(got), std::abs(want)));
}

}  // namespace testsupport
