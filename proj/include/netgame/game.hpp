#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "netgame/errors.hpp"

namespace netgame {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative slack allowed when testing budget feasibility. Optimal
/// interventions sit exactly on the budget sphere, so boundary solutions must
/// not be rejected for roundoff.
inline constexpr double kFeasibilityTol = 1e-9;

/// Disjoint communities covering all agent indices. Index order within a
/// group is canonical (ascending); groups keep their declared order. All
/// block extractions and solver outputs follow this order.
class Partition {
 public:
  Partition() = default;

  /// Validates and canonicalizes the given groups for a game of `n` agents.
  /// Throws StructuralError if groups are empty, overlap, contain
  /// out-of-range indices, or do not cover {0..n-1}.
  Partition(std::vector<std::vector<Eigen::Index>> groups, Eigen::Index n)
      : groups_(std::move(groups)) {
    if (groups_.empty()) throw StructuralError("partition: no groups");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (auto& g : groups_) {
      if (g.empty()) throw StructuralError("partition: empty group");
      std::sort(g.begin(), g.end());
      for (Eigen::Index i : g) {
        if (i < 0 || i >= n) throw StructuralError("partition: index out of range");
        if (seen[static_cast<std::size_t>(i)])
          throw StructuralError("partition: duplicate index");
        seen[static_cast<std::size_t>(i)] = 1;
      }
    }
    if (std::count(seen.begin(), seen.end(), 1) != n)
      throw StructuralError("partition: groups do not cover all agents");
    group_of_.resize(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < groups_.size(); ++k)
      for (Eigen::Index i : groups_[k]) group_of_[static_cast<std::size_t>(i)] = static_cast<int>(k);
  }

  int num_groups() const { return static_cast<int>(groups_.size()); }
  Eigen::Index num_agents() const { return static_cast<Eigen::Index>(group_of_.size()); }
  Eigen::Index group_size(int k) const { return static_cast<Eigen::Index>(group(k).size()); }
  const std::vector<Eigen::Index>& group(int k) const {
    if (k < 0 || k >= num_groups()) throw StructuralError("partition: group index out of range");
    return groups_[static_cast<std::size_t>(k)];
  }
  const std::vector<std::vector<Eigen::Index>>& groups() const { return groups_; }
  int group_of(Eigen::Index agent) const { return group_of_[static_cast<std::size_t>(agent)]; }

 private:
  std::vector<std::vector<Eigen::Index>> groups_;
  std::vector<int> group_of_;
};

/// The strategic environment: symmetric interaction matrix `g` with zero
/// diagonal, standalone marginal benefits `b`, and the community partition.
struct Game {
  Matrix g;
  Vector b;
  Partition partition;

  Eigen::Index n() const { return b.size(); }
};

/// Per-group caps on the squared norm of the group's intervention.
struct BudgetAllocation {
  Vector caps;

  double total() const { return caps.sum(); }
};

/// Result of validate_game. `i_minus_g_pd` is the condition every
/// equilibrium formula needs; `i_minus_2g_pd` is the stricter condition
/// required by the first-level efficiency ratio.
struct ValidationReport {
  bool symmetric = false;
  bool zero_diagonal = false;
  bool i_minus_g_pd = false;
  bool i_minus_2g_pd = false;
  double spectral_radius_g = 0.0;
};

/// Checks structure (exact symmetry, zero diagonal) and the spectral
/// conditions lambda_max(G) < 1 and lambda_max(G) < 1/2 via a dense
/// symmetric eigensolve. Throws StructuralError on dimension mismatches.
inline ValidationReport validate_game(const Game& game) {
  if (game.g.rows() != game.g.cols())
    throw StructuralError("game: interaction matrix is not square");
  if (game.g.rows() != game.b.size())
    throw StructuralError("game: benefit vector length does not match matrix size");
  if (game.partition.num_agents() != game.b.size())
    throw StructuralError("game: partition does not match agent count");

  ValidationReport report;
  report.symmetric = true;
  report.zero_diagonal = true;
  const Eigen::Index n = game.n();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (game.g(i, i) != 0.0) report.zero_diagonal = false;
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (game.g(i, j) != game.g(j, i)) report.symmetric = false;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(game.g, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw NumericalError("game: eigensolver failed on interaction matrix");
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  report.spectral_radius_g = std::max(std::abs(lo), std::abs(hi));
  // Guard the strict comparisons by a few ulps so games sitting exactly on a
  // boundary (where the shifted matrix is singular) classify as not PD.
  report.i_minus_g_pd = hi < 1.0 * (1.0 - 1e-12);
  report.i_minus_2g_pd = hi < 0.5 * (1.0 - 1e-12);
  return report;
}

/// Entries of `v` at the indices of group `k`, in partition order.
inline Vector group_slice(const Vector& v, const Partition& partition, int k) {
  const auto& idx = partition.group(k);
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t p = 0; p < idx.size(); ++p) {
    if (idx[p] >= v.size()) throw StructuralError("group_slice: index out of range");
    out(static_cast<Eigen::Index>(p)) = v(idx[p]);
  }
  return out;
}

/// Writes `values` into the group-`k` positions of `target` (inverse of
/// group_slice on that group).
inline void group_scatter(Vector& target, const Partition& partition, int k,
                          const Vector& values) {
  const auto& idx = partition.group(k);
  if (static_cast<std::size_t>(values.size()) != idx.size())
    throw StructuralError("group_scatter: value length does not match group size");
  for (std::size_t p = 0; p < idx.size(); ++p)
    target(idx[p]) = values(static_cast<Eigen::Index>(p));
}

/// The (k, l) block of a square matrix under the partition.
inline Matrix matrix_block(const Matrix& m, const Partition& partition, int k, int l) {
  const auto& rows = partition.group(k);
  const auto& cols = partition.group(l);
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (rows[r] >= m.rows() || cols[c] >= m.cols())
        throw StructuralError("matrix_block: index out of range");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(rows[r], cols[c]);
    }
  return out;
}

/// True when every group satisfies its cap up to the relative feasibility
/// slack. Enlarging any cap never makes a feasible profile infeasible.
inline bool is_feasible(const Vector& y, const Partition& partition,
                        const BudgetAllocation& alloc) {
  if (alloc.caps.size() != partition.num_groups())
    throw StructuralError("feasible: cap count does not match group count");
  for (int k = 0; k < partition.num_groups(); ++k) {
    double used = 0.0;
    for (Eigen::Index i : partition.group(k)) used += y(i) * y(i);
    if (used > alloc.caps(k) * (1.0 + kFeasibilityTol)) return false;
  }
  return true;
}

}  // namespace netgame
