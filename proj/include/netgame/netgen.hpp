#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "netgame/errors.hpp"
#include "netgame/game.hpp"
#include "netgame/planner.hpp"

namespace netgame {

enum class NetworkType { type1, type2, type3 };
enum class SignPattern { all_positive, conflicting };
enum class Normalization { divide_by_n };
enum class AllocationRuleKind { proportional, identical, coop_socially_optimal };

/// Parameters of a randomly generated two-community interaction network:
/// edge probabilities and strength ranges for within-group and cross-group
/// pairs, the sign pattern, and the benefit range.
struct NetworkSpec {
  std::vector<Eigen::Index> group_sizes;
  double p_in = 0.0;
  double p_out = 0.0;
  double s_in_low = 0.0;
  double s_in_high = 0.0;
  double s_out_low = 0.0;
  double s_out_high = 0.0;
  SignPattern sign_pattern = SignPattern::all_positive;
  double b_low = 0.0;
  double b_high = 0.0;
  Normalization normalization = Normalization::divide_by_n;
  std::uint64_t seed = 0;
};

/// Identity of the generator stream recorded in emitted game files. Same
/// spec, same bits, on every platform: raw mt19937_64 output mapped to
/// [0, 1) by explicit bit manipulation, with substream seeds drawn from a
/// splitmix64 sequence over the user seed (stream 0 edge existence, stream 1
/// edge strength, stream 2 benefits).
inline constexpr const char* kPrngId = "mt19937_64/splitmix64-streams/v1";

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits of the engine output.
/// std::uniform_real_distribution is implementation-defined; this is not.
inline double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& engine, double low, double high) {
  return low + uniform01(engine) * (high - low);
}

}  // namespace detail

/// Canonical experiment presets. Type 1: strong within-group, weak
/// cross-group. Type 2: the mirror of type 1. Type 3: evenly distributed.
/// Groups of 40 and 10 agents; benefits uniform on [0.1, 0.5]. The caller
/// sets the seed.
inline NetworkSpec preset(NetworkType type, SignPattern sign) {
  constexpr double strong_p = 0.8, strong_lo = 0.7, strong_hi = 0.9;
  constexpr double weak_p = 0.2, weak_lo = 0.1, weak_hi = 0.3;
  constexpr double even_p = 0.5, even_lo = 0.4, even_hi = 0.6;

  NetworkSpec spec;
  spec.group_sizes = {40, 10};
  spec.sign_pattern = sign;
  spec.b_low = 0.1;
  spec.b_high = 0.5;
  switch (type) {
    case NetworkType::type1:
      spec.p_in = strong_p;
      spec.s_in_low = strong_lo;
      spec.s_in_high = strong_hi;
      spec.p_out = weak_p;
      spec.s_out_low = weak_lo;
      spec.s_out_high = weak_hi;
      break;
    case NetworkType::type2:
      spec.p_in = weak_p;
      spec.s_in_low = weak_lo;
      spec.s_in_high = weak_hi;
      spec.p_out = strong_p;
      spec.s_out_low = strong_lo;
      spec.s_out_high = strong_hi;
      break;
    case NetworkType::type3:
      spec.p_in = even_p;
      spec.p_out = even_p;
      spec.s_in_low = even_lo;
      spec.s_in_high = even_hi;
      spec.s_out_low = even_lo;
      spec.s_out_high = even_hi;
      break;
  }
  return spec;
}

/// Draws a game from the spec. Each unordered pair is sampled once, upper
/// triangle in row-major order: a Bernoulli existence draw, then a uniform
/// strength draw when the edge exists. Signs follow the pattern (conflicting:
/// cross-group entries negative). The whole matrix is divided by the agent
/// count, which keeps the spectrum safely inside the unit ball for all
/// presets. Identical specs produce bit-identical games.
inline Game generate(const NetworkSpec& spec) {
  if (spec.group_sizes.empty())
    throw StructuralError("generate: no groups in spec");
  const Eigen::Index n =
      std::accumulate(spec.group_sizes.begin(), spec.group_sizes.end(), Eigen::Index{0});
  if (n <= 0) throw StructuralError("generate: group sizes sum to zero");
  if (spec.p_in < 0 || spec.p_in > 1 || spec.p_out < 0 || spec.p_out > 1)
    throw StructuralError("generate: edge probability outside [0, 1]");
  if (spec.s_in_low < 0 || spec.s_in_low > spec.s_in_high || spec.s_out_low < 0 ||
      spec.s_out_low > spec.s_out_high)
    throw StructuralError("generate: bad strength range");
  if (spec.b_low > spec.b_high) throw StructuralError("generate: bad benefit range");

  std::vector<std::vector<Eigen::Index>> groups;
  Eigen::Index next = 0;
  for (Eigen::Index size : spec.group_sizes) {
    if (size <= 0) throw StructuralError("generate: nonpositive group size");
    std::vector<Eigen::Index> g(static_cast<std::size_t>(size));
    std::iota(g.begin(), g.end(), next);
    next += size;
    groups.push_back(std::move(g));
  }
  Partition partition(std::move(groups), n);

  std::uint64_t state = spec.seed;
  std::mt19937_64 exist_engine(detail::splitmix64(state));
  std::mt19937_64 strength_engine(detail::splitmix64(state));
  std::mt19937_64 benefit_engine(detail::splitmix64(state));

  Matrix g = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool within = partition.group_of(i) == partition.group_of(j);
      const double p = within ? spec.p_in : spec.p_out;
      if (detail::uniform01(exist_engine) < p) {
        const double lo = within ? spec.s_in_low : spec.s_out_low;
        const double hi = within ? spec.s_in_high : spec.s_out_high;
        double value = detail::uniform(strength_engine, lo, hi);
        if (spec.sign_pattern == SignPattern::conflicting && !within) value = -value;
        g(i, j) = value;
        g(j, i) = value;
      }
    }
  }
  g /= static_cast<double>(n);

  Vector b(n);
  for (Eigen::Index i = 0; i < n; ++i)
    b(i) = detail::uniform(benefit_engine, spec.b_low, spec.b_high);

  return Game{std::move(g), std::move(b), std::move(partition)};
}

/// Splits a total budget over the groups. `proportional` weights by group
/// size, `identical` splits evenly, and `coop_socially_optimal` takes the
/// per-group squared norms of the pooled-budget solution (whose cooperative
/// shadow prices are equal across groups by construction).
inline BudgetAllocation allocate(AllocationRuleKind rule, const Game& game,
                                 const InfluenceOperators& ops, double total_budget) {
  if (!(total_budget >= 0.0))
    throw PreconditionError("allocate: negative or NaN total budget");
  const int m = game.partition.num_groups();
  BudgetAllocation alloc;
  alloc.caps = Vector::Zero(m);
  switch (rule) {
    case AllocationRuleKind::proportional: {
      const double n = static_cast<double>(game.n());
      for (int k = 0; k < m; ++k)
        alloc.caps(k) =
            total_budget * static_cast<double>(game.partition.group_size(k)) / n;
      break;
    }
    case AllocationRuleKind::identical:
      alloc.caps.setConstant(total_budget / m);
      break;
    case AllocationRuleKind::coop_socially_optimal: {
      const Vector y = solve_transferable(game, ops, total_budget);
      for (int k = 0; k < m; ++k)
        alloc.caps(k) = group_slice(y, game.partition, k).squaredNorm();
      break;
    }
  }
  return alloc;
}

inline BudgetAllocation allocate(AllocationRuleKind rule, const Game& game,
                                 double total_budget) {
  if (rule == AllocationRuleKind::coop_socially_optimal)
    return allocate(rule, game, influence_operators(game), total_budget);
  if (!(total_budget >= 0.0))
    throw PreconditionError("allocate: negative or NaN total budget");
  const int m = game.partition.num_groups();
  BudgetAllocation alloc;
  alloc.caps = Vector::Zero(m);
  if (rule == AllocationRuleKind::proportional) {
    const double n = static_cast<double>(game.n());
    for (int k = 0; k < m; ++k)
      alloc.caps(k) = total_budget * static_cast<double>(game.partition.group_size(k)) / n;
  } else {
    alloc.caps.setConstant(total_budget / m);
  }
  return alloc;
}

}  // namespace netgame
