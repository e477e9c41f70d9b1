#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "netgame/efficiency.hpp"
#include "netgame/errors.hpp"
#include "netgame/game.hpp"
#include "netgame/netgen.hpp"
#include "netgame/planner.hpp"

namespace netgame {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Vector to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(what + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write file: " + path);
  out << content;
}

}  // namespace detail

// Game files: {"n", "g" (row-major), "b", "groups"}; generated files also
// carry "prng" for provenance. Unknown fields are ignored on load.

inline nlohmann::json game_to_json(const Game& game, bool with_prng_id = false) {
  nlohmann::json j;
  j["n"] = game.n();
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(game.n()));
  for (Eigen::Index i = 0; i < game.n(); ++i)
    rows[static_cast<std::size_t>(i)] =
        std::vector<double>(game.g.row(i).begin(), game.g.row(i).end());
  j["g"] = rows;
  j["b"] = detail::to_std(game.b);
  j["groups"] = game.partition.groups();
  if (with_prng_id) j["prng"] = kPrngId;
  return j;
}

inline Game game_from_json(const nlohmann::json& j) {
  try {
    const Eigen::Index n = j.at("n").get<Eigen::Index>();
    const auto rows = j.at("g").get<std::vector<std::vector<double>>>();
    if (static_cast<Eigen::Index>(rows.size()) != n)
      throw StructuralError("game json: row count does not match n");
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
        throw StructuralError("game json: matrix is not square");
      for (Eigen::Index c = 0; c < n; ++c)
        g(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    }
    Vector b = detail::to_eigen(j.at("b").get<std::vector<double>>());
    if (b.size() != n) throw StructuralError("game json: benefit length does not match n");
    auto groups = j.at("groups").get<std::vector<std::vector<Eigen::Index>>>();
    return Game{std::move(g), std::move(b), Partition(std::move(groups), n)};
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("game json: ") + e.what());
  }
}

inline Game load_game(const std::string& path) {
  return game_from_json(detail::parse_json(detail::read_file(path), "game file " + path));
}

inline void save_game(const Game& game, const std::string& path, bool with_prng_id = false) {
  detail::write_file(path, game_to_json(game, with_prng_id).dump(2) + "\n");
}

// Budget files: {"caps": [...]}.

inline nlohmann::json budgets_to_json(const BudgetAllocation& alloc) {
  return nlohmann::json{{"caps", detail::to_std(alloc.caps)}};
}

inline BudgetAllocation budgets_from_json(const nlohmann::json& j) {
  try {
    return BudgetAllocation{detail::to_eigen(j.at("caps").get<std::vector<double>>())};
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("budgets json: ") + e.what());
  }
}

inline BudgetAllocation load_budgets(const std::string& path) {
  return budgets_from_json(detail::parse_json(detail::read_file(path), "budget file " + path));
}

// Network specs keep the field names of the struct; enums are strings.

inline nlohmann::json network_spec_to_json(const NetworkSpec& spec) {
  nlohmann::json j;
  j["group_sizes"] = spec.group_sizes;
  j["p_in"] = spec.p_in;
  j["p_out"] = spec.p_out;
  j["s_in_low"] = spec.s_in_low;
  j["s_in_high"] = spec.s_in_high;
  j["s_out_low"] = spec.s_out_low;
  j["s_out_high"] = spec.s_out_high;
  j["sign_pattern"] =
      spec.sign_pattern == SignPattern::all_positive ? "all_positive" : "conflicting";
  j["b_low"] = spec.b_low;
  j["b_high"] = spec.b_high;
  j["normalization"] = "divide_by_n";
  j["seed"] = spec.seed;
  return j;
}

inline SignPattern sign_pattern_from_string(const std::string& s) {
  if (s == "all_positive") return SignPattern::all_positive;
  if (s == "conflicting") return SignPattern::conflicting;
  throw StructuralError("unknown sign pattern: " + s);
}

inline NetworkType network_type_from_string(const std::string& s) {
  if (s == "type1") return NetworkType::type1;
  if (s == "type2") return NetworkType::type2;
  if (s == "type3") return NetworkType::type3;
  throw StructuralError("unknown network type: " + s);
}

inline AllocationRuleKind allocation_rule_from_string(const std::string& s) {
  if (s == "proportional") return AllocationRuleKind::proportional;
  if (s == "identical") return AllocationRuleKind::identical;
  if (s == "coop_socially_optimal") return AllocationRuleKind::coop_socially_optimal;
  throw StructuralError("unknown allocation rule: " + s);
}

inline const char* to_string(AllocationRuleKind rule) {
  switch (rule) {
    case AllocationRuleKind::proportional: return "proportional";
    case AllocationRuleKind::identical: return "identical";
    case AllocationRuleKind::coop_socially_optimal: return "coop_socially_optimal";
  }
  return "";
}

inline NetworkSpec network_spec_from_json(const nlohmann::json& j) {
  try {
    NetworkSpec spec;
    spec.group_sizes = j.at("group_sizes").get<std::vector<Eigen::Index>>();
    spec.p_in = j.at("p_in").get<double>();
    spec.p_out = j.at("p_out").get<double>();
    spec.s_in_low = j.at("s_in_low").get<double>();
    spec.s_in_high = j.at("s_in_high").get<double>();
    spec.s_out_low = j.at("s_out_low").get<double>();
    spec.s_out_high = j.at("s_out_high").get<double>();
    spec.sign_pattern = sign_pattern_from_string(j.at("sign_pattern").get<std::string>());
    spec.b_low = j.at("b_low").get<double>();
    spec.b_high = j.at("b_high").get<double>();
    if (j.contains("normalization") && j["normalization"] != "divide_by_n")
      throw StructuralError("unknown normalization: " + j["normalization"].dump());
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("network spec json: ") + e.what());
  }
}

// Solutions: {"y", "x", "lambda", "mode", "iterations", "residual"}.

inline nlohmann::json solution_to_json(const EquilibriumSolution& sol) {
  nlohmann::json j;
  j["y"] = detail::to_std(sol.y_star);
  j["x"] = detail::to_std(sol.x_star);
  j["lambda"] = detail::to_std(sol.shadow_prices);
  j["mode"] = to_string(sol.mode);
  j["iterations"] = sol.iterations;
  j["residual"] = sol.residual;
  return j;
}

// Efficiency reports: JSON object plus a one-row CSV form.

inline constexpr const char* kEfficiencyCsvHeader =
    "e_l1_at_ybar,e_l2,overall,l2_lower_bound,bound_gap,w_noncoop,w_coop,bound_applicable";

inline nlohmann::json efficiency_report_to_json(const EfficiencyReport& r) {
  nlohmann::json j;
  if (r.e_l1_at_ybar) j["e_l1_at_ybar"] = *r.e_l1_at_ybar; else j["e_l1_at_ybar"] = nullptr;
  j["e_l2"] = r.e_l2;
  if (r.overall) j["overall"] = *r.overall; else j["overall"] = nullptr;
  j["l2_lower_bound"] = r.l2_lower_bound;
  j["bound_gap"] = r.bound_gap;
  j["w_noncoop"] = r.w_noncoop;
  j["w_coop"] = r.w_coop;
  j["bound_applicable"] = r.bound_applicable;
  return j;
}

inline std::string efficiency_report_to_csv_row(const EfficiencyReport& r) {
  std::ostringstream row;
  row << (r.e_l1_at_ybar ? format_double(*r.e_l1_at_ybar) : "") << ','
      << format_double(r.e_l2) << ','
      << (r.overall ? format_double(*r.overall) : "") << ','
      << format_double(r.l2_lower_bound) << ',' << format_double(r.bound_gap) << ','
      << format_double(r.w_noncoop) << ',' << format_double(r.w_coop) << ','
      << (r.bound_applicable ? "true" : "false");
  return row.str();
}

}  // namespace netgame
