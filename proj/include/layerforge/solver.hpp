#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "layerforge/graph.hpp"
#include "layerforge/layering.hpp"
#include "layerforge/rational.hpp"

namespace layerforge {

enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kTimeout };
std::string_view status_name(SolveStatus s);

enum class BranchOrder { kId, kDegreeDesc, kConnected };
BranchOrder parse_branch_order(std::string_view name);

struct SolveConfig {
  double time_limit = 1800.0;  // seconds
  Variant variant = Variant::kGlp;
  WeightScheme weights;
  int y = 1;
  BranchOrder branch_order = BranchOrder::kConnected;
  // kConnected: highest degree first, then most arcs into the vertices already
  // placed. Shuffles equal-degree vertices in kDegreeDesc order when set.
  std::optional<std::uint64_t> seed;
  // brute_force refuses instances with more than this many layerings.
  std::uint64_t enumeration_cap = 10'000'000;

  void validate() const;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<Layering> best;
  std::optional<Rational> objective;
  // nullopt when infeasibility is proven (the bound is +infinity).
  std::optional<Rational> lower_bound;
  std::uint64_t nodes_explored = 0;
  double wall_time = 0.0;
};

// Objective of a complete layering under cfg, or nullopt when infeasible for
// the variant. Goes through evaluate()/objective().
std::optional<Rational> layering_objective(const DiGraph& g, const Layering& l, const SolveConfig& cfg);

// Exhaustive enumeration of all Y^n layerings. Reports the lexicographically
// smallest optimum. Throws std::length_error when Y^n exceeds the cap.
SolveResult brute_force(const DiGraph& g, const SolveConfig& cfg);

// Depth-first branch-and-bound over vertex-to-layer assignments. Children are
// tried in increasing layer order and the incumbent is only replaced on strict
// improvement, so without a warm start the reported optimum is the
// lexicographically smallest one in branching order. The deadline is polled
// every 4096 nodes.
SolveResult branch_and_bound(const DiGraph& g, const SolveConfig& cfg,
                             const std::optional<Layering>& warm_start = std::nullopt);

// Lower bound used by branch_and_bound at the node where exactly the vertices
// with partial[v] > 0 are fixed to those layers; nullopt when the node is
// detectably infeasible.
std::optional<Rational> partial_lower_bound(const DiGraph& g, const SolveConfig& cfg,
                                            const std::vector<int>& partial);

// L(v) = number of vertices on the longest path ending in v. Requires an
// acyclic graph.
Layering longest_path_layering(const DiGraph& g);

// Best of the normalized longest-path layering (acyclic g, if it fits into Y
// layers) and greedy bound-guided descents under every height cap (for scale
// variants also under width caps), each polished by single-vertex moves.
// nullopt when none of them is feasible.
std::optional<Layering> heuristic_layering(const DiGraph& g, const SolveConfig& cfg);

// Warm-starts branch_and_bound from heuristic_layering. Scale variants are
// instead searched box by box: regions W <= s r_W, H <= s r_H for increasing
// s, with a doubling node budget per box, until the smallest scale term of an
// unsettled region reaches the incumbent. Ties may then resolve differently
// from branch_and_bound, but the objective is the same.
SolveResult solve_with_restarts(const DiGraph& g, const SolveConfig& cfg);

}  // namespace layerforge
