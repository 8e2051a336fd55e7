// Least-cost paths from the first to the last note of a reduction graph.
//
// Ties between equal-cost paths go to the path with fewer edges, then to the
// lexicographically smallest index sequence.

#ifndef MELRED_PATH_SOLVER_H_
#define MELRED_PATH_SOLVER_H_

#include <cstddef>
#include <vector>

#include "json.hpp"
#include "melred/reduction_graph.h"

namespace melred {

struct ReductionPath {
  // Strictly increasing, from 0 to N - 1.
  std::vector<std::size_t> nodes;
  double total_cost = 0.0;
  // One per step.
  std::vector<EdgeCategory> categories;

  bool operator==(const ReductionPath&) const = default;
};

/// Single pass over the nodes in index order. O(N^2).
ReductionPath shortest_path(const ReductionGraph& graph);

/// Up to k paths in tie-break order, the first equal to shortest_path(graph).
/// Keeps the k best labels per node, O(N^2 k log k).
std::vector<ReductionPath> k_shortest_paths(const ReductionGraph& graph, std::size_t k);

inline constexpr std::size_t kBruteForceLimit = 20;

/// Enumerates every subset of interior nodes. Throws std::length_error when
/// the graph has more than kBruteForceLimit nodes.
ReductionPath brute_force_shortest(const ReductionGraph& graph);

/// Builds the path object for an explicit node sequence, summing costs left to right.
ReductionPath make_path(const ReductionGraph& graph, std::vector<std::size_t> nodes);

nlohmann::ordered_json path_to_json(const ReductionPath& path, const ReductionGraph& graph);

}  // namespace melred

#endif  // MELRED_PATH_SOLVER_H_
