#include "melred/path_solver.h"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>

namespace melred {
namespace {

std::vector<std::size_t> trace(const std::vector<std::size_t>& parent, std::size_t end) {
  std::vector<std::size_t> nodes{end};
  while (nodes.back() != 0) nodes.push_back(parent[nodes.back()]);
  std::reverse(nodes.begin(), nodes.end());
  return nodes;
}

struct Label {
  double cost = 0.0;
  std::vector<std::size_t> nodes;
};

bool label_less(const Label& a, const Label& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
  return a.nodes < b.nodes;
}

}  // namespace

ReductionPath make_path(const ReductionGraph& graph, std::vector<std::size_t> nodes) {
  ReductionPath path;
  for (std::size_t s = 1; s < nodes.size(); ++s) {
    const Edge& e = graph.edge(nodes[s - 1], nodes[s]);
    path.total_cost += e.cost;
    path.categories.push_back(e.category);
  }
  path.nodes = std::move(nodes);
  return path;
}

ReductionPath shortest_path(const ReductionGraph& graph) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw std::invalid_argument("shortest_path on an empty graph");

  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> steps(n, 0);
  std::vector<std::size_t> parent(n, 0);
  dist[0] = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double candidate = dist[i] + graph.edge(i, j).cost;
      const std::size_t candidate_steps = steps[i] + 1;
      bool better = false;
      if (candidate < dist[j]) {
        better = true;
      } else if (candidate == dist[j]) {
        if (candidate_steps != steps[j]) {
          better = candidate_steps < steps[j];
        } else {
          // Same cost and length: compare the prefixes lexicographically.
          better = trace(parent, i) < trace(parent, parent[j]);
        }
      }
      if (better) {
        dist[j] = candidate;
        steps[j] = candidate_steps;
        parent[j] = i;
      }
    }
  }
  ReductionPath path = make_path(graph, trace(parent, n - 1));
  path.total_cost = dist[n - 1];
  return path;
}

std::vector<ReductionPath> k_shortest_paths(const ReductionGraph& graph, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  const std::size_t n = graph.node_count();
  if (n == 0) throw std::invalid_argument("k_shortest_paths on an empty graph");

  std::vector<std::vector<Label>> best(n);
  best[0].push_back({0.0, {0}});
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<Label> candidates;
    for (std::size_t i = 0; i < j; ++i) {
      const double c = graph.edge(i, j).cost;
      for (const Label& prefix : best[i]) {
        Label next{prefix.cost + c, prefix.nodes};
        next.nodes.push_back(j);
        candidates.push_back(std::move(next));
      }
    }
    const std::size_t keep = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      label_less);
    candidates.resize(keep);
    best[j] = std::move(candidates);
  }

  std::vector<ReductionPath> out;
  for (Label& label : best[n - 1]) {
    ReductionPath path = make_path(graph, std::move(label.nodes));
    path.total_cost = label.cost;
    out.push_back(std::move(path));
  }
  return out;
}

ReductionPath brute_force_shortest(const ReductionGraph& graph) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw std::invalid_argument("brute_force_shortest on an empty graph");
  if (n > kBruteForceLimit) {
    throw std::length_error("brute_force_shortest supports at most " + std::to_string(kBruteForceLimit) +
                            " nodes, got " + std::to_string(n));
  }
  if (n == 1) return ReductionPath{{0}, 0.0, {}};

  const std::size_t interior = n - 2;
  std::optional<std::vector<std::size_t>> best_nodes;
  double best_cost = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << interior); ++mask) {
    std::vector<std::size_t> nodes{0};
    for (std::size_t b = 0; b < interior; ++b) {
      if (mask & (std::uint64_t{1} << b)) nodes.push_back(b + 1);
    }
    nodes.push_back(n - 1);
    double cost = 0.0;
    for (std::size_t s = 1; s < nodes.size(); ++s) cost += graph.edge(nodes[s - 1], nodes[s]).cost;

    bool take = !best_nodes;
    if (!take) {
      if (cost != best_cost) {
        take = cost < best_cost;
      } else if (nodes.size() != best_nodes->size()) {
        take = nodes.size() < best_nodes->size();
      } else {
        take = nodes < *best_nodes;
      }
    }
    if (take) {
      best_nodes = std::move(nodes);
      best_cost = cost;
    }
  }
  return make_path(graph, std::move(*best_nodes));
}

nlohmann::ordered_json path_to_json(const ReductionPath& path, const ReductionGraph& graph) {
  nlohmann::ordered_json j;
  j["nodes"] = path.nodes;
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (std::size_t s = 1; s < path.nodes.size(); ++s) {
    const Edge& e = graph.edge(path.nodes[s - 1], path.nodes[s]);
    steps.push_back({{"from", path.nodes[s - 1]},
                     {"to", path.nodes[s]},
                     {"category", to_string(e.category)},
                     {"cost", e.cost}});
  }
  j["edges"] = steps;
  j["total_cost"] = path.total_cost;
  return j;
}

}  // namespace melred
