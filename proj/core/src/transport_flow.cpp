#include "transport_flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace fitsink::detail {
namespace {

class Dinic {
 public:
  explicit Dinic(int nodes) : adjacency_(static_cast<std::size_t>(nodes)) {}

  int add_edge(int from, int to, double capacity) {
    int id = static_cast<int>(edges_.size());
    edges_.push_back({to, capacity});
    adjacency_[static_cast<std::size_t>(from)].push_back(id);
    edges_.push_back({from, 0.0});
    adjacency_[static_cast<std::size_t>(to)].push_back(id + 1);
    return id;
  }

  double run(int source, int sink, double eps) {
    eps_ = eps;
    double total = 0.0;
    while (build_levels(source, sink)) {
      cursor_.assign(adjacency_.size(), 0);
      while (true) {
        double pushed = augment(source, sink, std::numeric_limits<double>::infinity());
        if (pushed <= eps_) break;
        total += pushed;
      }
    }
    return total;
  }

  // Flow carried by the forward edge with the given id.
  double flow_on(int id) const { return edges_[static_cast<std::size_t>(id) + 1].residual; }

 private:
  struct Edge {
    int to;
    double residual;
  };

  bool build_levels(int source, int sink) {
    level_.assign(adjacency_.size(), -1);
    std::queue<int> frontier;
    level_[static_cast<std::size_t>(source)] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
      int node = frontier.front();
      frontier.pop();
      for (int id : adjacency_[static_cast<std::size_t>(node)]) {
        const Edge& e = edges_[static_cast<std::size_t>(id)];
        if (e.residual > eps_ && level_[static_cast<std::size_t>(e.to)] < 0) {
          level_[static_cast<std::size_t>(e.to)] = level_[static_cast<std::size_t>(node)] + 1;
          frontier.push(e.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(sink)] >= 0;
  }

  double augment(int node, int sink, double limit) {
    if (node == sink) return limit;
    auto& out = adjacency_[static_cast<std::size_t>(node)];
    for (auto& i = cursor_[static_cast<std::size_t>(node)]; i < out.size(); ++i) {
      int id = out[i];
      Edge& e = edges_[static_cast<std::size_t>(id)];
      if (e.residual <= eps_ ||
          level_[static_cast<std::size_t>(e.to)] != level_[static_cast<std::size_t>(node)] + 1) {
        continue;
      }
      double pushed = augment(e.to, sink, std::min(limit, e.residual));
      if (pushed > eps_) {
        e.residual -= pushed;
        edges_[static_cast<std::size_t>(id ^ 1)].residual += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
  double eps_ = 0.0;
};

// Iterative Tarjan; returns the component id of every node.
std::vector<int> strong_components(const std::vector<std::vector<int>>& graph) {
  const int n = static_cast<int>(graph.size());
  std::vector<int> index(graph.size(), -1), low(graph.size(), 0), component(graph.size(), -1);
  std::vector<char> on_stack(graph.size(), 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> calls;
  int next_index = 0;
  int next_component = 0;

  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    calls.emplace_back(root, 0);
    while (!calls.empty()) {
      auto& [node, child] = calls.back();
      auto un = static_cast<std::size_t>(node);
      if (child == 0 && index[un] < 0) {
        index[un] = low[un] = next_index++;
        stack.push_back(node);
        on_stack[un] = 1;
      }
      if (child < graph[un].size()) {
        int next = graph[un][child++];
        auto vn = static_cast<std::size_t>(next);
        if (index[vn] < 0) {
          calls.emplace_back(next, 0);
        } else if (on_stack[vn]) {
          low[un] = std::min(low[un], index[vn]);
        }
        continue;
      }
      if (low[un] == index[un]) {
        int member;
        do {
          member = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(member)] = 0;
          component[static_cast<std::size_t>(member)] = next_component;
        } while (member != node);
        ++next_component;
      }
      int finished = node;
      calls.pop_back();
      if (!calls.empty()) {
        auto parent = static_cast<std::size_t>(calls.back().first);
        low[parent] = std::min(low[parent], low[static_cast<std::size_t>(finished)]);
      }
    }
  }
  return component;
}

}  // namespace

TransportFlow max_transport_flow(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& row_targets,
                                 const Eigen::VectorXd& col_targets) {
  const int n = static_cast<int>(matrix.rows());
  const int m = static_cast<int>(matrix.cols());
  const int source = n + m;
  const int sink = n + m + 1;
  const double required = row_targets.sum();
  const double unbounded = required + col_targets.sum() + 1.0;

  Dinic graph(n + m + 2);
  for (int i = 0; i < n; ++i) graph.add_edge(source, i, row_targets(i));
  for (int j = 0; j < m; ++j) graph.add_edge(n + j, sink, col_targets(j));

  std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
  std::vector<int> ids;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (matrix(i, j) > 0.0) {
        cells.emplace_back(i, j);
        ids.push_back(graph.add_edge(i, n + j, unbounded));
      }
    }
  }

  TransportFlow result;
  result.required = required;
  result.total = graph.run(source, sink, 1e-14 * std::max(required, 1.0));
  result.feasible = result.total >= required * (1.0 - 1e-12);
  result.flow = Eigen::MatrixXd::Zero(n, m);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    result.flow(cells[k].first, cells[k].second) = graph.flow_on(ids[k]);
  }
  return result;
}

bool all_entries_on_residual_cycles(const Eigen::MatrixXd& matrix, const TransportFlow& flow) {
  const auto n = matrix.rows();
  const auto m = matrix.cols();
  const double eps = 1e-12 * std::max(flow.required, 1.0);

  std::vector<std::vector<int>> residual(static_cast<std::size_t>(n + m));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (matrix(i, j) <= 0.0) continue;
      residual[static_cast<std::size_t>(i)].push_back(static_cast<int>(n + j));
      if (flow.flow(i, j) > eps) {
        residual[static_cast<std::size_t>(n + j)].push_back(static_cast<int>(i));
      }
    }
  }
  const auto component = strong_components(residual);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (matrix(i, j) > 0.0 &&
          component[static_cast<std::size_t>(i)] != component[static_cast<std::size_t>(n + j)]) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace fitsink::detail
