#include "segbench/maxflow.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <string>

#include "segbench/error.hpp"

namespace segbench::opt {

FlowNetwork::FlowNetwork(int node_count)
    : node_count_(node_count),
      adjacency_(static_cast<std::size_t>(node_count) + 2),
      terminal_arc_(static_cast<std::size_t>(node_count), -1),
      sink_arc_(static_cast<std::size_t>(node_count), -1) {
  if (node_count < 0) throw Error(ErrorCode::InvalidArgument, "negative node count");
}

void FlowNetwork::add_arc_pair(int a, int b, double capacity, double reverse_capacity) {
  auto& from = adjacency_[static_cast<std::size_t>(a)];
  auto& to = adjacency_[static_cast<std::size_t>(b)];
  from.push_back({b, static_cast<int>(to.size()), capacity});
  to.push_back({a, static_cast<int>(from.size()) - 1, reverse_capacity});
  max_capacity_ = std::max({max_capacity_, capacity, reverse_capacity});
}

void FlowNetwork::add_terminal(int node, double source_capacity, double sink_capacity) {
  if (node < 0 || node >= node_count_) throw Error(ErrorCode::OutOfBounds, "terminal node " + std::to_string(node));
  if (!(source_capacity >= 0.0) || !(sink_capacity >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "capacities must be finite and >= 0");
  }
  const auto n = static_cast<std::size_t>(node);
  if (source_capacity > 0.0) {
    if (terminal_arc_[n] < 0) {
      terminal_arc_[n] = static_cast<int>(adjacency_[static_cast<std::size_t>(source())].size());
      add_arc_pair(source(), node, source_capacity, 0.0);
    } else {
      auto& arc = adjacency_[static_cast<std::size_t>(source())][static_cast<std::size_t>(terminal_arc_[n])];
      arc.residual += source_capacity;
      max_capacity_ = std::max(max_capacity_, arc.residual);
    }
  }
  if (sink_capacity > 0.0) {
    if (sink_arc_[n] < 0) {
      sink_arc_[n] = static_cast<int>(adjacency_[n].size());
      add_arc_pair(node, sink(), sink_capacity, 0.0);
    } else {
      auto& arc = adjacency_[n][static_cast<std::size_t>(sink_arc_[n])];
      arc.residual += sink_capacity;
      max_capacity_ = std::max(max_capacity_, arc.residual);
    }
  }
}

void FlowNetwork::add_edge(int a, int b, double capacity, double reverse_capacity) {
  if (a < 0 || b < 0 || a >= node_count_ || b >= node_count_) {
    throw Error(ErrorCode::OutOfBounds, "edge endpoint outside network");
  }
  if (!(capacity >= 0.0) || !(reverse_capacity >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "capacities must be finite and >= 0");
  }
  add_arc_pair(a, b, capacity, reverse_capacity);
}

namespace {

class Dinic {
 public:
  Dinic(FlowNetwork& net, double eps)
      : adj_(net.adjacency()), source_(net.source()), sink_(net.sink()), eps_(eps),
        level_(adj_.size()), next_arc_(adj_.size()) {}

  double run() {
    double total = 0.0;
    while (build_levels()) {
      std::fill(next_arc_.begin(), next_arc_.end(), 0);
      while (true) {
        const double pushed = augment();
        if (pushed <= 0.0) break;
        total += pushed;
      }
    }
    return total;
  }

  std::vector<std::uint8_t> reachable_from_source() const {
    std::vector<std::uint8_t> seen(adj_.size(), 0);
    std::deque<int> queue{source_};
    seen[static_cast<std::size_t>(source_)] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (const auto& arc : adj_[static_cast<std::size_t>(u)]) {
        if (arc.residual > eps_ && !seen[static_cast<std::size_t>(arc.to)]) {
          seen[static_cast<std::size_t>(arc.to)] = 1;
          queue.push_back(arc.to);
        }
      }
    }
    return seen;
  }

 private:
  bool build_levels() {
    std::fill(level_.begin(), level_.end(), -1);
    std::deque<int> queue{source_};
    level_[static_cast<std::size_t>(source_)] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (const auto& arc : adj_[static_cast<std::size_t>(u)]) {
        if (arc.residual > eps_ && level_[static_cast<std::size_t>(arc.to)] < 0) {
          level_[static_cast<std::size_t>(arc.to)] = level_[static_cast<std::size_t>(u)] + 1;
          queue.push_back(arc.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(sink_)] >= 0;
  }

  // One source-sink path in the level graph, found with an explicit stack
  // so long paths on large grids do not exhaust the call stack.
  double augment() {
    path_.clear();
    int u = source_;
    while (true) {
      if (u == sink_) {
        double bottleneck = std::numeric_limits<double>::infinity();
        for (const auto& [node, arc_index] : path_) {
          bottleneck = std::min(bottleneck, adj_[static_cast<std::size_t>(node)][static_cast<std::size_t>(arc_index)].residual);
        }
        for (const auto& [node, arc_index] : path_) {
          auto& arc = adj_[static_cast<std::size_t>(node)][static_cast<std::size_t>(arc_index)];
          arc.residual -= bottleneck;
          adj_[static_cast<std::size_t>(arc.to)][static_cast<std::size_t>(arc.reverse)].residual += bottleneck;
        }
        return bottleneck;
      }
      auto& arcs = adj_[static_cast<std::size_t>(u)];
      auto& i = next_arc_[static_cast<std::size_t>(u)];
      bool advanced = false;
      for (; i < static_cast<int>(arcs.size()); ++i) {
        const auto& arc = arcs[static_cast<std::size_t>(i)];
        if (arc.residual > eps_ &&
            level_[static_cast<std::size_t>(arc.to)] == level_[static_cast<std::size_t>(u)] + 1) {
          path_.emplace_back(u, i);
          u = arc.to;
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      // Dead end: prune u from this phase and retreat.
      level_[static_cast<std::size_t>(u)] = -1;
      if (path_.empty()) return 0.0;
      u = path_.back().first;
      path_.pop_back();
      ++next_arc_[static_cast<std::size_t>(u)];
    }
  }

  std::vector<std::vector<FlowNetwork::Arc>>& adj_;
  int source_;
  int sink_;
  double eps_;
  std::vector<int> level_;
  std::vector<int> next_arc_;
  std::vector<std::pair<int, int>> path_;
};

}  // namespace

MaxFlowResult max_flow(FlowNetwork net) {
  const double eps = net.max_capacity() * 1e-12;
  Dinic dinic(net, eps);
  MaxFlowResult result;
  result.flow = dinic.run();
  const auto seen = dinic.reachable_from_source();
  result.source_side.assign(seen.begin(), seen.begin() + net.node_count());
  return result;
}

}  // namespace segbench::opt
