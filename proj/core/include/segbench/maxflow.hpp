#pragma once

#include <cstdint>
#include <vector>

namespace segbench::opt {

/// Directed capacity network over `node_count` nodes plus an implicit
/// source and sink. Every arc is stored with its reverse so residual
/// capacities can be tracked in place.
class FlowNetwork {
 public:
  explicit FlowNetwork(int node_count = 0);

  int node_count() const noexcept { return node_count_; }
  int source() const noexcept { return node_count_; }
  int sink() const noexcept { return node_count_ + 1; }

  /// Adds source -> node and node -> sink capacities (accumulating).
  void add_terminal(int node, double source_capacity, double sink_capacity);
  /// Adds a -> b with `capacity` and b -> a with `reverse_capacity`.
  void add_edge(int a, int b, double capacity, double reverse_capacity);

  struct Arc {
    int to;
    int reverse;  // index of the paired arc in adjacency[to]
    double residual;
  };
  const std::vector<std::vector<Arc>>& adjacency() const noexcept { return adjacency_; }
  std::vector<std::vector<Arc>>& adjacency() noexcept { return adjacency_; }

  double max_capacity() const noexcept { return max_capacity_; }

 private:
  void add_arc_pair(int a, int b, double capacity, double reverse_capacity);

  int node_count_ = 0;
  std::vector<std::vector<Arc>> adjacency_;
  std::vector<int> terminal_arc_;  // per node: index of its source arc, -1 if none
  std::vector<int> sink_arc_;      // per node: index of its sink arc, -1 if none
  double max_capacity_ = 0.0;
};

struct MaxFlowResult {
  double flow = 0.0;
  /// 1 for nodes reachable from the source in the final residual graph.
  std::vector<std::uint8_t> source_side;
};

/// Dinic's algorithm (BFS level graph + blocking flow). The returned cut is
/// the source side of the residual graph.
MaxFlowResult max_flow(FlowNetwork net);

}  // namespace segbench::opt
