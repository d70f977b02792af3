#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace campnet::graph {

struct Edge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
};

// Labeled weighted graph. Undirected by default; the directed variant stores
// ordered pairs. Weights must be finite and positive; self-loops are
// rejected unless explicitly enabled (the Louvain aggregation graphs need
// them).
class WeightedGraph {
 public:
  explicit WeightedGraph(bool directed = false, bool allow_self_loops = false)
      : directed_(directed), allow_self_loops_(allow_self_loops) {}

  // Adds a node with a unique label, returns its id. Throws on duplicates.
  int add_node(const std::string& label);
  // Returns the existing id or adds the node.
  int ensure_node(const std::string& label);

  void add_edge(int u, int v, double weight);
  void add_edge(const std::string& u, const std::string& v, double weight);

  int node_count() const { return static_cast<int>(labels_.size()); }
  std::size_t edge_count() const { return edges_.size(); }
  bool directed() const { return directed_; }

  const std::string& label(int id) const { return labels_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<int> find_node(const std::string& label) const;

  // Neighbors with weights. For directed graphs these are out-neighbors;
  // in_neighbors gives the reverse adjacency.
  const std::vector<std::pair<int, double>>& neighbors(int id) const;
  const std::vector<std::pair<int, double>>& in_neighbors(int id) const;

  std::optional<double> edge_weight(int u, int v) const;

  // Edges in canonical order: undirected with u < v, sorted by (u, v).
  std::vector<Edge> sorted_edges() const;

  // Sum of edge weights, each undirected edge counted once.
  double total_weight() const { return total_weight_; }

  // Weighted degree per node; for undirected graphs a self-loop of weight w
  // contributes 2w. Directed graphs: out-degree + in-degree split.
  std::vector<double> weighted_degrees() const;
  double out_weight(int id) const;
  double in_weight(int id) const;

 private:
  std::uint64_t edge_key(int u, int v) const;

  bool directed_;
  bool allow_self_loops_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
  std::unordered_map<std::uint64_t, double> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::vector<std::vector<std::pair<int, double>>> in_adj_;  // directed only
  double total_weight_ = 0.0;
};

// Node -> community assignment with dense ids 0..community_count-1.
struct Partition {
  std::vector<int> assignment;
  int community_count = 0;

  static Partition singletons(int n);

  // Renumbers community ids densely by first occurrence in node order.
  void renumber();

  std::vector<std::vector<int>> groups() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

// Newman modularity Q of a partition over an undirected weighted graph.
// Throws if the graph has no edges or the partition does not cover it.
double modularity(const WeightedGraph& g, const Partition& p);

struct LouvainStats {
  std::vector<double> level_modularity;  // Q after each aggregation level
};

// Louvain community detection. Deterministic for a fixed seed: the node
// visiting order is a seeded shuffle, ties between equal-gain moves resolve
// to the lowest community id, and moves need a gain above kMinGain. A final
// single-node refinement pass over the original graph guarantees the result
// is a local optimum under single-node moves.
inline constexpr double kLouvainMinGain = 1e-9;
Partition louvain(const WeightedGraph& g, std::uint64_t seed = 42,
                  LouvainStats* stats = nullptr);

// Exhaustive modularity maximum over all partitions (test oracle).
// Restricted to graphs with at most 12 nodes.
std::pair<Partition, double> exhaustive_best_partition(const WeightedGraph& g);

// Jaccard index |a ∩ b| / |a ∪ b|; 0 when both sets are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Pearson correlation coefficient. Returns nullopt when either vector is
// constant (undefined correlation). Throws on unequal or short input.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

}  // namespace campnet::graph
