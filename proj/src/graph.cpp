#include "campnet/graph.hpp"

#include "campnet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace campnet::graph {

int WeightedGraph::add_node(const std::string& label) {
  if (index_.count(label)) throw std::invalid_argument("duplicate node label: " + label);
  int id = static_cast<int>(labels_.size());
  labels_.push_back(label);
  index_.emplace(label, id);
  adj_.emplace_back();
  if (directed_) in_adj_.emplace_back();
  return id;
}

int WeightedGraph::ensure_node(const std::string& label) {
  auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  return add_node(label);
}

std::uint64_t WeightedGraph::edge_key(int u, int v) const {
  if (!directed_ && u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

void WeightedGraph::add_edge(int u, int v, double weight) {
  if (u < 0 || u >= node_count() || v < 0 || v >= node_count())
    throw std::out_of_range("add_edge: node id out of range");
  if (u == v && !allow_self_loops_) throw std::invalid_argument("self-loop rejected");
  if (!std::isfinite(weight) || weight <= 0.0)
    throw std::invalid_argument("edge weight must be finite and > 0");
  auto key = edge_key(u, v);
  if (edges_.count(key)) throw std::invalid_argument("edge already present");
  edges_.emplace(key, weight);
  total_weight_ += weight;
  adj_[static_cast<std::size_t>(u)].emplace_back(v, weight);
  if (directed_) {
    in_adj_[static_cast<std::size_t>(v)].emplace_back(u, weight);
  } else if (u != v) {
    adj_[static_cast<std::size_t>(v)].emplace_back(u, weight);
  }
}

void WeightedGraph::add_edge(const std::string& u, const std::string& v, double weight) {
  add_edge(ensure_node(u), ensure_node(v), weight);
}

std::optional<int> WeightedGraph::find_node(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::pair<int, double>>& WeightedGraph::neighbors(int id) const {
  return adj_.at(static_cast<std::size_t>(id));
}

const std::vector<std::pair<int, double>>& WeightedGraph::in_neighbors(int id) const {
  if (!directed_) return adj_.at(static_cast<std::size_t>(id));
  return in_adj_.at(static_cast<std::size_t>(id));
}

std::optional<double> WeightedGraph::edge_weight(int u, int v) const {
  auto it = edges_.find(edge_key(u, v));
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

std::vector<Edge> WeightedGraph::sorted_edges() const {
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (const auto& [key, w] : edges_) {
    int u = static_cast<int>(key >> 32);
    int v = static_cast<int>(key & 0xffffffffu);
    out.push_back({u, v, w});
  }
  std::sort(out.begin(), out.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  return out;
}

std::vector<double> WeightedGraph::weighted_degrees() const {
  std::vector<double> deg(static_cast<std::size_t>(node_count()), 0.0);
  for (const auto& [key, w] : edges_) {
    int u = static_cast<int>(key >> 32);
    int v = static_cast<int>(key & 0xffffffffu);
    deg[static_cast<std::size_t>(u)] += w;
    deg[static_cast<std::size_t>(v)] += w;  // self-loop counts twice
  }
  return deg;
}

double WeightedGraph::out_weight(int id) const {
  double s = 0.0;
  for (const auto& [v, w] : adj_.at(static_cast<std::size_t>(id))) {
    (void)v;
    s += w;
  }
  return s;
}

double WeightedGraph::in_weight(int id) const {
  double s = 0.0;
  for (const auto& [v, w] : in_neighbors(id)) {
    (void)v;
    s += w;
  }
  return s;
}

Partition Partition::singletons(int n) {
  Partition p;
  p.assignment.resize(static_cast<std::size_t>(n));
  std::iota(p.assignment.begin(), p.assignment.end(), 0);
  p.community_count = n;
  return p;
}

void Partition::renumber() {
  std::unordered_map<int, int> remap;
  for (int& c : assignment) {
    auto [it, inserted] = remap.emplace(c, static_cast<int>(remap.size()));
    c = it->second;
  }
  community_count = static_cast<int>(remap.size());
}

std::vector<std::vector<int>> Partition::groups() const {
  std::vector<std::vector<int>> g(static_cast<std::size_t>(community_count));
  for (std::size_t i = 0; i < assignment.size(); ++i)
    g[static_cast<std::size_t>(assignment[i])].push_back(static_cast<int>(i));
  return g;
}

double modularity(const WeightedGraph& g, const Partition& p) {
  if (g.directed()) throw std::invalid_argument("modularity: undirected graphs only");
  if (g.edge_count() == 0) throw std::invalid_argument("modularity: graph has no edges");
  if (p.assignment.size() != static_cast<std::size_t>(g.node_count()))
    throw std::invalid_argument("modularity: partition does not cover the graph");

  int k = 0;
  for (int c : p.assignment) {
    if (c < 0) throw std::invalid_argument("modularity: negative community id");
    k = std::max(k, c + 1);
  }

  std::vector<double> deg = g.weighted_degrees();
  double two_m = std::accumulate(deg.begin(), deg.end(), 0.0);

  std::vector<double> internal(static_cast<std::size_t>(k), 0.0);
  std::vector<double> comm_deg(static_cast<std::size_t>(k), 0.0);
  for (const Edge& e : g.sorted_edges()) {
    if (p.assignment[static_cast<std::size_t>(e.u)] == p.assignment[static_cast<std::size_t>(e.v)])
      internal[static_cast<std::size_t>(p.assignment[static_cast<std::size_t>(e.u)])] +=
          2.0 * e.weight;
  }
  for (std::size_t i = 0; i < deg.size(); ++i)
    comm_deg[static_cast<std::size_t>(p.assignment[i])] += deg[i];

  double q = 0.0;
  for (int c = 0; c < k; ++c) {
    double frac = comm_deg[static_cast<std::size_t>(c)] / two_m;
    q += internal[static_cast<std::size_t>(c)] / two_m - frac * frac;
  }
  return q;
}

namespace {

// Working graph for one Louvain level. self[u] holds the full internal
// ordered-pair weight of the supernode (2x the undirected internal weight).
struct LevelGraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> self;
  std::vector<double> degree;
  double two_m = 0.0;
};

LevelGraph level_from(const WeightedGraph& g) {
  LevelGraph lg;
  lg.n = g.node_count();
  lg.adj.resize(static_cast<std::size_t>(lg.n));
  lg.self.assign(static_cast<std::size_t>(lg.n), 0.0);
  for (const Edge& e : g.sorted_edges()) {
    if (e.u == e.v) {
      lg.self[static_cast<std::size_t>(e.u)] += 2.0 * e.weight;
    } else {
      lg.adj[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.weight);
      lg.adj[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.weight);
    }
  }
  lg.degree.assign(static_cast<std::size_t>(lg.n), 0.0);
  for (int u = 0; u < lg.n; ++u) {
    double d = lg.self[static_cast<std::size_t>(u)];
    for (const auto& [v, w] : lg.adj[static_cast<std::size_t>(u)]) {
      (void)v;
      d += w;
    }
    lg.degree[static_cast<std::size_t>(u)] = d;
    lg.two_m += d;
  }
  return lg;
}

// Repeated single-node moves until a full sweep makes none. Returns whether
// any move happened. comm is updated in place (ids need not be dense).
// Candidate targets are the neighbor communities plus a fresh empty
// community (isolation); without the latter the result would not be a true
// local optimum under single-node moves.
bool one_level(const LevelGraph& lg, std::vector<int>& comm, const std::vector<int>& order) {
  std::vector<double> sum_tot(static_cast<std::size_t>(lg.n), 0.0);
  std::vector<int> members(static_cast<std::size_t>(lg.n), 0);
  for (int u = 0; u < lg.n; ++u) {
    sum_tot[static_cast<std::size_t>(comm[static_cast<std::size_t>(u)])] +=
        lg.degree[static_cast<std::size_t>(u)];
    members[static_cast<std::size_t>(comm[static_cast<std::size_t>(u)])]++;
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> free_ids;
  for (int c = 0; c < lg.n; ++c)
    if (members[static_cast<std::size_t>(c)] == 0) free_ids.push(c);

  std::vector<double> neigh_w(static_cast<std::size_t>(lg.n), 0.0);
  std::vector<int> touched;
  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (int u : order) {
      const int cu = comm[static_cast<std::size_t>(u)];
      touched.clear();
      for (const auto& [v, w] : lg.adj[static_cast<std::size_t>(u)]) {
        if (v == u) continue;
        int cv = comm[static_cast<std::size_t>(v)];
        if (neigh_w[static_cast<std::size_t>(cv)] == 0.0) touched.push_back(cv);
        neigh_w[static_cast<std::size_t>(cv)] += w;
      }
      std::sort(touched.begin(), touched.end());

      const double ku = lg.degree[static_cast<std::size_t>(u)];
      sum_tot[static_cast<std::size_t>(cu)] -= ku;
      const double gain_stay =
          neigh_w[static_cast<std::size_t>(cu)] - sum_tot[static_cast<std::size_t>(cu)] * ku / lg.two_m;

      int best_c = cu;
      double best_gain = gain_stay;
      for (int c : touched) {
        if (c == cu) continue;
        double gain =
            neigh_w[static_cast<std::size_t>(c)] - sum_tot[static_cast<std::size_t>(c)] * ku / lg.two_m;
        if (gain > best_gain) {
          best_gain = gain;
          best_c = c;
        }
      }
      // An empty community has insertion gain exactly 0. The fresh id
      // counts as the highest, so it never wins a tie.
      bool isolate = false;
      if (members[static_cast<std::size_t>(cu)] > 1 && !free_ids.empty() && 0.0 > best_gain) {
        best_gain = 0.0;
        isolate = true;
      }

      // Gains are proportional to dQ by 2/two_m; apply the threshold in Q units.
      if ((best_c != cu || isolate) &&
          2.0 * (best_gain - gain_stay) / lg.two_m > kLouvainMinGain) {
        if (isolate) {
          best_c = free_ids.top();
          free_ids.pop();
        }
        comm[static_cast<std::size_t>(u)] = best_c;
        sum_tot[static_cast<std::size_t>(best_c)] += ku;
        members[static_cast<std::size_t>(best_c)]++;
        if (--members[static_cast<std::size_t>(cu)] == 0) free_ids.push(cu);
        moved = true;
        any_move = true;
      } else {
        sum_tot[static_cast<std::size_t>(cu)] += ku;
      }
      for (int c : touched) neigh_w[static_cast<std::size_t>(c)] = 0.0;
    }
  }
  return any_move;
}

// Dense renumbering by first occurrence in node order.
int renumber_communities(std::vector<int>& comm) {
  std::unordered_map<int, int> remap;
  for (int& c : comm) {
    auto [it, inserted] = remap.emplace(c, static_cast<int>(remap.size()));
    c = it->second;
  }
  return static_cast<int>(remap.size());
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<int>& comm, int k) {
  LevelGraph out;
  out.n = k;
  out.adj.resize(static_cast<std::size_t>(k));
  out.self.assign(static_cast<std::size_t>(k), 0.0);
  out.degree.assign(static_cast<std::size_t>(k), 0.0);
  out.two_m = lg.two_m;

  std::unordered_map<std::uint64_t, double> cross;
  for (int u = 0; u < lg.n; ++u) {
    int cu = comm[static_cast<std::size_t>(u)];
    out.self[static_cast<std::size_t>(cu)] += lg.self[static_cast<std::size_t>(u)];
    out.degree[static_cast<std::size_t>(cu)] += lg.degree[static_cast<std::size_t>(u)];
    for (const auto& [v, w] : lg.adj[static_cast<std::size_t>(u)]) {
      int cv = comm[static_cast<std::size_t>(v)];
      if (cu == cv) {
        out.self[static_cast<std::size_t>(cu)] += w;  // both directions visited
      } else if (cu < cv) {
        cross[(static_cast<std::uint64_t>(static_cast<std::uint32_t>(cu)) << 32) |
              static_cast<std::uint32_t>(cv)] += w;
      }
    }
  }
  for (const auto& [key, w] : cross) {
    int a = static_cast<int>(key >> 32);
    int b = static_cast<int>(key & 0xffffffffu);
    out.adj[static_cast<std::size_t>(a)].emplace_back(b, w);
    out.adj[static_cast<std::size_t>(b)].emplace_back(a, w);
  }
  for (auto& nb : out.adj)
    std::sort(nb.begin(), nb.end());
  return out;
}

std::vector<int> shuffled_order(int n, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  return order;
}

}  // namespace

Partition louvain(const WeightedGraph& g, std::uint64_t seed, LouvainStats* stats) {
  if (g.directed()) throw std::invalid_argument("louvain: undirected graphs only");
  if (g.edge_count() == 0) throw std::invalid_argument("louvain: graph has no edges");
  if (stats) stats->level_modularity.clear();

  Rng rng(seed);
  const LevelGraph base = level_from(g);

  // orig_comm maps original node -> current community id.
  std::vector<int> orig_comm(static_cast<std::size_t>(g.node_count()));
  std::iota(orig_comm.begin(), orig_comm.end(), 0);

  // Aggregation cycles alternate with single-node refinement over the
  // original graph until neither makes a move. Refinement guarantees the
  // result is a local optimum under single-node moves; re-aggregating
  // afterwards lets whole groups keep moving, which is the "repeat until
  // no gain" of the original algorithm.
  while (true) {
    std::vector<int> start = orig_comm;
    int k = renumber_communities(start);
    LevelGraph lg = aggregate(base, start, k);
    std::vector<int> node_of = start;  // original node -> node of lg

    while (true) {
      std::vector<int> comm(static_cast<std::size_t>(lg.n));
      std::iota(comm.begin(), comm.end(), 0);
      bool moved = one_level(lg, comm, shuffled_order(lg.n, rng));
      if (!moved) break;
      int levels = renumber_communities(comm);
      for (int& c : node_of) c = comm[static_cast<std::size_t>(c)];
      if (stats) {
        Partition level;
        level.assignment = node_of;
        level.community_count = levels;
        stats->level_modularity.push_back(modularity(g, level));
      }
      if (levels == lg.n) break;
      lg = aggregate(lg, comm, levels);
    }

    orig_comm = std::move(node_of);
    if (!one_level(base, orig_comm, shuffled_order(base.n, rng))) break;
  }

  Partition p;
  p.assignment = std::move(orig_comm);
  p.renumber();
  if (stats) stats->level_modularity.push_back(modularity(g, p));
  return p;
}

std::pair<Partition, double> exhaustive_best_partition(const WeightedGraph& g) {
  if (g.directed())
    throw std::invalid_argument("exhaustive_best_partition: undirected graphs only");
  if (g.edge_count() == 0)
    throw std::invalid_argument("exhaustive_best_partition: graph has no edges");
  const int n = g.node_count();
  if (n > 12) throw std::invalid_argument("exhaustive_best_partition: more than 12 nodes");

  const std::vector<Edge> edges = g.sorted_edges();
  const std::vector<double> deg = g.weighted_degrees();
  const double two_m = std::accumulate(deg.begin(), deg.end(), 0.0);

  std::vector<int> a(static_cast<std::size_t>(n), 0);
  std::vector<int> mx(static_cast<std::size_t>(n), 0);
  std::vector<double> internal(static_cast<std::size_t>(n), 0.0);
  std::vector<double> comm_deg(static_cast<std::size_t>(n), 0.0);

  double best_q = -1.0;
  std::vector<int> best_a;

  while (true) {
    int k = mx[static_cast<std::size_t>(n - 1)] + 1;
    std::fill(internal.begin(), internal.begin() + k, 0.0);
    std::fill(comm_deg.begin(), comm_deg.begin() + k, 0.0);
    for (const Edge& e : edges) {
      if (a[static_cast<std::size_t>(e.u)] == a[static_cast<std::size_t>(e.v)])
        internal[static_cast<std::size_t>(a[static_cast<std::size_t>(e.u)])] += 2.0 * e.weight;
    }
    for (int i = 0; i < n; ++i)
      comm_deg[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])] +=
          deg[static_cast<std::size_t>(i)];
    double q = 0.0;
    for (int c = 0; c < k; ++c) {
      double frac = comm_deg[static_cast<std::size_t>(c)] / two_m;
      q += internal[static_cast<std::size_t>(c)] / two_m - frac * frac;
    }
    if (q > best_q) {
      best_q = q;
      best_a = a;
    }

    // Next restricted growth string.
    int i = n - 1;
    while (i > 0 && a[static_cast<std::size_t>(i)] == mx[static_cast<std::size_t>(i - 1)] + 1) --i;
    if (i == 0) break;
    ++a[static_cast<std::size_t>(i)];
    mx[static_cast<std::size_t>(i)] =
        std::max(mx[static_cast<std::size_t>(i - 1)], a[static_cast<std::size_t>(i)]);
    for (int j = i + 1; j < n; ++j) {
      a[static_cast<std::size_t>(j)] = 0;
      mx[static_cast<std::size_t>(j)] = mx[static_cast<std::size_t>(j - 1)];
    }
  }

  Partition p;
  p.assignment = std::move(best_a);
  p.community_count = *std::max_element(p.assignment.begin(), p.assignment.end()) + 1;
  return {std::move(p), best_q};
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  const std::set<std::string>& small = a.size() <= b.size() ? a : b;
  const std::set<std::string>& large = a.size() <= b.size() ? b : a;
  std::size_t inter = 0;
  for (const auto& x : small)
    if (large.count(x)) ++inter;
  std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need >= 2 observations");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  double r = sxy / std::sqrt(sxx * syy);
  if (r > 1.0) r = 1.0;
  if (r < -1.0) r = -1.0;
  return r;
}

}  // namespace campnet::graph
