#pragma once

#include "campnet/graph.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace campnet::graph {

// Extra per-node attributes keyed by attribute name; each vector is indexed
// by node id and must match the node count.
using NodeAttributes = std::map<std::string, std::vector<std::string>>;

void write_graphml(std::ostream& out, const WeightedGraph& g,
                   const NodeAttributes& attrs = {});
void write_dot(std::ostream& out, const WeightedGraph& g,
               const NodeAttributes& attrs = {});

// CSV "node,community" in node order.
void write_partition_csv(std::ostream& out, const WeightedGraph& g, const Partition& p);

std::string format_weight(double w);

struct GraphmlData {
  WeightedGraph graph;
  NodeAttributes attrs;
};

// Reads the GraphML subset write_graphml produces (one element per line).
// Not a general XML parser.
GraphmlData read_graphml(std::istream& in);

// Reads "node,community" back against the graph's labels.
Partition read_partition_csv(std::istream& in, const WeightedGraph& g);

}  // namespace campnet::graph
