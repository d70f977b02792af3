#include "campnet/graph_io.hpp"

#include "campnet/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <string_view>

namespace campnet::graph {

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void check_attrs(const WeightedGraph& g, const NodeAttributes& attrs) {
  for (const auto& [name, values] : attrs) {
    if (values.size() != static_cast<std::size_t>(g.node_count()))
      throw std::invalid_argument("node attribute '" + name + "' has wrong length");
  }
}

}  // namespace

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", w);
  return buf;
}

void write_graphml(std::ostream& out, const WeightedGraph& g, const NodeAttributes& attrs) {
  check_attrs(g, attrs);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
  out << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n";
  for (const auto& [name, values] : attrs) {
    (void)values;
    out << "  <key id=\"" << xml_escape(name) << "\" for=\"node\" attr.name=\""
        << xml_escape(name) << "\" attr.type=\"string\"/>\n";
  }
  out << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n";
  out << "  <graph id=\"G\" edgedefault=\"" << (g.directed() ? "directed" : "undirected")
      << "\">\n";
  for (int i = 0; i < g.node_count(); ++i) {
    out << "    <node id=\"n" << i << "\">\n";
    out << "      <data key=\"label\">" << xml_escape(g.label(i)) << "</data>\n";
    for (const auto& [name, values] : attrs)
      out << "      <data key=\"" << xml_escape(name) << "\">"
          << xml_escape(values[static_cast<std::size_t>(i)]) << "</data>\n";
    out << "    </node>\n";
  }
  for (const Edge& e : g.sorted_edges()) {
    out << "    <edge source=\"n" << e.u << "\" target=\"n" << e.v << "\">"
        << "<data key=\"weight\">" << format_weight(e.weight) << "</data></edge>\n";
  }
  out << "  </graph>\n";
  out << "</graphml>\n";
}

void write_dot(std::ostream& out, const WeightedGraph& g, const NodeAttributes& attrs) {
  check_attrs(g, attrs);
  const char* arrow = g.directed() ? " -> " : " -- ";
  out << (g.directed() ? "digraph" : "graph") << " G {\n";
  for (int i = 0; i < g.node_count(); ++i) {
    out << "  " << dot_escape(g.label(i));
    if (!attrs.empty()) {
      out << " [";
      bool first = true;
      for (const auto& [name, values] : attrs) {
        if (!first) out << ", ";
        first = false;
        out << name << "=" << dot_escape(values[static_cast<std::size_t>(i)]);
      }
      out << "]";
    }
    out << ";\n";
  }
  for (const Edge& e : g.sorted_edges()) {
    out << "  " << dot_escape(g.label(e.u)) << arrow << dot_escape(g.label(e.v))
        << " [weight=" << format_weight(e.weight) << "];\n";
  }
  out << "}\n";
}

void write_partition_csv(std::ostream& out, const WeightedGraph& g, const Partition& p) {
  if (p.assignment.size() != static_cast<std::size_t>(g.node_count()))
    throw std::invalid_argument("partition does not cover the graph");
  out << "node,community\n";
  for (int i = 0; i < g.node_count(); ++i)
    out << csv::join_row({g.label(i), std::to_string(p.assignment[static_cast<std::size_t>(i)])});
}

namespace {

std::string xml_unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      if (s.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; continue; }
      if (s.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; continue; }
      if (s.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; continue; }
      if (s.compare(i, 6, "&quot;") == 0) { out += '"'; i += 6; continue; }
    }
    out += s[i++];
  }
  return out;
}

// Value of name="..." inside an element's opening tag.
std::optional<std::string> tag_attr(std::string_view line, std::string_view name) {
  std::string needle = std::string(name) + "=\"";
  auto pos = line.find(needle);
  if (pos == std::string_view::npos) return std::nullopt;
  pos += needle.size();
  auto end = line.find('"', pos);
  if (end == std::string_view::npos) return std::nullopt;
  return xml_unescape(line.substr(pos, end - pos));
}

// Text content of the first <data key="...">...</data> on the line.
std::optional<std::pair<std::string, std::string>> data_element(std::string_view line) {
  auto open = line.find("<data ");
  if (open == std::string_view::npos) return std::nullopt;
  auto key = tag_attr(line.substr(open), "key");
  auto gt = line.find('>', open);
  auto close = line.find("</data>", open);
  if (!key || gt == std::string_view::npos || close == std::string_view::npos || close < gt)
    return std::nullopt;
  return std::make_pair(*key, xml_unescape(line.substr(gt + 1, close - gt - 1)));
}

int node_number(const std::string& id) {
  if (id.size() < 2 || id[0] != 'n') throw std::runtime_error("graphml: bad node id '" + id + "'");
  return std::stoi(id.substr(1));
}

}  // namespace

GraphmlData read_graphml(std::istream& in) {
  std::optional<WeightedGraph> g;
  std::vector<std::string> attr_keys;
  std::vector<std::string> labels;
  std::vector<std::map<std::string, std::string>> node_data;
  bool in_node = false;

  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    std::string_view body(line.data() + first, line.size() - first);

    if (body.rfind("<key ", 0) == 0) {
      auto id = tag_attr(body, "id");
      auto target = tag_attr(body, "for");
      if (id && target && *target == "node" && *id != "label") attr_keys.push_back(*id);
    } else if (body.rfind("<graph ", 0) == 0) {
      auto def = tag_attr(body, "edgedefault");
      g.emplace(def && *def == "directed");
    } else if (body.rfind("<node ", 0) == 0) {
      auto id = tag_attr(body, "id");
      if (!id || node_number(*id) != static_cast<int>(labels.size()))
        throw std::runtime_error("graphml: nodes must appear as n0, n1, ... in order");
      node_data.emplace_back();
      labels.emplace_back();
      in_node = true;
    } else if (body.rfind("</node>", 0) == 0) {
      in_node = false;
    } else if (in_node && body.rfind("<data ", 0) == 0) {
      auto kv = data_element(body);
      if (!kv) throw std::runtime_error("graphml: malformed data element");
      if (kv->first == "label")
        labels.back() = kv->second;
      else
        node_data.back()[kv->first] = kv->second;
    } else if (body.rfind("<edge ", 0) == 0) {
      if (!g) throw std::runtime_error("graphml: edge before graph element");
      if (g->node_count() == 0)
        for (const auto& label : labels) g->add_node(label);
      auto src = tag_attr(body, "source");
      auto dst = tag_attr(body, "target");
      auto kv = data_element(body);
      if (!src || !dst || !kv || kv->first != "weight")
        throw std::runtime_error("graphml: malformed edge element");
      g->add_edge(node_number(*src), node_number(*dst), std::stod(kv->second));
    }
  }
  if (!g) throw std::runtime_error("graphml: no graph element found");
  if (g->node_count() == 0)
    for (const auto& label : labels) g->add_node(label);

  GraphmlData out{std::move(*g), {}};
  for (const auto& key : attr_keys) {
    std::vector<std::string> values;
    values.reserve(node_data.size());
    for (const auto& data : node_data) {
      auto it = data.find(key);
      values.push_back(it == data.end() ? std::string() : it->second);
    }
    out.attrs[key] = std::move(values);
  }
  return out;
}

Partition read_partition_csv(std::istream& in, const WeightedGraph& g) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->size() < 2 || (*header)[0] != "node")
    throw std::runtime_error("partition file needs a 'node,community' header");
  Partition p;
  p.assignment.assign(static_cast<std::size_t>(g.node_count()), -1);
  while (auto row = reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != 2) throw std::runtime_error("partition file: wrong field count");
    auto id = g.find_node((*row)[0]);
    if (!id) throw std::runtime_error("partition file: unknown node '" + (*row)[0] + "'");
    p.assignment[static_cast<std::size_t>(*id)] = std::stoi((*row)[1]);
  }
  int max_c = -1;
  for (int c : p.assignment) {
    if (c < 0) throw std::runtime_error("partition file does not cover every node");
    max_c = std::max(max_c, c);
  }
  p.community_count = max_c + 1;
  return p;
}

}  // namespace campnet::graph
