#include "campnet/topicnet.hpp"

#include "json.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace campnet::topicnet {

namespace {

// Terms present in one document, with occurrence counts.
std::map<std::string, std::size_t> doc_term_counts(
    const std::vector<std::string>& toks,
    const std::unordered_map<std::string_view, bool>& in_set, int max_arity) {
  std::map<std::string, std::size_t> found;
  std::string joined;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (in_set.count(std::string_view(toks[i]))) ++found[toks[i]];
    if (max_arity >= 2 && i + 1 < toks.size()) {
      joined = toks[i];
      joined += ' ';
      joined += toks[i + 1];
      if (in_set.count(std::string_view(joined))) ++found[joined];
      if (max_arity >= 3 && i + 2 < toks.size()) {
        joined += ' ';
        joined += toks[i + 2];
        if (in_set.count(std::string_view(joined))) ++found[joined];
      }
    }
  }
  return found;
}

}  // namespace

SemanticNetwork build_semantic_network(const ingest::CorpusBucket& bucket,
                                       const lexicon::TermSet& terms) {
  SemanticNetwork net;
  net.candidate = bucket.author.value_or("");
  net.window = bucket.window;

  int max_arity = 1;
  std::unordered_map<std::string_view, bool> in_set;
  in_set.reserve(terms.terms.size());
  for (const auto& t : terms.terms) {
    max_arity = std::max(max_arity, t.arity);
    in_set.emplace(t.text, true);
  }

  std::vector<std::map<std::string, std::size_t>> per_doc;
  std::size_t total_occurrences = 0;
  for (const auto& toks : bucket.token_lists) {
    auto found = doc_term_counts(toks, in_set, max_arity);
    for (const auto& [term, c] : found) {
      net.term_counts[term] += c;
      total_occurrences += c;
    }
    per_doc.push_back(std::move(found));
  }
  if (total_occurrences < 2) {
    net.term_counts.clear();
    return net;
  }

  for (const auto& [term, _] : net.term_counts) net.graph.add_node(term);

  std::map<std::pair<int, int>, std::size_t> pair_docs;
  for (const auto& found : per_doc) {
    std::vector<int> ids;
    for (const auto& [term, _] : found) ids.push_back(*net.graph.find_node(term));
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b)
        ++pair_docs[{std::min(ids[a], ids[b]), std::max(ids[a], ids[b])}];
  }
  for (const auto& [uv, count] : pair_docs)
    net.graph.add_edge(uv.first, uv.second, static_cast<double>(count));
  return net;
}

std::string Subtopic::label() const {
  return candidate + ":" + window.label() + ":" + std::to_string(index);
}

std::vector<Subtopic> extract_subtopics(const SemanticNetwork& net, std::uint64_t seed) {
  if (net.graph.edge_count() == 0) return {};
  graph::Partition part = louvain(net.graph, seed);
  auto groups = part.groups();

  std::vector<std::vector<int>> kept;
  for (auto& g : groups) {
    if (g.size() == 1 && net.graph.neighbors(g.front()).empty()) continue;
    std::sort(g.begin(), g.end(), [&](int a, int b) { return net.graph.label(a) < net.graph.label(b); });
    kept.push_back(std::move(g));
  }
  std::sort(kept.begin(), kept.end(), [&](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return net.graph.label(a.front()) < net.graph.label(b.front());
  });

  std::vector<Subtopic> out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    Subtopic st;
    st.candidate = net.candidate;
    st.window = net.window;
    st.index = static_cast<int>(i);
    for (int id : kept[i]) {
      const std::string& term = net.graph.label(id);
      st.terms.insert(term);
      st.term_counts[term] = net.term_counts.at(term);
    }
    out.push_back(std::move(st));
  }
  return out;
}

graph::WeightedGraph build_subtopic_network(const std::vector<Subtopic>& subtopics,
                                     double min_jaccard) {
  if (subtopics.size() < 2)
    throw std::runtime_error("subtopic network needs at least 2 subtopics, got " +
                             std::to_string(subtopics.size()));
  graph::WeightedGraph g;
  for (const auto& st : subtopics) g.add_node(st.label());
  for (std::size_t i = 0; i < subtopics.size(); ++i) {
    for (std::size_t j = i + 1; j < subtopics.size(); ++j) {
      double jac = graph::jaccard(subtopics[i].terms, subtopics[j].terms);
      if (jac > 0.0 && jac >= min_jaccard)
        g.add_edge(static_cast<int>(i), static_cast<int>(j), jac);
    }
  }
  return g;
}

double Topic::total_weight() const {
  double sum = 0.0;
  for (const auto& [_, w] : membership) sum += w;
  return sum;
}

std::vector<std::pair<std::string, double>> Topic::ranked_terms() const {
  std::vector<std::pair<std::string, double>> out(membership.begin(), membership.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

std::vector<Topic> merge_topics(const graph::WeightedGraph& subtopic_net,
                                const std::vector<Subtopic>& subtopics, std::uint64_t seed,
                                bool keep_isolated) {
  if (subtopic_net.node_count() != static_cast<int>(subtopics.size()))
    throw std::runtime_error("subtopic network does not match the subtopic list");

  graph::Partition part = subtopic_net.edge_count() > 0
                       ? louvain(subtopic_net, seed)
                       : graph::Partition::singletons(subtopic_net.node_count());

  std::vector<Topic> topics;
  for (const auto& group : part.groups()) {
    if (group.size() == 1 && subtopic_net.neighbors(group.front()).empty() && !keep_isolated)
      continue;
    Topic t;
    for (int node : group) {
      t.constituent_subtopics.push_back(static_cast<std::size_t>(node));
      for (const auto& [term, c] : subtopics[static_cast<std::size_t>(node)].term_counts)
        t.membership[term] += static_cast<double>(c);
    }
    std::sort(t.constituent_subtopics.begin(), t.constituent_subtopics.end());
    topics.push_back(std::move(t));
  }

  std::sort(topics.begin(), topics.end(), [](const Topic& a, const Topic& b) {
    double wa = a.total_weight(), wb = b.total_weight();
    if (wa != wb) return wa > wb;
    auto ra = a.ranked_terms(), rb = b.ranked_terms();
    return ra.front().first < rb.front().first;
  });
  for (std::size_t i = 0; i < topics.size(); ++i) topics[i].id = static_cast<int>(i) + 1;
  return topics;
}

void write_subtopics_jsonl(std::ostream& out, const std::vector<Subtopic>& subtopics) {
  for (const auto& st : subtopics) {
    nlohmann::ordered_json j;
    j["candidate"] = st.candidate;
    j["window_start"] = st.window.start.iso();
    j["index"] = st.index;
    j["terms"] = nlohmann::ordered_json::array();
    j["counts"] = nlohmann::ordered_json::array();
    for (const auto& term : st.terms) {
      j["terms"].push_back(term);
      j["counts"].push_back(st.term_counts.at(term));
    }
    out << j.dump() << "\n";
  }
}

std::vector<Subtopic> read_subtopics_jsonl(std::istream& in, Granularity g, const Date& anchor) {
  std::vector<Subtopic> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("candidate") ||
        !j.contains("window_start") || !j.contains("index") || !j.contains("terms"))
      throw std::runtime_error("subtopics line " + std::to_string(line_no) + ": invalid record");
    Subtopic st;
    st.candidate = j["candidate"].get<std::string>();
    auto d = parse_date(j["window_start"].get<std::string>());
    if (!d)
      throw std::runtime_error("subtopics line " + std::to_string(line_no) + ": bad window_start");
    st.window = window_for(*d, g, anchor);
    st.index = j["index"].get<int>();
    auto terms = j["terms"].get<std::vector<std::string>>();
    std::vector<std::size_t> counts(terms.size(), 1);
    if (j.contains("counts")) counts = j["counts"].get<std::vector<std::size_t>>();
    if (counts.size() != terms.size())
      throw std::runtime_error("subtopics line " + std::to_string(line_no) +
                               ": terms/counts length mismatch");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      st.terms.insert(terms[i]);
      st.term_counts[terms[i]] = counts[i];
    }
    out.push_back(std::move(st));
  }
  return out;
}

void write_topics_json(std::ostream& out, const std::vector<Topic>& topics) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& t : topics) {
    nlohmann::ordered_json jt;
    jt["id"] = t.id;
    jt["terms"] = nlohmann::ordered_json::array();
    for (const auto& [text, weight] : t.ranked_terms())
      jt["terms"].push_back({{"text", text}, {"weight", weight}});
    arr.push_back(std::move(jt));
  }
  out << arr.dump(2) << "\n";
}

std::vector<Topic> read_topics_json(std::istream& in) {
  nlohmann::json arr = nlohmann::json::parse(in, nullptr, false);
  if (arr.is_discarded() || !arr.is_array())
    throw std::runtime_error("topics file: expected a JSON array");
  std::vector<Topic> topics;
  for (const auto& jt : arr) {
    if (!jt.is_object() || !jt.contains("id") || !jt.contains("terms"))
      throw std::runtime_error("topics file: entries need id and terms");
    Topic t;
    t.id = jt["id"].get<int>();
    for (const auto& term : jt["terms"])
      t.membership[term.at("text").get<std::string>()] = term.at("weight").get<double>();
    topics.push_back(std::move(t));
  }
  return topics;
}

void write_topic_listing(std::ostream& out, const std::vector<Topic>& topics,
                         std::size_t top_k) {
  for (const auto& t : topics) {
    out << "topic " << t.id << ": ";
    auto ranked = t.ranked_terms();
    for (std::size_t i = 0; i < ranked.size() && i < top_k; ++i) {
      if (i) out << "; ";
      out << ranked[i].first;
    }
    out << "\n";
  }
}

}  // namespace campnet::topicnet
