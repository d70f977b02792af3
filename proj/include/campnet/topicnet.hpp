#pragma once

#include "campnet/graph.hpp"
#include "campnet/ingest.hpp"
#include "campnet/lexicon.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace campnet::topicnet {

inline constexpr double kDefaultMinJaccard = 0.1;

// Term co-occurrence network of one (candidate, window) subcorpus. Edge
// weight counts the distinct documents containing both endpoint terms.
struct SemanticNetwork {
  std::string candidate;
  TimeWindow window;
  graph::WeightedGraph graph;  // term nodes
  std::map<std::string, std::size_t> term_counts;  // occurrences in this subcorpus

  bool empty() const { return graph.node_count() == 0; }
};

// Buckets with fewer than 2 term occurrences come out empty and are
// skipped downstream.
SemanticNetwork build_semantic_network(const ingest::CorpusBucket& bucket,
                                       const lexicon::TermSet& terms);

// One Louvain community of terms within a (candidate, window) network.
struct Subtopic {
  std::string candidate;
  TimeWindow window;
  int index = 0;  // unique within (candidate, window), largest community first
  std::set<std::string> terms;
  std::map<std::string, std::size_t> term_counts;

  std::string label() const;  // "candidate:window:index"
};

// Louvain communities of the term network; singleton isolated terms are
// discarded. Indices go by decreasing community size, ties by smallest
// member term.
std::vector<Subtopic> extract_subtopics(const SemanticNetwork& net, std::uint64_t seed);

// Subtopic overlap network: edge iff jaccard(term sets) reaches
// min_jaccard, weight = the Jaccard value.
graph::WeightedGraph build_subtopic_network(const std::vector<Subtopic>& subtopics,
                                     double min_jaccard = kDefaultMinJaccard);

// Recurring fuzzy topic: term membership aggregated over the merged
// subtopics. A term may carry weight in several topics.
struct Topic {
  int id = 0;  // 1-based, assigned in decreasing total weight
  std::map<std::string, double> membership;
  std::vector<std::size_t> constituent_subtopics;  // indices into the input list

  double total_weight() const;
  // Membership entries ordered by decreasing weight, ties by text.
  std::vector<std::pair<std::string, double>> ranked_terms() const;
};

// Louvain over the subtopic network; each community becomes a Topic whose
// term weights sum the constituent term counts. Subtopics with no overlap
// edge are dropped unless keep_isolated is set.
std::vector<Topic> merge_topics(const graph::WeightedGraph& subtopic_net,
                                const std::vector<Subtopic>& subtopics, std::uint64_t seed,
                                bool keep_isolated = false);

// JSONL {candidate, window_start, index, terms[], counts[]}, one subtopic
// per line; counts keep merge weights reconstructible from the file.
void write_subtopics_jsonl(std::ostream& out, const std::vector<Subtopic>& subtopics);
std::vector<Subtopic> read_subtopics_jsonl(std::istream& in, Granularity g,
                                           const Date& anchor = default_anchor());

// JSON [{id, terms: [{text, weight}]}].
void write_topics_json(std::ostream& out, const std::vector<Topic>& topics);
// Reads the same layout; constituent subtopic references are not stored in
// the file and come back empty.
std::vector<Topic> read_topics_json(std::istream& in);

// "topic N: t1; t2; ..." with the top_k heaviest terms per topic.
void write_topic_listing(std::ostream& out, const std::vector<Topic>& topics, std::size_t top_k);

}  // namespace campnet::topicnet
