#pragma once

#include "campnet/graph.hpp"
#include "campnet/ingest.hpp"
#include "campnet/lexicon.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace campnet::corpusnet {

inline constexpr double kDefaultThreshold = 0.6;

struct BucketMeta {
  std::size_t document_count = 0;
  TimeWindow window;
};

// Similarity network over time-window corpora: one node per non-empty
// bucket, edges where base-term frequency profiles correlate.
struct CorpusNetwork {
  graph::WeightedGraph graph;
  std::map<std::string, BucketMeta> bucket_meta;  // node label → meta
  double threshold = kDefaultThreshold;
  std::vector<std::string> excluded_empty;    // labels of skipped empty buckets
  std::vector<std::string> constant_vector_warnings;
};

// Connects buckets whose relative base-term frequencies reach the Pearson
// threshold (inclusive). Negative correlations never become edges. Empty
// buckets are excluded and reported; constant vectors leave a node
// isolated with a warning.
CorpusNetwork build_corpus_network(const std::vector<ingest::CorpusBucket>& buckets,
                                   const lexicon::TermSet& base,
                                   double threshold = kDefaultThreshold);

struct CommunityContinuity {
  int community = 0;
  bool contiguous = false;
  Date first_start;  // earliest window start in the community
  Date last_end;     // day after the latest window
  std::vector<std::string> nodes;
};

// One entry per community, ordered chronologically by earliest window.
// Contiguous means the community's distinct windows form an unbroken
// consecutive run at the bucket granularity.
std::vector<CommunityContinuity> temporal_continuity(const CorpusNetwork& net,
                                                     const graph::Partition& p);

struct LinearityOutlier {
  std::string node;
  std::string strongest_neighbor;
  int gap = 0;  // windows apart
};

struct LinearityReport {
  double fraction_adjacent = 0.0;  // over non-isolated nodes
  std::size_t isolated = 0;
  std::vector<LinearityOutlier> outliers;  // strongest neighbor > 2 windows away
};

LinearityReport quasi_linearity(const CorpusNetwork& net);

struct ClusterActivity {
  int community = 0;
  std::size_t buckets = 0;
  double mean_docs = 0.0;
};

struct ActivityComparison {
  int community_a = 0;
  int community_b = 0;
  bool skipped = false;  // a side has fewer than 2 buckets
  double t = 0.0;
  double p = 1.0;
};

struct ActivityReport {
  std::vector<ClusterActivity> clusters;        // chronological order
  std::vector<ActivityComparison> comparisons;  // adjacent pairs in that order
};

ActivityReport cluster_activity(const CorpusNetwork& net, const graph::Partition& p);

struct Diagnostics {
  double modularity = 0.0;
  std::vector<CommunityContinuity> continuity;
  LinearityReport linearity;
  ActivityReport activity;
};

Diagnostics diagnose(const CorpusNetwork& net, const graph::Partition& p);
void write_diagnostics_text(std::ostream& out, const Diagnostics& d);
std::string diagnostics_json(const Diagnostics& d);

}  // namespace campnet::corpusnet
