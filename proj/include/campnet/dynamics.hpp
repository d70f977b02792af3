#pragma once

#include "campnet/graph.hpp"
#include "campnet/ingest.hpp"
#include "campnet/topicnet.hpp"

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace campnet::dynamics {

inline constexpr double kDefaultCoverageThreshold = 0.5;

struct CoverageCell {
  std::optional<double> rho;
  bool covered = false;
};

// Correlation between a topic's term weights and the candidate's use of
// those terms in one window. Undefined when either vector is constant.
CoverageCell coverage(const std::vector<double>& candidate_counts, const topicnet::Topic& topic,
                      double threshold = kDefaultCoverageThreshold);

// (candidate, topic, window) grid of coverage cells over a contiguous
// window run. Topics with fewer than 3 terms stay undefined everywhere.
struct CoverageMatrix {
  std::vector<std::string> candidates;  // sorted
  std::vector<int> topic_ids;           // ascending
  std::vector<TimeWindow> windows;      // contiguous grid
  std::vector<CoverageCell> cells;      // candidate-major, then topic, then window
  double threshold = kDefaultCoverageThreshold;
  std::vector<int> skipped_topics;      // fewer than 3 terms

  const CoverageCell& cell(std::size_t candidate, std::size_t topic, std::size_t window) const {
    return cells[(candidate * topic_ids.size() + topic) * windows.size() + window];
  }
  CoverageCell& cell(std::size_t candidate, std::size_t topic, std::size_t window) {
    return cells[(candidate * topic_ids.size() + topic) * windows.size() + window];
  }
};

// Buckets must be per-candidate (author set on every bucket) and cover a
// contiguous window grid, as produced by per-author bucketing.
CoverageMatrix build_coverage_matrix(const std::vector<ingest::CorpusBucket>& buckets,
                                     const std::vector<topicnet::Topic>& topics,
                                     double threshold = kDefaultCoverageThreshold);

// Candidate newly covers a topic that others covered one window earlier.
struct FollowEvent {
  std::string follower;
  std::set<std::string> leaders;  // non-empty, never contains follower
  int topic = 0;
  TimeWindow window;
};

// Scans windows after the first: an event fires when a candidate covers a
// topic, did not cover it in the previous window, and at least one other
// candidate covered it then. Ordered by window, then topic, then follower.
std::vector<FollowEvent> detect_follow_events(const CoverageMatrix& cov);

// Directed follower → leader graph, weight = number of events where that
// leader led that follower.
graph::WeightedGraph follower_network(const std::vector<FollowEvent>& events);

struct CandidateScore {
  std::string candidate;
  int led_spans = 0;       // events where the candidate is a leader
  int followed_spans = 0;  // events where the candidate is the follower
  int leadership = 0;      // led - followed
  int engagement = 0;      // led + followed
};

struct ScoreBoard {
  std::vector<CandidateScore> entries;  // candidate order as given
};

struct ScoreOptions {
  // Count distinct windows instead of events when a candidate leads or
  // follows several topics in one window.
  bool per_window = false;
};

ScoreBoard scores(const std::vector<FollowEvent>& events,
                  const std::vector<std::string>& candidates, const ScoreOptions& opts = {});

// CSV "candidate,topic,window_start,rho,covered"; rho empty when undefined.
void write_coverage_csv(std::ostream& out, const CoverageMatrix& cov);
CoverageMatrix read_coverage_csv(std::istream& in, double threshold = kDefaultCoverageThreshold);
// CSV "window_start,topic,follower,leaders" with leaders semicolon-joined.
void write_events_csv(std::ostream& out, const std::vector<FollowEvent>& events);
std::vector<FollowEvent> read_events_csv(std::istream& in,
                                         Granularity g = Granularity::biweekly,
                                         const Date& anchor = default_anchor());
// CSV "candidate,leadership,engagement".
void write_scores_csv(std::ostream& out, const ScoreBoard& board);

}  // namespace campnet::dynamics
