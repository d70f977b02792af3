#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "campnet/dynamics.hpp"
#include "campnet/rng.hpp"

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace campnet;
using doctest::Approx;

namespace {

TimeWindow biweekly_window(int index) {
  return window_for(Date::from_serial(16439 + 14 * index), Granularity::biweekly,
                    default_anchor());
}

topicnet::Topic topic_of(int id, const std::map<std::string, double>& membership) {
  topicnet::Topic t;
  t.id = id;
  t.membership = membership;
  return t;
}

ingest::CorpusBucket cbucket(const std::string& author, int window_index,
                             const std::vector<std::pair<std::string, int>>& counts) {
  ingest::CorpusBucket b;
  b.window = biweekly_window(window_index);
  b.author = author;
  ingest::Document d;
  d.id = author + "-" + std::to_string(window_index);
  d.author = author;
  d.timestamp = b.window.start.serial() * 86400;
  std::vector<std::string> toks;
  for (const auto& [word, n] : counts)
    for (int k = 0; k < n; ++k) toks.push_back(word);
  if (toks.empty()) toks.push_back("noise");
  b.documents.push_back(d);
  b.token_lists.push_back(std::move(toks));
  return b;
}

dynamics::CoverageMatrix empty_matrix(std::vector<std::string> candidates,
                                      std::vector<int> topic_ids, int first_window,
                                      int n_windows) {
  dynamics::CoverageMatrix cov;
  cov.candidates = std::move(candidates);
  cov.topic_ids = std::move(topic_ids);
  for (int i = 0; i < n_windows; ++i) cov.windows.push_back(biweekly_window(first_window + i));
  cov.cells.assign(cov.candidates.size() * cov.topic_ids.size() * cov.windows.size(), {});
  return cov;
}

void mark_covered(dynamics::CoverageMatrix& cov, std::size_t ci, std::size_t tj,
                  std::size_t wk, double rho = 0.9) {
  cov.cell(ci, tj, wk) = {rho, true};
}

}  // namespace

TEST_CASE("coverage correlates topic weights with candidate counts") {
  auto topic = topic_of(1, {{"w1", 10.0}, {"w2", 5.0}, {"w3", 2.0}, {"w4", 1.0}});

  auto cell = dynamics::coverage({9, 6, 1, 1}, topic);
  REQUIRE(cell.rho.has_value());
  CHECK(*cell.rho == Approx(0.9715476491974736).epsilon(1e-12));
  CHECK(cell.covered);

  CHECK_FALSE(dynamics::coverage({9, 6, 1, 1}, topic, 0.99).covered);
  CHECK(dynamics::coverage({9, 6, 1, 1}, topic, *cell.rho).covered);  // inclusive

  // Counts align with the ranked (weight-descending) term order.
  auto skewed = topic_of(2, {{"a", 1.0}, {"b", 5.0}, {"c", 3.0}});
  auto aligned = dynamics::coverage({5, 3, 1}, skewed);
  CHECK(*aligned.rho == Approx(1.0).epsilon(1e-12));

  auto reversed = dynamics::coverage({1, 3, 5}, skewed);
  CHECK(*reversed.rho < 0.0);
  CHECK_FALSE(reversed.covered);

  auto constant = dynamics::coverage({3, 3, 3, 3}, topic);
  CHECK_FALSE(constant.rho.has_value());
  CHECK_FALSE(constant.covered);

  CHECK_THROWS(dynamics::coverage({1, 2}, topic_of(3, {{"a", 1.0}, {"b", 2.0}})));
  CHECK_THROWS(dynamics::coverage({1, 2}, topic));  // length mismatch
}

TEST_CASE("coverage matrix over per-candidate buckets") {
  std::vector<topicnet::Topic> topics;
  topics.push_back(topic_of(1, {{"jobs", 5.0}, {"wages", 3.0}, {"taxes", 2.0}}));
  topics.push_back(topic_of(2, {{"climate", 4.0}, {"solar", 2.0}, {"wind", 1.0}}));
  topics.push_back(topic_of(3, {{"pair", 2.0}, {"only", 1.0}}));  // too small

  std::vector<ingest::CorpusBucket> buckets;
  buckets.push_back(cbucket("amy", 0, {{"jobs", 5}, {"wages", 3}, {"taxes", 2}}));
  buckets.push_back(cbucket("bob", 0, {{"jobs", 2}, {"wages", 3}, {"taxes", 5}}));
  buckets.push_back(cbucket("amy", 1, {{"climate", 4}, {"solar", 2}, {"wind", 1}}));
  buckets.push_back(cbucket("bob", 1, {{"jobs", 5}, {"wages", 3}, {"taxes", 2}}));
  buckets.push_back(cbucket("amy", 2, {}));
  buckets.push_back(cbucket("bob", 2, {{"climate", 4}, {"solar", 2}, {"wind", 1}}));

  auto cov = dynamics::build_coverage_matrix(buckets, topics);
  CHECK(cov.candidates == std::vector<std::string>{"amy", "bob"});
  CHECK(cov.topic_ids == std::vector<int>{1, 2, 3});
  CHECK(cov.windows.size() == 3);
  CHECK(cov.skipped_topics == std::vector<int>{3});

  CHECK(*cov.cell(0, 0, 0).rho == Approx(1.0).epsilon(1e-12));
  CHECK(cov.cell(0, 0, 0).covered);
  CHECK(*cov.cell(1, 0, 0).rho == Approx(-39.0 / 42.0).epsilon(1e-12));
  CHECK_FALSE(cov.cell(1, 0, 0).covered);
  CHECK_FALSE(cov.cell(0, 1, 0).rho.has_value());  // all-zero counts
  CHECK(cov.cell(1, 0, 1).covered);
  CHECK(cov.cell(0, 1, 1).covered);
  CHECK(cov.cell(1, 1, 2).covered);
  for (std::size_t ci = 0; ci < 2; ++ci)
    for (std::size_t wk = 0; wk < 3; ++wk) {
      CHECK_FALSE(cov.cell(ci, 2, wk).rho.has_value());
      CHECK_FALSE(cov.cell(ci, 2, wk).covered);
    }

  // The handoffs embedded above: bob picks up topic 1 in window 1 from
  // amy, then topic 2 in window 2 from amy.
  auto events = dynamics::detect_follow_events(cov);
  REQUIRE(events.size() == 2);
  CHECK(events[0].follower == "bob");
  CHECK(events[0].topic == 1);
  CHECK(events[0].leaders == std::set<std::string>{"amy"});
  CHECK(events[0].window == biweekly_window(1));
  CHECK(events[1].topic == 2);
  CHECK(events[1].window == biweekly_window(2));
}

TEST_CASE("coverage matrix rejects malformed bucket runs") {
  std::vector<topicnet::Topic> topics{topic_of(1, {{"a", 3.0}, {"b", 2.0}, {"c", 1.0}})};

  std::vector<ingest::CorpusBucket> gap;
  gap.push_back(cbucket("amy", 0, {{"a", 1}}));
  gap.push_back(cbucket("amy", 2, {{"a", 1}}));
  CHECK_THROWS(dynamics::build_coverage_matrix(gap, topics));

  std::vector<ingest::CorpusBucket> anon;
  anon.push_back(cbucket("amy", 0, {{"a", 1}}));
  anon[0].author.reset();
  CHECK_THROWS(dynamics::build_coverage_matrix(anon, topics));

  CHECK_THROWS(dynamics::build_coverage_matrix({}, topics));
}

TEST_CASE("follow events fire on uncovered-to-covered transitions") {
  // Windows 14 and 15 of the 2015 biweekly grid put the event on
  // 2015-08-02, with two candidates already on the topic.
  auto cov = empty_matrix({"clinton", "sanders", "trump"}, {1}, 14, 2);
  mark_covered(cov, 1, 0, 0);  // sanders leads
  mark_covered(cov, 2, 0, 0);  // trump leads
  mark_covered(cov, 0, 0, 1);  // clinton arrives
  mark_covered(cov, 1, 0, 1);
  mark_covered(cov, 2, 0, 1);

  auto events = dynamics::detect_follow_events(cov);
  REQUIRE(events.size() == 1);
  CHECK(events[0].follower == "clinton");
  CHECK(events[0].leaders == std::set<std::string>{"sanders", "trump"});
  CHECK(events[0].topic == 1);
  CHECK(events[0].window.start.iso() == "2015-08-02");
}

TEST_CASE("events order by window, topic, follower and allow re-entry") {
  auto cov = empty_matrix({"a", "b", "c"}, {1, 2}, 0, 3);
  // topic 1: a at w0; b arrives w1; c arrives w2 behind b.
  mark_covered(cov, 0, 0, 0);
  mark_covered(cov, 1, 0, 1);
  mark_covered(cov, 2, 0, 2);
  // topic 2: c at w0, drops out, returns at w2 behind a.
  mark_covered(cov, 2, 1, 0);
  mark_covered(cov, 0, 1, 1);
  mark_covered(cov, 2, 1, 2);

  auto events = dynamics::detect_follow_events(cov);
  REQUIRE(events.size() == 4);
  CHECK(events[0].window == biweekly_window(1));
  CHECK(events[0].topic == 1);
  CHECK(events[0].follower == "b");
  CHECK(events[0].leaders == std::set<std::string>{"a"});
  CHECK(events[1].topic == 2);
  CHECK(events[1].follower == "a");
  CHECK(events[1].leaders == std::set<std::string>{"c"});
  CHECK(events[2].window == biweekly_window(2));
  CHECK(events[2].topic == 1);
  CHECK(events[2].follower == "c");
  CHECK(events[2].leaders == std::set<std::string>{"b"});
  CHECK(events[3].topic == 2);
  CHECK(events[3].follower == "c");  // re-entry counts as following
  CHECK(events[3].leaders == std::set<std::string>{"a"});
}

TEST_CASE("self-started topics produce no events") {
  auto cov = empty_matrix({"a", "b"}, {1}, 0, 2);
  mark_covered(cov, 0, 0, 1);  // nobody covered the topic at w0
  CHECK(dynamics::detect_follow_events(cov).empty());

  auto stayed = empty_matrix({"a", "b"}, {1}, 0, 2);
  mark_covered(stayed, 0, 0, 0);
  mark_covered(stayed, 0, 0, 1);  // continuously covered, no transition
  mark_covered(stayed, 1, 0, 0);
  CHECK(dynamics::detect_follow_events(stayed).empty());

  CHECK_THROWS(dynamics::detect_follow_events(empty_matrix({"a"}, {1}, 0, 1)));
}

TEST_CASE("follower network accumulates directed edge weights") {
  std::vector<dynamics::FollowEvent> events;
  events.push_back({"bob", {"amy"}, 1, biweekly_window(1)});
  events.push_back({"bob", {"amy", "cara"}, 2, biweekly_window(2)});
  events.push_back({"amy", {"bob"}, 1, biweekly_window(3)});

  auto g = dynamics::follower_network(events);
  CHECK(g.directed());
  CHECK(g.node_count() == 3);
  auto id = [&](const std::string& l) { return *g.find_node(l); };
  CHECK(*g.edge_weight(id("bob"), id("amy")) == 2.0);
  CHECK(*g.edge_weight(id("bob"), id("cara")) == 1.0);
  CHECK(*g.edge_weight(id("amy"), id("bob")) == 1.0);
  CHECK_FALSE(g.edge_weight(id("amy"), id("cara")).has_value());
}

TEST_CASE("scores balance leads against follows") {
  std::vector<dynamics::FollowEvent> events;
  events.push_back({"bob", {"amy"}, 1, biweekly_window(1)});
  events.push_back({"bob", {"amy", "cara"}, 2, biweekly_window(1)});
  events.push_back({"amy", {"bob"}, 3, biweekly_window(2)});

  auto board = dynamics::scores(events, {"amy", "bob", "cara", "dan"});
  REQUIRE(board.entries.size() == 4);
  CHECK(board.entries[0].candidate == "amy");
  CHECK(board.entries[0].led_spans == 2);
  CHECK(board.entries[0].followed_spans == 1);
  CHECK(board.entries[0].leadership == 1);
  CHECK(board.entries[0].engagement == 3);
  CHECK(board.entries[1].leadership == 1 - 2);
  CHECK(board.entries[1].engagement == 3);
  CHECK(board.entries[2].led_spans == 1);
  CHECK(board.entries[3].engagement == 0);

  // Per-window counting collapses bob's two same-window follows into one.
  auto per_window = dynamics::scores(events, {"amy", "bob"}, {true});
  CHECK(per_window.entries[0].led_spans == 1);  // amy led twice in one window
  CHECK(per_window.entries[1].followed_spans == 1);
  CHECK(per_window.entries[1].led_spans == 1);
}

TEST_CASE("score totals reconcile with the event list") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    int n_cands = 3 + static_cast<int>(rng.next_below(4));
    std::vector<std::string> candidates;
    for (int i = 0; i < n_cands; ++i) candidates.push_back("c" + std::to_string(i));

    std::vector<dynamics::FollowEvent> events;
    std::size_t leader_slots = 0;
    int n_events = static_cast<int>(rng.next_below(21));
    for (int e = 0; e < n_events; ++e) {
      dynamics::FollowEvent ev;
      ev.follower = candidates[rng.next_below(static_cast<std::uint64_t>(n_cands))];
      for (const auto& c : candidates)
        if (c != ev.follower && rng.next_below(2) == 0) ev.leaders.insert(c);
      if (ev.leaders.empty())
        ev.leaders.insert(ev.follower == candidates[0] ? candidates[1] : candidates[0]);
      ev.topic = 1 + static_cast<int>(rng.next_below(5));
      ev.window = biweekly_window(static_cast<int>(rng.next_below(8)));
      leader_slots += ev.leaders.size();
      events.push_back(std::move(ev));
    }

    auto board = dynamics::scores(events, candidates);
    int led = 0, followed = 0;
    for (const auto& s : board.entries) {
      led += s.led_spans;
      followed += s.followed_spans;
      CHECK(s.leadership == s.led_spans - s.followed_spans);
      CHECK(s.engagement == s.led_spans + s.followed_spans);
      CHECK(s.engagement >= std::abs(s.leadership));
    }
    CHECK(followed == n_events);
    CHECK(led == static_cast<int>(leader_slots));

    auto per_window = dynamics::scores(events, candidates, {true});
    for (std::size_t i = 0; i < board.entries.size(); ++i) {
      CHECK(per_window.entries[i].led_spans <= board.entries[i].led_spans);
      CHECK(per_window.entries[i].followed_spans <= board.entries[i].followed_spans);
      CHECK(per_window.entries[i].engagement >= std::abs(per_window.entries[i].leadership));
    }
  }
}

TEST_CASE("coverage CSV round-trips biweekly grids") {
  std::vector<topicnet::Topic> topics;
  topics.push_back(topic_of(1, {{"jobs", 5.0}, {"wages", 3.0}, {"taxes", 2.0}}));
  topics.push_back(topic_of(2, {{"climate", 4.0}, {"solar", 2.0}, {"wind", 1.0}}));
  std::vector<ingest::CorpusBucket> buckets;
  buckets.push_back(cbucket("amy", 0, {{"jobs", 5}, {"wages", 3}, {"taxes", 2}}));
  buckets.push_back(cbucket("bob", 0, {{"jobs", 2}, {"wages", 3}, {"taxes", 5}}));
  buckets.push_back(cbucket("amy", 1, {{"climate", 4}, {"solar", 2}, {"wind", 1}}));
  buckets.push_back(cbucket("bob", 1, {{"jobs", 1}, {"climate", 3}}));
  auto cov = dynamics::build_coverage_matrix(buckets, topics, 0.4);

  std::ostringstream out;
  dynamics::write_coverage_csv(out, cov);
  CHECK(out.str().rfind("candidate,topic,window_start,rho,covered\n", 0) == 0);

  std::istringstream in(out.str());
  auto back = dynamics::read_coverage_csv(in, 0.4);
  CHECK(back.candidates == cov.candidates);
  CHECK(back.topic_ids == cov.topic_ids);
  REQUIRE(back.windows.size() == cov.windows.size());
  for (std::size_t i = 0; i < back.windows.size(); ++i) {
    CHECK(back.windows[i] == cov.windows[i]);
    CHECK(back.windows[i].granularity == Granularity::biweekly);
  }
  for (std::size_t ci = 0; ci < cov.candidates.size(); ++ci)
    for (std::size_t tj = 0; tj < cov.topic_ids.size(); ++tj)
      for (std::size_t wk = 0; wk < cov.windows.size(); ++wk) {
        const auto& a = cov.cell(ci, tj, wk);
        const auto& b = back.cell(ci, tj, wk);
        CHECK(a.covered == b.covered);
        REQUIRE(a.rho.has_value() == b.rho.has_value());
        if (a.rho) CHECK(*b.rho == Approx(*a.rho).epsilon(1e-6));
      }
}

TEST_CASE("coverage CSV reader infers monthly grids and validates") {
  auto monthly = [](int y, int m) {
    return window_for(Date{y, m, 10}, Granularity::monthly, default_anchor());
  };
  dynamics::CoverageMatrix cov;
  cov.candidates = {"amy"};
  cov.topic_ids = {1};
  cov.windows = {monthly(2015, 11), monthly(2015, 12), monthly(2016, 1)};
  cov.cells.assign(3, {});
  cov.cell(0, 0, 1) = {0.8, true};

  std::ostringstream out;
  dynamics::write_coverage_csv(out, cov);
  std::istringstream in(out.str());
  auto back = dynamics::read_coverage_csv(in);
  REQUIRE(back.windows.size() == 3);
  CHECK(back.windows[0].granularity == Granularity::monthly);
  CHECK(back.windows[2].start == Date{2016, 1, 1});
  CHECK(back.cell(0, 0, 1).covered);
  CHECK_FALSE(back.cell(0, 0, 0).covered);

  std::istringstream bad_header("who,what\n");
  CHECK_THROWS(dynamics::read_coverage_csv(bad_header));
  std::istringstream no_rows("candidate,topic,window_start,rho,covered\n");
  CHECK_THROWS(dynamics::read_coverage_csv(no_rows));
  std::istringstream gap(
      "candidate,topic,window_start,rho,covered\n"
      "amy,1,2015-01-04,0.5,true\n"
      "amy,1,2015-01-18,0.5,true\n"
      "amy,1,2015-03-01,0.5,true\n");
  CHECK_THROWS(dynamics::read_coverage_csv(gap));
}

TEST_CASE("events CSV round-trips leader sets") {
  std::vector<dynamics::FollowEvent> events;
  events.push_back({"clinton", {"sanders", "trump"}, 4, biweekly_window(15)});
  events.push_back({"walker", {"bush"}, 2, biweekly_window(16)});

  std::ostringstream out;
  dynamics::write_events_csv(out, events);
  auto text = out.str();
  CHECK(text.find("2015-08-02,4,clinton,sanders;trump\n") != std::string::npos);

  std::istringstream in(text);
  auto back = dynamics::read_events_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].follower == "clinton");
  CHECK(back[0].leaders == events[0].leaders);
  CHECK(back[0].topic == 4);
  CHECK(back[0].window == events[0].window);
  CHECK(back[1].window == events[1].window);

  std::istringstream no_leaders("window_start,topic,follower,leaders\n2015-08-02,1,amy,\n");
  CHECK_THROWS(dynamics::read_events_csv(no_leaders));
  std::istringstream self_led("window_start,topic,follower,leaders\n2015-08-02,1,amy,amy\n");
  CHECK_THROWS(dynamics::read_events_csv(self_led));
  std::istringstream bad_date("window_start,topic,follower,leaders\nsoon,1,amy,bob\n");
  CHECK_THROWS(dynamics::read_events_csv(bad_date));
}

TEST_CASE("scores CSV lists leadership and engagement") {
  std::vector<dynamics::FollowEvent> events;
  events.push_back({"bob", {"amy"}, 1, biweekly_window(1)});
  auto board = dynamics::scores(events, {"amy", "bob"});
  std::ostringstream out;
  dynamics::write_scores_csv(out, board);
  CHECK(out.str() ==
        "candidate,leadership,engagement\n"
        "amy,1,1\n"
        "bob,-1,1\n");
}
