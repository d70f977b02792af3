#include "campnet/dynamics.hpp"

#include "campnet/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace campnet::dynamics {

CoverageCell coverage(const std::vector<double>& candidate_counts, const topicnet::Topic& topic,
                      double threshold) {
  if (topic.membership.size() < 3)
    throw std::runtime_error("coverage needs a topic with at least 3 terms");
  auto ranked = topic.ranked_terms();
  if (candidate_counts.size() != ranked.size())
    throw std::runtime_error("candidate counts do not match the topic term list");
  std::vector<double> weights;
  weights.reserve(ranked.size());
  for (const auto& [_, w] : ranked) weights.push_back(w);

  CoverageCell cell;
  cell.rho = graph::pearson(weights, candidate_counts);
  cell.covered = cell.rho.has_value() && *cell.rho >= threshold;
  return cell;
}

CoverageMatrix build_coverage_matrix(const std::vector<ingest::CorpusBucket>& buckets,
                                     const std::vector<topicnet::Topic>& topics,
                                     double threshold) {
  CoverageMatrix cov;
  cov.threshold = threshold;

  std::map<std::int64_t, TimeWindow> window_by_start;
  std::set<std::string> candidate_set;
  for (const auto& b : buckets) {
    if (!b.author) throw std::runtime_error("coverage needs per-candidate buckets");
    window_by_start.emplace(b.window.start.serial(), b.window);
    candidate_set.insert(*b.author);
  }
  if (window_by_start.empty()) throw std::runtime_error("coverage needs at least one bucket");
  for (const auto& [_, w] : window_by_start) cov.windows.push_back(w);
  for (std::size_t i = 1; i < cov.windows.size(); ++i)
    if (window_gap(cov.windows[i - 1], cov.windows[i]) != 1)
      throw std::runtime_error("coverage windows must form a contiguous grid (gap after " +
                               cov.windows[i - 1].label() + ")");
  cov.candidates.assign(candidate_set.begin(), candidate_set.end());
  for (const auto& t : topics) cov.topic_ids.push_back(t.id);
  std::sort(cov.topic_ids.begin(), cov.topic_ids.end());

  // Union term set over all topics, counted once per bucket.
  lexicon::TermSet union_terms;
  {
    std::set<std::string> seen;
    for (const auto& t : topics)
      for (const auto& [term, _] : t.membership) seen.insert(term);
    for (const auto& text : seen) {
      lexicon::Term term;
      term.text = text;
      term.arity = 1 + static_cast<int>(std::count(text.begin(), text.end(), ' '));
      term.is_hashtag = !text.empty() && text[0] == '#';
      union_terms.terms.push_back(std::move(term));
    }
    union_terms.kind = lexicon::TermKind::extracted;
  }

  std::unordered_map<std::string, std::size_t> union_index;
  for (std::size_t i = 0; i < union_terms.terms.size(); ++i)
    union_index.emplace(union_terms.terms[i].text, i);

  auto cindex = [&](const std::string& c) {
    return static_cast<std::size_t>(
        std::lower_bound(cov.candidates.begin(), cov.candidates.end(), c) -
        cov.candidates.begin());
  };
  auto windex = [&](const TimeWindow& w) {
    return static_cast<std::size_t>(window_gap(cov.windows.front(), w));
  };

  // Per (candidate, window) counts over the union term set.
  std::vector<std::vector<std::size_t>> counts(
      cov.candidates.size() * cov.windows.size(),
      std::vector<std::size_t>(union_terms.terms.size(), 0));
  for (const auto& b : buckets) {
    if (b.empty() || union_terms.terms.empty()) continue;
    auto fv = lexicon::frequency_vector(b, union_terms);
    auto& slot = counts[cindex(*b.author) * cov.windows.size() + windex(b.window)];
    for (std::size_t i = 0; i < fv.counts.size(); ++i) slot[i] += fv.counts[i];
  }

  cov.cells.assign(cov.candidates.size() * cov.topic_ids.size() * cov.windows.size(), {});
  for (std::size_t tj = 0; tj < topics.size(); ++tj) {
    const auto& topic = topics[tj];
    auto topic_pos = static_cast<std::size_t>(
        std::lower_bound(cov.topic_ids.begin(), cov.topic_ids.end(), topic.id) -
        cov.topic_ids.begin());
    if (topic.membership.size() < 3) {
      cov.skipped_topics.push_back(topic.id);
      continue;
    }
    auto ranked = topic.ranked_terms();
    std::vector<std::size_t> term_slots;
    term_slots.reserve(ranked.size());
    for (const auto& [text, _] : ranked) term_slots.push_back(union_index.at(text));

    for (std::size_t ci = 0; ci < cov.candidates.size(); ++ci) {
      for (std::size_t wk = 0; wk < cov.windows.size(); ++wk) {
        const auto& slot = counts[ci * cov.windows.size() + wk];
        std::vector<double> vec(ranked.size());
        for (std::size_t i = 0; i < term_slots.size(); ++i)
          vec[i] = static_cast<double>(slot[term_slots[i]]);
        cov.cell(ci, topic_pos, wk) = coverage(vec, topic, threshold);
      }
    }
  }
  std::sort(cov.skipped_topics.begin(), cov.skipped_topics.end());
  return cov;
}

std::vector<FollowEvent> detect_follow_events(const CoverageMatrix& cov) {
  if (cov.windows.size() < 2)
    throw std::runtime_error("follow detection needs at least 2 windows");
  std::vector<FollowEvent> events;
  for (std::size_t wk = 1; wk < cov.windows.size(); ++wk) {
    for (std::size_t tj = 0; tj < cov.topic_ids.size(); ++tj) {
      for (std::size_t ci = 0; ci < cov.candidates.size(); ++ci) {
        if (!cov.cell(ci, tj, wk).covered || cov.cell(ci, tj, wk - 1).covered) continue;
        std::set<std::string> leaders;
        for (std::size_t other = 0; other < cov.candidates.size(); ++other)
          if (other != ci && cov.cell(other, tj, wk - 1).covered)
            leaders.insert(cov.candidates[other]);
        if (leaders.empty()) continue;  // self-started topic
        FollowEvent ev;
        ev.follower = cov.candidates[ci];
        ev.leaders = std::move(leaders);
        ev.topic = cov.topic_ids[tj];
        ev.window = cov.windows[wk];
        events.push_back(std::move(ev));
      }
    }
  }
  return events;
}

graph::WeightedGraph follower_network(const std::vector<FollowEvent>& events) {
  graph::WeightedGraph g(true);
  std::map<std::pair<std::string, std::string>, double> weights;
  for (const auto& ev : events) {
    g.ensure_node(ev.follower);
    for (const auto& leader : ev.leaders) {
      g.ensure_node(leader);
      weights[{ev.follower, leader}] += 1.0;
    }
  }
  for (const auto& [pair, w] : weights) g.add_edge(pair.first, pair.second, w);
  return g;
}

ScoreBoard scores(const std::vector<FollowEvent>& events,
                  const std::vector<std::string>& candidates, const ScoreOptions& opts) {
  std::map<std::string, std::set<std::int64_t>> led_windows, followed_windows;
  std::map<std::string, int> led_events, followed_events;
  for (const auto& ev : events) {
    std::int64_t w = ev.window.start.serial();
    ++followed_events[ev.follower];
    followed_windows[ev.follower].insert(w);
    for (const auto& leader : ev.leaders) {
      ++led_events[leader];
      led_windows[leader].insert(w);
    }
  }
  ScoreBoard board;
  for (const auto& c : candidates) {
    CandidateScore s;
    s.candidate = c;
    if (opts.per_window) {
      s.led_spans = static_cast<int>(led_windows[c].size());
      s.followed_spans = static_cast<int>(followed_windows[c].size());
    } else {
      s.led_spans = led_events[c];
      s.followed_spans = followed_events[c];
    }
    s.leadership = s.led_spans - s.followed_spans;
    s.engagement = s.led_spans + s.followed_spans;
    board.entries.push_back(std::move(s));
  }
  return board;
}

void write_coverage_csv(std::ostream& out, const CoverageMatrix& cov) {
  out << "candidate,topic,window_start,rho,covered\n";
  char buf[32];
  for (std::size_t ci = 0; ci < cov.candidates.size(); ++ci) {
    for (std::size_t tj = 0; tj < cov.topic_ids.size(); ++tj) {
      for (std::size_t wk = 0; wk < cov.windows.size(); ++wk) {
        const auto& cell = cov.cell(ci, tj, wk);
        std::string rho;
        if (cell.rho) {
          std::snprintf(buf, sizeof(buf), "%.6f", *cell.rho);
          rho = buf;
        }
        out << csv::join_row({cov.candidates[ci], std::to_string(cov.topic_ids[tj]),
                              cov.windows[wk].start.iso(), rho,
                              cell.covered ? "true" : "false"});
      }
    }
  }
}

CoverageMatrix read_coverage_csv(std::istream& in, double threshold) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->size() != 5 || (*header)[0] != "candidate")
    throw std::runtime_error("coverage file needs a candidate,topic,window_start,rho,covered header");

  struct Row {
    std::string candidate;
    int topic;
    Date start;
    std::optional<double> rho;
    bool covered;
  };
  std::vector<Row> rows;
  std::set<std::string> candidates;
  std::set<int> topics;
  std::set<std::int64_t> starts;
  while (auto r = reader.next()) {
    if (r->size() == 1 && (*r)[0].empty()) continue;
    if (r->size() != 5) throw std::runtime_error("coverage file: wrong field count");
    Row row;
    row.candidate = (*r)[0];
    row.topic = std::stoi((*r)[1]);
    auto d = parse_date((*r)[2]);
    if (!d) throw std::runtime_error("coverage file: bad window_start '" + (*r)[2] + "'");
    row.start = *d;
    if (!(*r)[3].empty()) row.rho = std::stod((*r)[3]);
    row.covered = (*r)[4] == "true";
    candidates.insert(row.candidate);
    topics.insert(row.topic);
    starts.insert(row.start.serial());
    rows.push_back(std::move(row));
  }
  if (starts.empty()) throw std::runtime_error("coverage file has no rows");

  CoverageMatrix cov;
  cov.threshold = threshold;
  cov.candidates.assign(candidates.begin(), candidates.end());
  cov.topic_ids.assign(topics.begin(), topics.end());
  std::vector<std::int64_t> start_list(starts.begin(), starts.end());
  bool biweekly = start_list.size() < 2 || start_list[1] - start_list[0] == 14;
  for (std::size_t i = 0; i < start_list.size(); ++i) {
    Date d = Date::from_serial(start_list[i]);
    if (biweekly) {
      cov.windows.push_back({d, Date::from_serial(start_list[i] + 14), Granularity::biweekly});
    } else {
      cov.windows.push_back(window_for(d, Granularity::monthly, d));
    }
  }
  for (std::size_t i = 1; i < cov.windows.size(); ++i)
    if (window_gap(cov.windows[i - 1], cov.windows[i]) != 1)
      throw std::runtime_error("coverage file windows are not contiguous");

  cov.cells.assign(cov.candidates.size() * cov.topic_ids.size() * cov.windows.size(), {});
  auto pos = [](const auto& v, const auto& x) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };
  for (const auto& row : rows) {
    auto& cell = cov.cell(pos(cov.candidates, row.candidate), pos(cov.topic_ids, row.topic),
                          pos(start_list, row.start.serial()));
    cell.rho = row.rho;
    cell.covered = row.covered;
  }
  return cov;
}

void write_events_csv(std::ostream& out, const std::vector<FollowEvent>& events) {
  out << "window_start,topic,follower,leaders\n";
  for (const auto& ev : events) {
    std::string leaders;
    for (const auto& l : ev.leaders) {
      if (!leaders.empty()) leaders += ";";
      leaders += l;
    }
    out << csv::join_row(
        {ev.window.start.iso(), std::to_string(ev.topic), ev.follower, leaders});
  }
}

std::vector<FollowEvent> read_events_csv(std::istream& in, Granularity g, const Date& anchor) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->size() != 4 || (*header)[0] != "window_start")
    throw std::runtime_error("events file needs a window_start,topic,follower,leaders header");
  std::vector<FollowEvent> events;
  while (auto r = reader.next()) {
    if (r->size() == 1 && (*r)[0].empty()) continue;
    if (r->size() != 4) throw std::runtime_error("events file: wrong field count");
    FollowEvent ev;
    auto d = parse_date((*r)[0]);
    if (!d) throw std::runtime_error("events file: bad window_start '" + (*r)[0] + "'");
    ev.window = window_for(*d, g, anchor);
    ev.topic = std::stoi((*r)[1]);
    ev.follower = (*r)[2];
    const std::string& joined = (*r)[3];
    std::size_t from = 0;
    while (from <= joined.size()) {
      auto semi = joined.find(';', from);
      if (semi == std::string::npos) semi = joined.size();
      if (semi > from) ev.leaders.insert(joined.substr(from, semi - from));
      from = semi + 1;
    }
    if (ev.leaders.empty() || ev.leaders.count(ev.follower))
      throw std::runtime_error("events file: invalid leader set for follower " + ev.follower);
    events.push_back(std::move(ev));
  }
  return events;
}

void write_scores_csv(std::ostream& out, const ScoreBoard& board) {
  out << "candidate,leadership,engagement\n";
  for (const auto& s : board.entries)
    out << csv::join_row(
        {s.candidate, std::to_string(s.leadership), std::to_string(s.engagement)});
}

}  // namespace campnet::dynamics
