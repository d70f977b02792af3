#include "campnet/pipeline.hpp"

#include "campnet/corpusnet.hpp"
#include "campnet/csv.hpp"
#include "campnet/dynamics.hpp"
#include "campnet/graph_io.hpp"
#include "campnet/ingest.hpp"
#include "campnet/lexicon.hpp"
#include "campnet/rng.hpp"
#include "campnet/topicnet.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

namespace campnet::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_config(const std::string& key, const std::string& why) {
  throw UserError("config: " + key + ": " + why);
}

ordered_json config_fields(const PipelineConfig& c) {
  ordered_json j;
  j["input"] = c.input;
  j["format"] = c.format;
  j["lexicon"] = c.lexicon;
  j["strict"] = c.strict;
  j["drop_duplicate_text"] = c.drop_duplicate_text;
  j["keep_mentions"] = c.keep_mentions;
  j["decode_entities"] = c.decode_entities;
  j["corpus_granularity"] = c.corpus_granularity;
  j["topic_granularity"] = c.topic_granularity;
  j["anchor"] = c.anchor;
  if (c.range_start) j["range_start"] = *c.range_start;
  if (c.range_end) j["range_end"] = *c.range_end;
  j["min_count"] = c.min_count;
  j["max_base_terms"] = c.max_base_terms;
  j["rare_multiplier"] = c.rare_multiplier;
  j["sig_multiplier"] = c.sig_multiplier;
  j["min_occurrences"] = c.min_occurrences;
  j["min_ngram_count"] = c.min_ngram_count;
  j["corr_threshold"] = c.corr_threshold;
  j["min_jaccard"] = c.min_jaccard;
  j["keep_isolated"] = c.keep_isolated;
  j["coverage_threshold"] = c.coverage_threshold;
  j["louvain_seed"] = c.louvain_seed;
  j["per_window_scores"] = c.per_window_scores;
  return j;
}

PipelineConfig config_from_json(const json& j) {
  if (!j.is_object()) throw UserError("config: not a JSON object");
  PipelineConfig c;
  auto get_string = [&](const char* key, std::string& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) bad_config(key, "must be a string");
    field = j[key].get<std::string>();
  };
  auto get_opt_string = [&](const char* key, std::optional<std::string>& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) bad_config(key, "must be a string");
    field = j[key].get<std::string>();
  };
  auto get_bool = [&](const char* key, bool& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_boolean()) bad_config(key, "must be a boolean");
    field = j[key].get<bool>();
  };
  auto get_uint = [&](const char* key, std::uint64_t& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer() || (j[key].is_number_integer() && j[key].get<long long>() < 0))
      bad_config(key, "must be a nonnegative integer");
    field = j[key].get<std::uint64_t>();
  };
  auto get_real = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) bad_config(key, "must be a number");
    field = j[key].get<double>();
  };

  static const char* known[] = {
      "input", "format", "lexicon", "out_dir", "strict", "drop_duplicate_text",
      "keep_mentions", "decode_entities", "corpus_granularity", "topic_granularity", "anchor",
      "range_start", "range_end", "min_count", "max_base_terms", "rare_multiplier",
      "sig_multiplier", "min_occurrences", "min_ngram_count", "corr_threshold", "min_jaccard",
      "keep_isolated", "coverage_threshold", "louvain_seed", "per_window_scores"};
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known))
      bad_config(key, "unknown key");
  }

  get_string("input", c.input);
  get_string("format", c.format);
  get_string("lexicon", c.lexicon);
  get_opt_string("out_dir", c.out_dir);
  get_bool("strict", c.strict);
  get_bool("drop_duplicate_text", c.drop_duplicate_text);
  get_bool("keep_mentions", c.keep_mentions);
  get_bool("decode_entities", c.decode_entities);
  get_string("corpus_granularity", c.corpus_granularity);
  get_string("topic_granularity", c.topic_granularity);
  get_string("anchor", c.anchor);
  get_opt_string("range_start", c.range_start);
  get_opt_string("range_end", c.range_end);
  get_uint("min_count", c.min_count);
  get_uint("max_base_terms", c.max_base_terms);
  get_real("rare_multiplier", c.rare_multiplier);
  get_real("sig_multiplier", c.sig_multiplier);
  get_uint("min_occurrences", c.min_occurrences);
  get_uint("min_ngram_count", c.min_ngram_count);
  get_real("corr_threshold", c.corr_threshold);
  get_real("min_jaccard", c.min_jaccard);
  get_bool("keep_isolated", c.keep_isolated);
  get_real("coverage_threshold", c.coverage_threshold);
  get_uint("louvain_seed", c.louvain_seed);
  get_bool("per_window_scores", c.per_window_scores);
  return c;
}

}  // namespace

PipelineConfig PipelineConfig::parse(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw UserError("config: invalid JSON");
  if (j.is_object() && j.contains("config") && j["config"].is_object())
    return config_from_json(j["config"]);  // manifest replay
  return config_from_json(j);
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void PipelineConfig::validate() const {
  if (input.empty()) bad_config("input", "missing path");
  if (lexicon.empty()) bad_config("lexicon", "missing path");
  if (!ingest::parse_format(format)) bad_config("format", "must be \"csv\" or \"jsonl\"");
  if (!parse_granularity(corpus_granularity))
    bad_config("corpus_granularity", "must be \"monthly\" or \"biweekly\"");
  if (!parse_granularity(topic_granularity))
    bad_config("topic_granularity", "must be \"monthly\" or \"biweekly\"");
  if (!parse_date(anchor)) bad_config("anchor", "must be YYYY-MM-DD");
  std::optional<Date> start, end;
  if (range_start && !(start = parse_date(*range_start)))
    bad_config("range_start", "must be YYYY-MM-DD");
  if (range_end && !(end = parse_date(*range_end))) bad_config("range_end", "must be YYYY-MM-DD");
  if (start && end && !(*start < *end)) bad_config("range_start", "must precede range_end");
  if (min_count < 1) bad_config("min_count", "must be >= 1");
  if (max_base_terms < 2) bad_config("max_base_terms", "must be >= 2");
  if (rare_multiplier <= 0) bad_config("rare_multiplier", "must be > 0");
  if (sig_multiplier <= 0) bad_config("sig_multiplier", "must be > 0");
  if (min_occurrences < 1) bad_config("min_occurrences", "must be >= 1");
  if (min_ngram_count < 1) bad_config("min_ngram_count", "must be >= 1");
  if (corr_threshold < -1.0 || corr_threshold > 1.0)
    bad_config("corr_threshold", "must lie in [-1, 1]");
  if (min_jaccard < 0.0 || min_jaccard > 1.0) bad_config("min_jaccard", "must lie in [0, 1]");
  if (coverage_threshold < -1.0 || coverage_threshold > 1.0)
    bad_config("coverage_threshold", "must lie in [-1, 1]");
}

std::string PipelineConfig::canonical_json() const {
  return json(config_fields(*this)).dump();  // plain json sorts keys
}

std::string PipelineConfig::hash() const {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical_json())));
  return buf;
}

fs::path PipelineConfig::resolved_out_dir() const {
  if (out_dir) return fs::path(*out_dir);
  return fs::path("runs") / hash();
}

Granularity PipelineConfig::corpus_gran() const {
  auto g = parse_granularity(corpus_granularity);
  if (!g) bad_config("corpus_granularity", "invalid");
  return *g;
}

Granularity PipelineConfig::topic_gran() const {
  auto g = parse_granularity(topic_granularity);
  if (!g) bad_config("topic_granularity", "invalid");
  return *g;
}

Date PipelineConfig::anchor_date() const {
  auto d = parse_date(anchor);
  if (!d) bad_config("anchor", "invalid");
  return *d;
}

namespace {

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    fs::path tmp = dir_ / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << content;
      if (!out) throw std::runtime_error("cannot write artifact: " + (dir_ / name).string());
    }
    fs::rename(tmp, dir_ / name);
    names_.push_back(name);
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

std::string render(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

ingest::BucketOptions bucket_options(const PipelineConfig& c, Granularity g, bool per_author) {
  ingest::BucketOptions opts;
  opts.granularity = g;
  opts.anchor = c.anchor_date();
  opts.per_author = per_author;
  if (c.range_start) opts.range_start = parse_date(*c.range_start);
  if (c.range_end) opts.range_end = parse_date(*c.range_end);
  opts.tokenizer.keep_mentions = c.keep_mentions;
  opts.tokenizer.decode_entities = c.decode_entities;
  return opts;
}

}  // namespace

RunResult run_pipeline(const PipelineConfig& config) {
  RunResult res;
  std::string stage = "config";
  ordered_json summary;
  std::unique_ptr<ArtifactWriter> artifacts;

  auto finish = [&](bool ok, const std::string& error) {
    res.ok = ok;
    if (!ok) {
      res.failed_stage = stage;
      res.error = error;
    }
    if (artifacts) {
      ordered_json manifest;
      manifest["config"] = config_fields(config);
      manifest["config_hash"] = config.hash();
      manifest["status"] = ok ? "ok" : "failed";
      if (!ok) {
        manifest["failed_stage"] = stage;
        manifest["error"] = error;
      }
      manifest["summary"] = summary;
      manifest["artifacts"] = artifacts->names();
      artifacts->write("manifest.json", manifest.dump(2) + "\n");
      res.artifacts = artifacts->names();
    }
    res.exit_code = ok ? 0 : res.exit_code;
    return res;
  };

  try {
    config.validate();
    res.out_dir = config.resolved_out_dir();
    fs::create_directories(res.out_dir);
    artifacts = std::make_unique<ArtifactWriter>(res.out_dir);

    stage = "ingest";
    ingest::LoadOptions load_opts;
    load_opts.format = *ingest::parse_format(config.format);
    load_opts.strict = config.strict;
    load_opts.drop_duplicate_text = config.drop_duplicate_text;
    auto loaded = ingest::load_documents(config.input, load_opts);
    if (loaded.documents.empty()) throw UserError("no documents loaded from " + config.input);
    summary["documents"] = loaded.documents.size();
    summary["skipped_malformed"] = loaded.skipped_malformed;
    summary["skipped_duplicate_id"] = loaded.skipped_duplicate_id;
    summary["skipped_duplicate_text"] = loaded.skipped_duplicate_text;

    stage = "lexicon";
    auto ref = lexicon::ReferenceLexicon::load(config.lexicon);
    auto corpus_buckets =
        ingest::bucket(loaded.documents, bucket_options(config, config.corpus_gran(), false));
    auto base = lexicon::select_base_terms(corpus_buckets.buckets, config.min_count,
                                           config.max_base_terms);
    artifacts->write("base_terms.csv",
                     render([&](std::ostream& o) { lexicon::write_term_csv(o, base); }));
    auto author_buckets =
        ingest::bucket(loaded.documents, bucket_options(config, config.topic_gran(), true));
    lexicon::ExtractOptions ex;
    ex.rare_multiplier = config.rare_multiplier;
    ex.sig_multiplier = config.sig_multiplier;
    ex.min_occurrences = config.min_occurrences;
    ex.min_ngram_count = config.min_ngram_count;
    auto extracted = lexicon::extract_terms(author_buckets.buckets, ref, ex);
    artifacts->write("extracted_terms.csv",
                     render([&](std::ostream& o) { lexicon::write_term_csv(o, extracted); }));
    summary["base_terms"] = base.terms.size();
    summary["extracted_terms"] = extracted.terms.size();

    stage = "corpusnet";
    auto net = corpusnet::build_corpus_network(corpus_buckets.buckets, base,
                                               config.corr_threshold);
    auto part = louvain(net.graph, config.louvain_seed);
    graph::NodeAttributes attrs;
    for (int i = 0; i < net.graph.node_count(); ++i) {
      const auto& meta = net.bucket_meta.at(net.graph.label(i));
      attrs["community"].push_back(std::to_string(part.assignment[static_cast<std::size_t>(i)]));
      attrs["documents"].push_back(std::to_string(meta.document_count));
      attrs["window_start"].push_back(meta.window.start.iso());
      attrs["window_end"].push_back(meta.window.end.iso());
    }
    artifacts->write("corpus_network.graphml", render([&](std::ostream& o) {
                       graph::write_graphml(o, net.graph, attrs);
                     }));
    artifacts->write("corpus_network.dot", render([&](std::ostream& o) {
                       graph::write_dot(o, net.graph, attrs);
                     }));
    artifacts->write("corpus_partition.csv", render([&](std::ostream& o) {
                       graph::write_partition_csv(o, net.graph, part);
                     }));
    auto diag = corpusnet::diagnose(net, part);
    artifacts->write("corpus_diagnostics.json", corpusnet::diagnostics_json(diag));
    artifacts->write("corpus_diagnostics.txt", render([&](std::ostream& o) {
                       corpusnet::write_diagnostics_text(o, diag);
                     }));
    summary["corpus_network"] = {{"nodes", net.graph.node_count()},
                                 {"edges", net.graph.edge_count()},
                                 {"communities", part.community_count},
                                 {"modularity", diag.modularity},
                                 {"excluded_empty_buckets", net.excluded_empty.size()},
                                 {"constant_vector_warnings", net.constant_vector_warnings}};

    stage = "topics";
    std::vector<topicnet::Subtopic> subtopics;
    std::size_t semantic_networks = 0;
    for (const auto& b : author_buckets.buckets) {
      if (b.empty()) continue;
      auto snet = topicnet::build_semantic_network(b, extracted);
      if (snet.empty()) continue;
      ++semantic_networks;
      auto sts = topicnet::extract_subtopics(snet, config.louvain_seed);
      subtopics.insert(subtopics.end(), sts.begin(), sts.end());
    }
    artifacts->write("subtopics.jsonl", render([&](std::ostream& o) {
                       topicnet::write_subtopics_jsonl(o, subtopics);
                     }));
    std::vector<topicnet::Topic> topics;
    graph::WeightedGraph subtopic_net;
    if (subtopics.size() >= 2) {
      subtopic_net = topicnet::build_subtopic_network(subtopics, config.min_jaccard);
      topics = topicnet::merge_topics(subtopic_net, subtopics, config.louvain_seed,
                                      config.keep_isolated);
    }
    artifacts->write("subtopic_network.graphml", render([&](std::ostream& o) {
                       graph::write_graphml(o, subtopic_net);
                     }));
    artifacts->write("subtopic_network.dot", render([&](std::ostream& o) {
                       graph::write_dot(o, subtopic_net);
                     }));
    artifacts->write("topics.json", render([&](std::ostream& o) {
                       topicnet::write_topics_json(o, topics);
                     }));
    artifacts->write("topics.txt", render([&](std::ostream& o) {
                       topicnet::write_topic_listing(o, topics, 10);
                     }));
    summary["semantic_networks"] = semantic_networks;
    summary["subtopics"] = subtopics.size();
    summary["topics"] = topics.size();

    stage = "dynamics";
    auto cov = dynamics::build_coverage_matrix(author_buckets.buckets, topics,
                                               config.coverage_threshold);
    std::vector<dynamics::FollowEvent> events;
    if (cov.windows.size() >= 2) events = dynamics::detect_follow_events(cov);
    auto follower = dynamics::follower_network(events);
    dynamics::ScoreOptions score_opts;
    score_opts.per_window = config.per_window_scores;
    auto board = dynamics::scores(events, cov.candidates, score_opts);
    artifacts->write("coverage.csv", render([&](std::ostream& o) {
                       dynamics::write_coverage_csv(o, cov);
                     }));
    artifacts->write("events.csv", render([&](std::ostream& o) {
                       dynamics::write_events_csv(o, events);
                     }));
    artifacts->write("follower_network.graphml", render([&](std::ostream& o) {
                       graph::write_graphml(o, follower);
                     }));
    artifacts->write("follower_network.dot", render([&](std::ostream& o) {
                       graph::write_dot(o, follower);
                     }));
    artifacts->write("scores.csv", render([&](std::ostream& o) {
                       dynamics::write_scores_csv(o, board);
                     }));

    ordered_json sensitivity;
    sensitivity["thresholds"] =
        std::vector<double>(std::begin(kSensitivityThresholds), std::end(kSensitivityThresholds));
    sensitivity["results"] = ordered_json::array();
    for (double tau : kSensitivityThresholds) {
      dynamics::CoverageMatrix alt = cov;
      alt.threshold = tau;
      for (auto& cell : alt.cells) cell.covered = cell.rho.has_value() && *cell.rho >= tau;
      std::vector<dynamics::FollowEvent> alt_events;
      if (alt.windows.size() >= 2) alt_events = dynamics::detect_follow_events(alt);
      auto alt_board = dynamics::scores(alt_events, alt.candidates, score_opts);
      ordered_json entry;
      entry["threshold"] = tau;
      entry["events"] = alt_events.size();
      entry["leadership"] = ordered_json::object();
      for (const auto& s : alt_board.entries) entry["leadership"][s.candidate] = s.leadership;
      sensitivity["results"].push_back(std::move(entry));
    }
    artifacts->write("coverage_sensitivity.json", sensitivity.dump(2) + "\n");
    summary["coverage"] = {{"candidates", cov.candidates.size()},
                           {"topics", cov.topic_ids.size()},
                           {"windows", cov.windows.size()},
                           {"skipped_topics", cov.skipped_topics}};
    summary["events"] = events.size();

    stage = "";
    return finish(true, "");
  } catch (const std::runtime_error& e) {
    res.exit_code = 2;
    return finish(false, e.what());
  } catch (const std::exception& e) {
    res.exit_code = 1;
    return finish(false, e.what());
  }
}

namespace {

json load_json_artifact(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw UserError("invalid JSON artifact: " + path.string());
  return j;
}

}  // namespace

void report(const fs::path& artifact_dir, ReportFormat format, std::size_t top_k,
            std::ostream& out) {
  const char* needed[] = {"corpus_diagnostics.json", "topics.json", "events.csv", "scores.csv"};
  std::string missing;
  for (const char* name : needed) {
    if (!fs::exists(artifact_dir / name)) {
      if (!missing.empty()) missing += ", ";
      missing += name;
    }
  }
  if (!missing.empty())
    throw UserError("artifact directory " + artifact_dir.string() +
                    " is missing: " + missing);

  json diag = load_json_artifact(artifact_dir / "corpus_diagnostics.json");

  std::ifstream topics_in(artifact_dir / "topics.json", std::ios::binary);
  auto topics = topicnet::read_topics_json(topics_in);

  std::ifstream events_in(artifact_dir / "events.csv", std::ios::binary);
  auto events = dynamics::read_events_csv(events_in);
  std::map<std::pair<std::string, std::string>, int> edge_weights;
  for (const auto& ev : events)
    for (const auto& leader : ev.leaders) ++edge_weights[{ev.follower, leader}];
  std::vector<std::pair<std::pair<std::string, std::string>, int>> edges(edge_weights.begin(),
                                                                         edge_weights.end());
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  struct ScoreRow {
    std::string candidate;
    int leadership;
    int engagement;
  };
  std::vector<ScoreRow> board;
  {
    std::ifstream in(artifact_dir / "scores.csv", std::ios::binary);
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header || header->size() != 3)
      throw UserError("scores.csv needs a candidate,leadership,engagement header");
    while (auto row = reader.next()) {
      if (row->size() == 1 && (*row)[0].empty()) continue;
      if (row->size() != 3) throw UserError("scores.csv: wrong field count");
      board.push_back({(*row)[0], std::stoi((*row)[1]), std::stoi((*row)[2])});
    }
    std::sort(board.begin(), board.end(), [](const ScoreRow& a, const ScoreRow& b) {
      if (a.leadership != b.leadership) return a.leadership > b.leadership;
      return a.candidate < b.candidate;
    });
  }

  if (format == ReportFormat::json) {
    ordered_json j;
    j["clusters"] = diag["communities"];
    j["modularity"] = diag["modularity"];
    j["topics"] = ordered_json::array();
    for (const auto& t : topics) {
      ordered_json jt;
      jt["id"] = t.id;
      jt["top_terms"] = ordered_json::array();
      auto ranked = t.ranked_terms();
      for (std::size_t i = 0; i < ranked.size() && i < top_k; ++i)
        jt["top_terms"].push_back(ranked[i].first);
      j["topics"].push_back(std::move(jt));
    }
    j["follower_edges"] = ordered_json::array();
    for (const auto& [pair, w] : edges)
      j["follower_edges"].push_back(
          {{"follower", pair.first}, {"leader", pair.second}, {"weight", w}});
    j["scoreboard"] = ordered_json::array();
    for (const auto& s : board)
      j["scoreboard"].push_back({{"candidate", s.candidate},
                                 {"leadership", s.leadership},
                                 {"engagement", s.engagement}});
    out << j.dump(2) << "\n";
    return;
  }

  out << "== corpus clusters ==\n";
  out << "modularity " << diag["modularity"].get<double>() << "\n";
  for (const auto& c : diag["communities"])
    out << "  community " << c["community"].get<int>() << ": " << c["nodes"].size()
        << " buckets, " << c["first_start"].get<std::string>() << " .. "
        << c["last_end"].get<std::string>()
        << (c["contiguous"].get<bool>() ? "" : " (not contiguous)") << "\n";

  out << "== topics ==\n";
  topicnet::write_topic_listing(out, topics, top_k);

  out << "== follower edges ==\n";
  for (const auto& [pair, w] : edges)
    out << "  " << pair.first << " -> " << pair.second << ": " << w << "\n";

  out << "== scoreboard ==\n";
  for (const auto& s : board)
    out << "  " << s.candidate << ": leadership " << s.leadership << ", engagement "
        << s.engagement << "\n";
}

}  // namespace campnet::pipeline
