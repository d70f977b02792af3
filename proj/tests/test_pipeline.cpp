#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "campnet/ingest.hpp"
#include "campnet/pipeline.hpp"
#include "campnet/synth.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace campnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;

  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("campnet-pipe-" + std::to_string(getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
  REQUIRE(out.good());
}

// Small two-era corpus with one planted follow (bob picks up alice's
// topic one window later).
void write_corpus(const fs::path& to) {
  synth::SynthSpec spec;
  spec.candidates = {"alice", "bob"};
  spec.windows = 6;
  spec.regimes.push_back({0, {"era1a", "era1b", "era1c", "era1d", "era1e", "era1f"}});
  spec.regimes.push_back({3, {"era2a", "era2b", "era2c", "era2d", "era2e", "era2f"}});
  spec.plant_follow.push_back({"alice", "bob", {"planta", "plantb", "plantc", "plantd"}, 1, 1});
  spec.noise_rate = 0.05;
  spec.seed = 42;
  spec.docs_per_window = 60;
  auto docs = synth::generate(spec);
  std::ofstream out(to, std::ios::binary);
  ingest::write_documents_jsonl(out, docs);
  REQUIRE(out.good());
}

void write_lexicon(const fs::path& to) {
  std::ostringstream out;
  out << "word,count\n";
  const char* words[] = {"the", "of",  "and", "to",   "a",   "in",  "that", "it",
                         "is",  "was", "for", "on",   "are", "as",  "with", "his",
                         "they", "i",  "at",  "be",   "this", "have", "from", "or"};
  std::size_t count = 4000000;
  for (const char* w : words) {
    out << w << "," << count << "\n";
    count = count * 9 / 10;
  }
  write_file(to, out.str());
}

pipeline::PipelineConfig base_config(const TempDir& dir) {
  pipeline::PipelineConfig cfg;
  cfg.input = (dir.path / "corpus.jsonl").string();
  cfg.lexicon = (dir.path / "lexicon.csv").string();
  cfg.corpus_granularity = "biweekly";
  cfg.topic_granularity = "biweekly";
  cfg.min_count = 5;
  cfg.max_base_terms = 50;
  cfg.min_occurrences = 5;
  cfg.min_ngram_count = 5;
  return cfg;
}

void expect_config_error(const std::string& json_text, const std::string& needle) {
  try {
    auto cfg = pipeline::PipelineConfig::parse(json_text);
    cfg.validate();
    FAIL_CHECK("expected rejection: ", needle);
  } catch (const pipeline::UserError& e) {
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
}

const std::vector<std::string> kExpectedArtifacts = {
    "base_terms.csv",          "extracted_terms.csv",       "corpus_network.graphml",
    "corpus_network.dot",      "corpus_partition.csv",      "corpus_diagnostics.json",
    "corpus_diagnostics.txt",  "subtopics.jsonl",           "subtopic_network.graphml",
    "subtopic_network.dot",    "topics.json",               "topics.txt",
    "coverage.csv",            "events.csv",                "follower_network.graphml",
    "follower_network.dot",    "scores.csv",                "coverage_sensitivity.json",
    "manifest.json"};

}  // namespace

TEST_CASE("config parses with defaults") {
  auto cfg = pipeline::PipelineConfig::parse(R"({"input":"docs.jsonl","lexicon":"ref.csv"})");
  CHECK(cfg.input == "docs.jsonl");
  CHECK(cfg.format == "jsonl");
  CHECK_FALSE(cfg.out_dir.has_value());
  CHECK_FALSE(cfg.strict);
  CHECK(cfg.keep_mentions);
  CHECK(cfg.decode_entities);
  CHECK(cfg.corpus_granularity == "monthly");
  CHECK(cfg.topic_granularity == "biweekly");
  CHECK(cfg.anchor == "2015-01-04");
  CHECK(cfg.min_count == 100);
  CHECK(cfg.max_base_terms == 300);
  CHECK(cfg.rare_multiplier == 25.0);
  CHECK(cfg.sig_multiplier == 25.0);
  CHECK(cfg.min_occurrences == 10);
  CHECK(cfg.min_ngram_count == 10);
  CHECK(cfg.corr_threshold == 0.6);
  CHECK(cfg.min_jaccard == 0.1);
  CHECK_FALSE(cfg.keep_isolated);
  CHECK(cfg.coverage_threshold == 0.5);
  CHECK(cfg.louvain_seed == 42);
  CHECK_FALSE(cfg.per_window_scores);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config rejects unknown keys and wrong types") {
  expect_config_error(R"({"input":"x","lexicon":"y","wat":1})", "wat: unknown key");
  expect_config_error(R"({"input":"x","lexicon":"y","min_count":"many"})",
                      "min_count: must be a nonnegative integer");
  expect_config_error(R"({"input":"x","lexicon":"y","min_count":-3})", "min_count");
  expect_config_error(R"({"input":"x","lexicon":"y","strict":1})", "strict: must be a boolean");
  expect_config_error(R"({"input":"x","lexicon":"y","corr_threshold":"high"})",
                      "corr_threshold: must be a number");
  expect_config_error("[1,2]", "config");
  expect_config_error("{broken", "invalid JSON");
}

TEST_CASE("config validation names the offending key") {
  expect_config_error(R"({"lexicon":"y"})", "input: missing path");
  expect_config_error(R"({"input":"x"})", "lexicon: missing path");
  expect_config_error(R"({"input":"x","lexicon":"y","format":"xml"})", "format");
  expect_config_error(R"({"input":"x","lexicon":"y","corpus_granularity":"daily"})",
                      "corpus_granularity");
  expect_config_error(R"({"input":"x","lexicon":"y","anchor":"someday"})", "anchor");
  expect_config_error(R"({"input":"x","lexicon":"y","range_start":"2016-01-01","range_end":"2015-01-01"})",
                      "range_start: must precede");
  expect_config_error(R"({"input":"x","lexicon":"y","max_base_terms":1})", "max_base_terms");
  expect_config_error(R"({"input":"x","lexicon":"y","min_count":0})", "min_count");
  expect_config_error(R"({"input":"x","lexicon":"y","rare_multiplier":0})", "rare_multiplier");
  expect_config_error(R"({"input":"x","lexicon":"y","corr_threshold":1.5})", "corr_threshold");
  expect_config_error(R"({"input":"x","lexicon":"y","min_jaccard":-0.1})", "min_jaccard");
  expect_config_error(R"({"input":"x","lexicon":"y","coverage_threshold":2})",
                      "coverage_threshold");
}

TEST_CASE("config identity ignores the output directory") {
  auto a = pipeline::PipelineConfig::parse(R"({"input":"x","lexicon":"y"})");
  auto b = a;
  b.out_dir = "/tmp/elsewhere";
  CHECK(a.canonical_json() == b.canonical_json());
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  CHECK(a.hash().find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(a.canonical_json().find("out_dir") == std::string::npos);

  CHECK(b.resolved_out_dir() == fs::path("/tmp/elsewhere"));
  CHECK(a.resolved_out_dir() == fs::path("runs") / a.hash());

  auto c = a;
  c.min_count = 7;
  CHECK(c.hash() != a.hash());
  auto d = a;
  d.range_start = "2015-06-01";
  CHECK(d.hash() != a.hash());
  CHECK(d.canonical_json().find("range_start") != std::string::npos);
}

TEST_CASE("config parses from a manifest wrapper") {
  auto cfg = pipeline::PipelineConfig::parse(
      R"({"config":{"input":"x","lexicon":"y","min_count":9},"status":"ok","artifacts":[]})");
  CHECK(cfg.input == "x");
  CHECK(cfg.min_count == 9);
}

TEST_CASE("pipeline runs end to end and replays byte-identically") {
  TempDir dir;
  write_corpus(dir.path / "corpus.jsonl");
  write_lexicon(dir.path / "lexicon.csv");

  auto cfg = base_config(dir);
  cfg.out_dir = (dir.path / "run_a").string();
  auto res = pipeline::run_pipeline(cfg);
  REQUIRE(res.ok);
  CHECK(res.exit_code == 0);
  CHECK(res.failed_stage.empty());
  CHECK(res.out_dir == fs::path(*cfg.out_dir));
  CHECK(res.artifacts == kExpectedArtifacts);
  for (const auto& name : res.artifacts) CHECK(fs::exists(res.out_dir / name));

  auto manifest = nlohmann::json::parse(read_file(res.out_dir / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["config_hash"] == cfg.hash());
  CHECK(manifest["summary"]["documents"] == 720);
  CHECK(manifest["config"].contains("min_count"));
  CHECK_FALSE(manifest["config"].contains("out_dir"));
  // The manifest lists everything written before itself.
  CHECK(manifest["artifacts"].size() == kExpectedArtifacts.size() - 1);

  // Same analysis into a fresh directory: every artifact byte-identical.
  auto cfg_b = cfg;
  cfg_b.out_dir = (dir.path / "run_b").string();
  auto res_b = pipeline::run_pipeline(cfg_b);
  REQUIRE(res_b.ok);
  REQUIRE(res_b.artifacts == res.artifacts);
  for (const auto& name : res.artifacts)
    CHECK(read_file(res.out_dir / name) == read_file(res_b.out_dir / name));

  // Replaying straight from the manifest file reproduces the run too.
  auto replay = pipeline::PipelineConfig::parse(read_file(res.out_dir / "manifest.json"));
  CHECK(replay.hash() == cfg.hash());
  replay.out_dir = (dir.path / "run_c").string();
  auto res_c = pipeline::run_pipeline(replay);
  REQUIRE(res_c.ok);
  for (const auto& name : res.artifacts)
    CHECK(read_file(res.out_dir / name) == read_file(res_c.out_dir / name));

  // The planted handoff surfaces in the events table.
  auto events = read_file(res.out_dir / "events.csv");
  CHECK(events.rfind("window_start,topic,follower,leaders\n", 0) == 0);
  auto scores = read_file(res.out_dir / "scores.csv");
  CHECK(scores.find("alice,") != std::string::npos);
  CHECK(scores.find("bob,") != std::string::npos);
}

TEST_CASE("pipeline failures record the stage and keep the manifest") {
  TempDir dir;
  write_lexicon(dir.path / "lexicon.csv");

  auto cfg = base_config(dir);
  cfg.out_dir = (dir.path / "run_fail").string();
  auto res = pipeline::run_pipeline(cfg);  // corpus.jsonl was never written
  CHECK_FALSE(res.ok);
  CHECK(res.exit_code == 2);
  CHECK(res.failed_stage == "ingest");
  CHECK(res.error.find("corpus.jsonl") != std::string::npos);
  REQUIRE(res.artifacts == std::vector<std::string>{"manifest.json"});
  auto manifest = nlohmann::json::parse(read_file(res.out_dir / "manifest.json"));
  CHECK(manifest["status"] == "failed");
  CHECK(manifest["failed_stage"] == "ingest");

  write_corpus(dir.path / "corpus.jsonl");
  auto cfg2 = base_config(dir);
  cfg2.lexicon = (dir.path / "missing.csv").string();
  cfg2.out_dir = (dir.path / "run_fail2").string();
  auto res2 = pipeline::run_pipeline(cfg2);
  CHECK_FALSE(res2.ok);
  CHECK(res2.exit_code == 2);
  CHECK(res2.failed_stage == "lexicon");

  auto cfg3 = base_config(dir);
  cfg3.input.clear();
  auto res3 = pipeline::run_pipeline(cfg3);
  CHECK_FALSE(res3.ok);
  CHECK(res3.exit_code == 2);
  CHECK(res3.failed_stage == "config");
  CHECK(res3.artifacts.empty());
}

TEST_CASE("report renders finished runs and flags missing artifacts") {
  TempDir dir;
  write_corpus(dir.path / "corpus.jsonl");
  write_lexicon(dir.path / "lexicon.csv");
  auto cfg = base_config(dir);
  cfg.out_dir = (dir.path / "run").string();
  auto res = pipeline::run_pipeline(cfg);
  REQUIRE(res.ok);

  std::ostringstream text;
  pipeline::report(res.out_dir, pipeline::ReportFormat::text, 5, text);
  CHECK(text.str().find("== corpus clusters ==") != std::string::npos);
  CHECK(text.str().find("== topics ==") != std::string::npos);
  CHECK(text.str().find("== follower edges ==") != std::string::npos);
  CHECK(text.str().find("== scoreboard ==") != std::string::npos);
  CHECK(text.str().find("alice") != std::string::npos);

  std::ostringstream json_out;
  pipeline::report(res.out_dir, pipeline::ReportFormat::json, 5, json_out);
  auto j = nlohmann::json::parse(json_out.str());
  CHECK(j.contains("clusters"));
  CHECK(j.contains("modularity"));
  CHECK(j.contains("topics"));
  CHECK(j.contains("follower_edges"));
  CHECK(j.contains("scoreboard"));
  for (const auto& t : j["topics"]) CHECK(t["top_terms"].size() <= 5);

  TempDir empty;
  try {
    std::ostringstream sink;
    pipeline::report(empty.path, pipeline::ReportFormat::text, 5, sink);
    FAIL_CHECK("expected missing-artifact error");
  } catch (const pipeline::UserError& e) {
    CHECK(std::string(e.what()).find("corpus_diagnostics.json") != std::string::npos);
    CHECK(std::string(e.what()).find("scores.csv") != std::string::npos);
  }
}
