#pragma once

#include "campnet/dates.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace campnet::pipeline {

// Input problems (paths, formats, parameter ranges). Everything else that
// throws is treated as an internal error.
struct UserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every knob of the end-to-end run. JSON keys match the field names;
// unknown keys are rejected. The output directory is deliberately not part
// of the config identity (hash, manifest): one analysis, any location.
struct PipelineConfig {
  std::string input;
  std::string format = "jsonl";  // or "csv"
  std::string lexicon;
  std::optional<std::string> out_dir;

  bool strict = false;
  bool drop_duplicate_text = false;
  bool keep_mentions = true;
  bool decode_entities = true;

  std::string corpus_granularity = "monthly";
  std::string topic_granularity = "biweekly";
  std::string anchor = "2015-01-04";
  std::optional<std::string> range_start;  // inclusive
  std::optional<std::string> range_end;    // exclusive

  std::uint64_t min_count = 100;
  std::uint64_t max_base_terms = 300;
  double rare_multiplier = 25.0;
  double sig_multiplier = 25.0;
  std::uint64_t min_occurrences = 10;
  std::uint64_t min_ngram_count = 10;

  double corr_threshold = 0.6;
  double min_jaccard = 0.1;
  bool keep_isolated = false;
  double coverage_threshold = 0.5;
  std::uint64_t louvain_seed = 42;
  bool per_window_scores = false;

  // Accepts a bare config object or a manifest (object with a "config"
  // key), so a finished run can be replayed directly.
  static PipelineConfig parse(const std::string& json_text);
  static PipelineConfig load(const std::filesystem::path& path);

  void validate() const;  // throws UserError naming the offending key
  std::string canonical_json() const;  // sorted keys, out_dir excluded
  std::string hash() const;            // FNV-1a of canonical_json, 16 hex chars
  std::filesystem::path resolved_out_dir() const;  // out_dir or runs/<hash>

  Granularity corpus_gran() const;
  Granularity topic_gran() const;
  Date anchor_date() const;
};

inline constexpr double kSensitivityThresholds[] = {0.3, 0.5, 0.7};

struct RunResult {
  std::filesystem::path out_dir;
  bool ok = false;
  int exit_code = 1;         // 0 ok, 2 bad input, 1 internal
  std::string failed_stage;  // empty on success
  std::string error;
  std::vector<std::string> artifacts;  // file names in write order
};

// Runs ingest → terms → corpus network → topics → dynamics, writing every
// artifact plus a manifest into the output directory. On stage failure the
// artifacts produced so far stay in place and the manifest records the
// stage. Reruns with an identical config are byte-identical.
RunResult run_pipeline(const PipelineConfig& config);

enum class ReportFormat { text, json };

// Renders a completed artifact directory: cluster timeline, top terms per
// topic, follower edges by weight, scoreboard by leadership. Missing
// artifacts raise UserError listing them.
void report(const std::filesystem::path& artifact_dir, ReportFormat format, std::size_t top_k,
            std::ostream& out);

}  // namespace campnet::pipeline
