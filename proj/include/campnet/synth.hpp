#pragma once

#include "campnet/dates.hpp"
#include "campnet/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace campnet::synth {

struct Regime {
  int start_window = 0;  // first regime must start at 0, starts strictly increase
  std::vector<std::string> vocabulary;
};

// A leader emits topic_vocab over [onset, onset + lag) windows; the
// follower emits it for the single window onset + lag.
struct PlantFollow {
  std::string leader;
  std::string follower;
  std::vector<std::string> topic_vocab;
  int onset_window = 0;
  int lag_windows = 1;
};

// Planted-structure corpus description. Every document draws from exactly
// one source vocabulary (regime core, window-bridge, or planted topic);
// noise replaces single tokens with unique filler.
struct SynthSpec {
  std::vector<std::string> candidates;
  int windows = 0;
  std::vector<Regime> regimes;
  std::vector<PlantFollow> plant_follow;
  double noise_rate = 0.0;  // in [0, 0.5)
  std::uint64_t seed = 42;

  Granularity granularity = Granularity::biweekly;
  Date start_date = default_anchor();
  int docs_per_window = 100;  // per candidate
  // Bridge vocabulary shared by chronologically adjacent windows inside a
  // regime; gives the corpus network its quasi-linear backbone. 0 disables.
  int bridge_terms_per_boundary = 3;
  double bridge_rate = 0.24;  // fraction of documents drawn from bridges

  static SynthSpec parse(const std::string& json_text);
  static SynthSpec load(const std::filesystem::path& path);
};

// Throws std::runtime_error naming the offending field when the spec is
// invalid.
void validate(const SynthSpec& spec);

// Deterministic for a fixed spec: same seed, same archive. Documents come
// out in timestamp order.
std::vector<ingest::Document> generate(const SynthSpec& spec);

}  // namespace campnet::synth
