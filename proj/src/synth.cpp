#include "campnet/synth.hpp"

#include "campnet/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace campnet::synth {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw std::runtime_error("synth spec: " + field + ": " + why);
}

std::vector<std::string> string_list(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) bad(field, "needs a non-empty array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string() || e.get<std::string>().empty()) bad(field, "entries must be non-empty strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

void reject_unknown(const nlohmann::json& j, const std::string& where,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end())
      bad(where, "unknown key '" + key + "'");
  }
}

// Zipf-flavored weights over a source vocabulary.
std::vector<double> rank_weights(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::sqrt(1.0 + static_cast<double>(i));
  return w;
}

struct Source {
  const std::vector<std::string>* vocab = nullptr;
  std::vector<double> weights;
};

}  // namespace

SynthSpec SynthSpec::parse(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) bad("(root)", "not a JSON object");
  reject_unknown(j, "(root)",
                 {"candidates", "windows", "regimes", "plant_follow", "noise_rate", "seed",
                  "granularity", "start_date", "docs_per_window", "bridge_terms_per_boundary",
                  "bridge_rate"});

  SynthSpec spec;
  if (!j.contains("candidates")) bad("candidates", "missing");
  spec.candidates = string_list(j["candidates"], "candidates");
  if (!j.contains("windows") || !j["windows"].is_number_integer()) bad("windows", "missing integer");
  spec.windows = j["windows"].get<int>();

  if (!j.contains("regimes") || !j["regimes"].is_array() || j["regimes"].empty())
    bad("regimes", "needs a non-empty array");
  for (const auto& jr : j["regimes"]) {
    if (!jr.is_object()) bad("regimes", "entries must be objects");
    reject_unknown(jr, "regimes", {"start_window", "vocabulary"});
    if (!jr.contains("start_window") || !jr["start_window"].is_number_integer())
      bad("regimes.start_window", "missing integer");
    Regime r;
    r.start_window = jr["start_window"].get<int>();
    if (!jr.contains("vocabulary")) bad("regimes.vocabulary", "missing");
    r.vocabulary = string_list(jr["vocabulary"], "regimes.vocabulary");
    spec.regimes.push_back(std::move(r));
  }

  if (j.contains("plant_follow")) {
    if (!j["plant_follow"].is_array()) bad("plant_follow", "must be an array");
    for (const auto& jp : j["plant_follow"]) {
      if (!jp.is_object()) bad("plant_follow", "entries must be objects");
      reject_unknown(jp, "plant_follow",
                     {"leader", "follower", "topic_vocab", "onset_window", "lag_windows"});
      PlantFollow p;
      for (const char* key : {"leader", "follower"})
        if (!jp.contains(key) || !jp[key].is_string()) bad(std::string("plant_follow.") + key, "missing string");
      p.leader = jp["leader"].get<std::string>();
      p.follower = jp["follower"].get<std::string>();
      if (!jp.contains("topic_vocab")) bad("plant_follow.topic_vocab", "missing");
      p.topic_vocab = string_list(jp["topic_vocab"], "plant_follow.topic_vocab");
      if (!jp.contains("onset_window") || !jp["onset_window"].is_number_integer())
        bad("plant_follow.onset_window", "missing integer");
      p.onset_window = jp["onset_window"].get<int>();
      if (jp.contains("lag_windows")) {
        if (!jp["lag_windows"].is_number_integer()) bad("plant_follow.lag_windows", "must be an integer");
        p.lag_windows = jp["lag_windows"].get<int>();
      }
      spec.plant_follow.push_back(std::move(p));
    }
  }

  if (j.contains("noise_rate")) {
    if (!j["noise_rate"].is_number()) bad("noise_rate", "must be a number");
    spec.noise_rate = j["noise_rate"].get<double>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) bad("seed", "must be an integer");
    spec.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("granularity")) {
    auto g = j["granularity"].is_string()
                 ? parse_granularity(j["granularity"].get<std::string>())
                 : std::nullopt;
    if (!g) bad("granularity", "must be \"monthly\" or \"biweekly\"");
    spec.granularity = *g;
  }
  if (j.contains("start_date")) {
    auto d = j["start_date"].is_string() ? parse_date(j["start_date"].get<std::string>())
                                         : std::nullopt;
    if (!d) bad("start_date", "must be YYYY-MM-DD");
    spec.start_date = *d;
  }
  if (j.contains("docs_per_window")) {
    if (!j["docs_per_window"].is_number_integer()) bad("docs_per_window", "must be an integer");
    spec.docs_per_window = j["docs_per_window"].get<int>();
  }
  if (j.contains("bridge_terms_per_boundary")) {
    if (!j["bridge_terms_per_boundary"].is_number_integer())
      bad("bridge_terms_per_boundary", "must be an integer");
    spec.bridge_terms_per_boundary = j["bridge_terms_per_boundary"].get<int>();
  }
  if (j.contains("bridge_rate")) {
    if (!j["bridge_rate"].is_number()) bad("bridge_rate", "must be a number");
    spec.bridge_rate = j["bridge_rate"].get<double>();
  }

  validate(spec);
  return spec;
}

SynthSpec SynthSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open synth spec: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void validate(const SynthSpec& spec) {
  if (spec.candidates.empty()) bad("candidates", "needs at least one candidate");
  std::set<std::string> uniq(spec.candidates.begin(), spec.candidates.end());
  if (uniq.size() != spec.candidates.size()) bad("candidates", "duplicate names");
  if (spec.windows < 1) bad("windows", "needs at least 1 window");
  if (spec.regimes.empty()) bad("regimes", "needs at least one regime");
  if (spec.regimes.front().start_window != 0) bad("regimes", "first regime must start at window 0");
  for (std::size_t i = 1; i < spec.regimes.size(); ++i)
    if (spec.regimes[i].start_window <= spec.regimes[i - 1].start_window)
      bad("regimes", "start_window values must strictly increase");
  if (spec.regimes.back().start_window >= spec.windows)
    bad("regimes", "start_window beyond the window grid");
  for (const auto& p : spec.plant_follow) {
    if (!uniq.count(p.leader)) bad("plant_follow.leader", "unknown candidate '" + p.leader + "'");
    if (!uniq.count(p.follower))
      bad("plant_follow.follower", "unknown candidate '" + p.follower + "'");
    if (p.leader == p.follower) bad("plant_follow", "leader and follower must differ");
    if (p.onset_window < 0) bad("plant_follow.onset_window", "must be >= 0");
    if (p.lag_windows < 1) bad("plant_follow.lag_windows", "must be >= 1");
    if (p.onset_window + p.lag_windows >= spec.windows)
      bad("plant_follow", "follower window onset_window + lag_windows falls off the grid");
  }
  if (spec.noise_rate < 0.0 || spec.noise_rate >= 0.5)
    bad("noise_rate", "must lie in [0, 0.5)");
  if (spec.docs_per_window < 1) bad("docs_per_window", "must be >= 1");
  if (spec.bridge_terms_per_boundary < 0) bad("bridge_terms_per_boundary", "must be >= 0");
  if (spec.bridge_rate < 0.0 || spec.bridge_rate >= 1.0) bad("bridge_rate", "must lie in [0, 1)");
}

std::vector<ingest::Document> generate(const SynthSpec& spec) {
  validate(spec);

  std::vector<TimeWindow> grid;
  TimeWindow w = window_for(spec.start_date, spec.granularity, default_anchor());
  for (int i = 0; i < spec.windows; ++i) {
    grid.push_back(w);
    w = next_window(w);
  }

  auto regime_of = [&](int window) {
    std::size_t r = 0;
    for (std::size_t i = 0; i < spec.regimes.size(); ++i)
      if (spec.regimes[i].start_window <= window) r = i;
    return r;
  };

  // Bridge vocabularies per within-regime boundary (window, window + 1).
  std::vector<std::vector<std::string>> bridges(
      spec.windows > 0 ? static_cast<std::size_t>(spec.windows - 1) : 0);
  if (spec.bridge_terms_per_boundary > 0 && spec.bridge_rate > 0.0) {
    for (int b = 0; b + 1 < spec.windows; ++b) {
      if (regime_of(b) != regime_of(b + 1)) continue;
      for (int k = 0; k < spec.bridge_terms_per_boundary; ++k)
        bridges[static_cast<std::size_t>(b)].push_back("bridge-w" + std::to_string(b) + "-" +
                                                       std::to_string(k));
    }
  }

  const int n = spec.docs_per_window;
  std::vector<ingest::Document> docs;

  for (std::size_t ci = 0; ci < spec.candidates.size(); ++ci) {
    const std::string& cand = spec.candidates[ci];
    Rng rng(derive_seed(spec.seed, "candidate:" + cand));

    for (int wi = 0; wi < spec.windows; ++wi) {
      // Per-document sources: planted topics, bridges, regime core.
      std::vector<Source> sources;
      for (const auto& p : spec.plant_follow) {
        bool leads = p.leader == cand && wi >= p.onset_window &&
                     wi < p.onset_window + p.lag_windows;
        bool follows = p.follower == cand && wi == p.onset_window + p.lag_windows;
        if (!leads && !follows) continue;
        Source s;
        s.vocab = &p.topic_vocab;
        s.weights = rank_weights(p.topic_vocab.size());
        int share = std::max(3, n / 5);
        for (int k = 0; k < share; ++k) sources.push_back(s);
      }
      int per_bridge = static_cast<int>(std::lround(n * spec.bridge_rate / 2.0));
      for (int b : {wi - 1, wi}) {
        if (b < 0 || b + 1 >= spec.windows) continue;
        const auto& vocab = bridges[static_cast<std::size_t>(b)];
        if (vocab.empty()) continue;
        Source s;
        s.vocab = &vocab;
        s.weights = rank_weights(vocab.size());
        for (int k = 0; k < per_bridge; ++k) sources.push_back(s);
      }
      if (static_cast<int>(sources.size()) >= n)
        bad("docs_per_window", "too small for the planted load at window " + std::to_string(wi));
      {
        Source s;
        const auto& vocab = spec.regimes[regime_of(wi)].vocabulary;
        s.vocab = &vocab;
        s.weights = rank_weights(vocab.size());
        while (static_cast<int>(sources.size()) < n) sources.push_back(s);
      }

      UnixTime window_epoch = grid[static_cast<std::size_t>(wi)].start.serial() * 86400;
      for (int d = 0; d < n; ++d) {
        const Source& src = sources[static_cast<std::size_t>(d)];
        int len = rng.next_int(8, 30);
        std::string text;
        for (int t = 0; t < len; ++t) {
          if (t) text += ' ';
          if (rng.next_double() < spec.noise_rate)
            text += "zz" + std::to_string(rng.next_below(1000000000));
          else
            text += (*src.vocab)[rng.next_weighted(src.weights)];
        }
        ingest::Document doc;
        doc.id = "s-" + cand + "-w" + std::to_string(wi) + "-" + std::to_string(d);
        doc.author = cand;
        doc.timestamp = window_epoch + static_cast<UnixTime>(ci) * 3600 + d;
        doc.text = std::move(text);
        docs.push_back(std::move(doc));
      }
    }
  }

  std::stable_sort(docs.begin(), docs.end(),
                   [](const ingest::Document& a, const ingest::Document& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return a.id < b.id;
                   });
  return docs;
}

}  // namespace campnet::synth
