#pragma once

#include "campnet/ingest.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace campnet::lexicon {

// Word frequency list in the style of large reference corpora (COCA-like).
struct ReferenceLexicon {
  std::map<std::string, std::size_t> entries;
  double mean_count = 0.0;  // Σ counts / #entries

  static ReferenceLexicon load(const std::filesystem::path& path);
  static ReferenceLexicon from_entries(std::map<std::string, std::size_t> entries);
};

struct Term {
  std::string text;  // n-grams joined with single spaces
  int arity = 1;     // 1, 2 or 3
  bool is_hashtag = false;
  std::size_t count = 0;  // whole-corpus occurrences
};

enum class TermKind { base, extracted };

struct TermSet {
  std::vector<Term> terms;  // unique, ordered count desc then text asc
  TermKind kind = TermKind::base;

  std::size_t size() const { return terms.size(); }
  std::optional<std::size_t> find(std::string_view text) const;
};

struct FrequencyVector {
  std::vector<std::size_t> counts;               // aligned with the TermSet
  std::optional<std::vector<double>> relative;   // counts / bucket token total
};

inline constexpr std::size_t kDefaultMinCount = 100;
inline constexpr std::size_t kDefaultMaxTerms = 300;
inline constexpr double kDefaultMultiplier = 25.0;
inline constexpr std::size_t kDefaultMinOccurrences = 10;

// Unigrams occurring at least min_count times corpus-wide, capped at the
// max_terms most frequent (ties lexicographic). Fewer than 2 qualifying
// terms is fatal: correlation over a shorter vector is undefined.
TermSet select_base_terms(const std::vector<ingest::CorpusBucket>& buckets,
                          std::size_t min_count = kDefaultMinCount,
                          std::size_t max_terms = kDefaultMaxTerms);

// True when the word is missing from the reference lexicon or sits below
// multiplier x mean reference count.
bool classify_rare(const std::string& word, const ReferenceLexicon& ref,
                   double multiplier = kDefaultMultiplier);

// True when the word occurs at least min_occurrences times and strictly
// more than multiplier x mean corpus vocabulary count.
bool classify_significant(const std::string& word,
                          const std::map<std::string, std::size_t>& corpus_counts,
                          std::size_t min_occurrences = kDefaultMinOccurrences,
                          double multiplier = kDefaultMultiplier);

struct ExtractOptions {
  double rare_multiplier = kDefaultMultiplier;
  double sig_multiplier = kDefaultMultiplier;
  std::size_t min_occurrences = kDefaultMinOccurrences;
  std::size_t min_ngram_count = kDefaultMinOccurrences;
};

// Hashtags, rare and significant words, and their adjacent bigrams and
// trigrams. N-grams stay inside a single document, require every
// constituent eligible, and must occur min_ngram_count times corpus-wide.
TermSet extract_terms(const std::vector<ingest::CorpusBucket>& buckets,
                      const ReferenceLexicon& ref, const ExtractOptions& opts = {});

// Occurrences of each term in one bucket; overlapping n-gram matches all
// count. Relative frequencies only when the bucket has tokens.
FrequencyVector frequency_vector(const ingest::CorpusBucket& bucket, const TermSet& terms);

// CSV "term,arity,count" with header.
void write_term_csv(std::ostream& out, const TermSet& terms);
TermSet read_term_csv(std::istream& in, TermKind kind);

}  // namespace campnet::lexicon
