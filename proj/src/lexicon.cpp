#include "campnet/lexicon.hpp"

#include "campnet/csv.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace campnet::lexicon {

namespace {

double mean_of(const std::map<std::string, std::size_t>& counts) {
  if (counts.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [_, c] : counts) sum += static_cast<double>(c);
  return sum / static_cast<double>(counts.size());
}

void sort_terms(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.text < b.text;
  });
}

std::unordered_map<std::string, std::size_t> unigram_counts(
    const std::vector<ingest::CorpusBucket>& buckets) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& b : buckets)
    for (const auto& toks : b.token_lists)
      for (const auto& t : toks) ++counts[t];
  return counts;
}

}  // namespace

ReferenceLexicon ReferenceLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open lexicon file: " + path.string());
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->size() < 2 || (*header)[0] != "word" || (*header)[1] != "count")
    throw std::runtime_error("lexicon file needs a 'word,count' header: " + path.string());
  std::map<std::string, std::size_t> entries;
  std::size_t line_no = 1;
  while (auto row = reader.next()) {
    ++line_no;
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != 2)
      throw std::runtime_error("lexicon line " + std::to_string(line_no) + ": wrong field count");
    long long count = 0;
    try {
      count = std::stoll((*row)[1]);
    } catch (const std::exception&) {
      count = 0;
    }
    if ((*row)[0].empty() || count <= 0)
      throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                               ": need a word and a positive count");
    entries[(*row)[0]] = static_cast<std::size_t>(count);
  }
  return from_entries(std::move(entries));
}

ReferenceLexicon ReferenceLexicon::from_entries(std::map<std::string, std::size_t> entries) {
  ReferenceLexicon ref;
  ref.entries = std::move(entries);
  ref.mean_count = mean_of(ref.entries);
  return ref;
}

std::optional<std::size_t> TermSet::find(std::string_view text) const {
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i].text == text) return i;
  return std::nullopt;
}

TermSet select_base_terms(const std::vector<ingest::CorpusBucket>& buckets,
                          std::size_t min_count, std::size_t max_terms) {
  auto counts = unigram_counts(buckets);
  std::vector<Term> qualifying;
  for (const auto& [text, count] : counts) {
    if (count < min_count) continue;
    Term t;
    t.text = text;
    t.arity = 1;
    t.is_hashtag = !text.empty() && text[0] == '#';
    t.count = count;
    qualifying.push_back(std::move(t));
  }
  if (qualifying.size() < 2)
    throw std::runtime_error("fewer than 2 terms reach min count " + std::to_string(min_count) +
                             "; correlation needs at least 2");
  sort_terms(qualifying);
  if (qualifying.size() > max_terms) qualifying.resize(max_terms);
  TermSet set;
  set.terms = std::move(qualifying);
  set.kind = TermKind::base;
  return set;
}

bool classify_rare(const std::string& word, const ReferenceLexicon& ref, double multiplier) {
  auto it = ref.entries.find(word);
  if (it == ref.entries.end()) return true;
  return static_cast<double>(it->second) < multiplier * ref.mean_count;
}

bool classify_significant(const std::string& word,
                          const std::map<std::string, std::size_t>& corpus_counts,
                          std::size_t min_occurrences, double multiplier) {
  auto it = corpus_counts.find(word);
  std::size_t count = it == corpus_counts.end() ? 0 : it->second;
  if (count < min_occurrences) return false;
  return static_cast<double>(count) > multiplier * mean_of(corpus_counts);
}

TermSet extract_terms(const std::vector<ingest::CorpusBucket>& buckets,
                      const ReferenceLexicon& ref, const ExtractOptions& opts) {
  auto counts = unigram_counts(buckets);
  double corpus_mean = 0.0;
  if (!counts.empty()) {
    double sum = 0.0;
    for (const auto& [_, c] : counts) sum += static_cast<double>(c);
    corpus_mean = sum / static_cast<double>(counts.size());
  }

  auto eligible = [&](const std::string& word) {
    if (!word.empty() && word[0] == '#') return true;
    if (classify_rare(word, ref, opts.rare_multiplier)) return true;
    std::size_t c = counts.at(word);
    return c >= opts.min_occurrences &&
           static_cast<double>(c) > opts.sig_multiplier * corpus_mean;
  };

  std::unordered_map<std::string, bool> eligibility;
  eligibility.reserve(counts.size());
  for (const auto& [word, _] : counts) eligibility.emplace(word, eligible(word));

  std::vector<Term> terms;
  for (const auto& [word, count] : counts) {
    if (!eligibility[word]) continue;
    Term t;
    t.text = word;
    t.arity = 1;
    t.is_hashtag = word[0] == '#';
    t.count = count;
    terms.push_back(std::move(t));
  }

  // Adjacent runs of eligible words inside one document form the n-grams.
  std::unordered_map<std::string, std::pair<int, std::size_t>> ngrams;  // text → (arity, count)
  for (const auto& b : buckets) {
    for (const auto& toks : b.token_lists) {
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (!eligibility[toks[i]]) continue;
        if (i + 1 < toks.size() && eligibility[toks[i + 1]]) {
          auto& slot = ngrams[toks[i] + " " + toks[i + 1]];
          slot.first = 2;
          ++slot.second;
          if (i + 2 < toks.size() && eligibility[toks[i + 2]]) {
            auto& slot3 = ngrams[toks[i] + " " + toks[i + 1] + " " + toks[i + 2]];
            slot3.first = 3;
            ++slot3.second;
          }
        }
      }
    }
  }
  for (auto& [text, info] : ngrams) {
    if (info.second < opts.min_ngram_count) continue;
    Term t;
    t.text = text;
    t.arity = info.first;
    t.count = info.second;
    terms.push_back(std::move(t));
  }

  sort_terms(terms);
  TermSet set;
  set.terms = std::move(terms);
  set.kind = TermKind::extracted;
  return set;
}

FrequencyVector frequency_vector(const ingest::CorpusBucket& bucket, const TermSet& terms) {
  if (terms.terms.empty()) throw std::runtime_error("frequency_vector needs a non-empty term set");
  std::unordered_map<std::string_view, std::size_t> index;
  int max_arity = 1;
  for (std::size_t i = 0; i < terms.terms.size(); ++i) {
    index.emplace(terms.terms[i].text, i);
    max_arity = std::max(max_arity, terms.terms[i].arity);
  }

  FrequencyVector fv;
  fv.counts.assign(terms.terms.size(), 0);
  std::string joined;
  for (const auto& toks : bucket.token_lists) {
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (auto it = index.find(std::string_view(toks[i])); it != index.end())
        ++fv.counts[it->second];
      if (max_arity >= 2 && i + 1 < toks.size()) {
        joined = toks[i];
        joined += ' ';
        joined += toks[i + 1];
        if (auto it = index.find(std::string_view(joined)); it != index.end())
          ++fv.counts[it->second];
        if (max_arity >= 3 && i + 2 < toks.size()) {
          joined += ' ';
          joined += toks[i + 2];
          if (auto it = index.find(std::string_view(joined)); it != index.end())
            ++fv.counts[it->second];
        }
      }
    }
  }

  std::size_t total = bucket.token_total();
  if (total > 0) {
    std::vector<double> rel(fv.counts.size());
    for (std::size_t i = 0; i < rel.size(); ++i)
      rel[i] = static_cast<double>(fv.counts[i]) / static_cast<double>(total);
    fv.relative = std::move(rel);
  }
  return fv;
}

void write_term_csv(std::ostream& out, const TermSet& terms) {
  out << "term,arity,count\n";
  for (const Term& t : terms.terms)
    out << csv::join_row({t.text, std::to_string(t.arity), std::to_string(t.count)});
}

TermSet read_term_csv(std::istream& in, TermKind kind) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->size() < 3 || (*header)[0] != "term")
    throw std::runtime_error("term file needs a 'term,arity,count' header");
  TermSet set;
  set.kind = kind;
  while (auto row = reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != 3) throw std::runtime_error("term file: wrong field count");
    Term t;
    t.text = (*row)[0];
    t.arity = std::stoi((*row)[1]);
    t.count = static_cast<std::size_t>(std::stoull((*row)[2]));
    t.is_hashtag = !t.text.empty() && t.text[0] == '#';
    set.terms.push_back(std::move(t));
  }
  return set;
}

}  // namespace campnet::lexicon
