#pragma once

#include "campnet/dates.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace campnet::ingest {

// One timestamped, author-attributed text. The atomic input unit.
struct Document {
  std::string id;
  std::string author;
  UnixTime timestamp = 0;
  std::string text;
};

enum class Format { csv, jsonl };
std::optional<Format> parse_format(std::string_view s);

struct LoadOptions {
  Format format = Format::jsonl;
  // Lenient mode skips malformed rows and counts them; strict mode throws.
  bool strict = false;
  // Drops exact-text duplicates (retweet archives); off by default.
  bool drop_duplicate_text = false;
};

struct LoadResult {
  std::vector<Document> documents;  // file order
  std::size_t skipped_malformed = 0;
  std::size_t skipped_duplicate_id = 0;
  std::size_t skipped_duplicate_text = 0;
  std::vector<std::string> messages;  // one per skip, capped
};

// Loads an archive. CSV columns id,author,timestamp,text (RFC 4180, any
// column order, header required); JSONL has one object per line with the
// same keys. Unreadable files throw.
LoadResult load_documents(const std::filesystem::path& path, const LoadOptions& opts);

// One {"id","author","timestamp","text"} object per line, timestamps in
// UTC ISO-8601.
void write_documents_jsonl(std::ostream& out, const std::vector<Document>& documents);

struct TokenizerOptions {
  bool keep_mentions = true;    // "@name" kept as a token
  bool decode_entities = true;  // &amp; &lt; &gt; &quot; &#39;
};

// Lowercased tokens; '#'-hashtags kept whole; URLs dropped; apostrophes and
// hyphens kept when attached to word characters ("y'all", "2-party",
// "-john"); no stemming.
std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& opts = {});

// All documents of one (author-or-all, window) pair.
struct CorpusBucket {
  TimeWindow window;
  std::optional<std::string> author;  // nullopt = all authors
  std::vector<Document> documents;
  std::vector<std::vector<std::string>> token_lists;  // one per document

  bool empty() const { return documents.empty(); }
  std::size_t token_total() const;
  std::string label() const;  // "YYYY-MM" / start ISO, author-qualified ("a:...")
};

struct BucketOptions {
  Granularity granularity = Granularity::monthly;
  Date anchor = default_anchor();  // biweekly grid alignment
  bool per_author = false;
  std::optional<Date> range_start;  // inclusive; default: derived from data
  std::optional<Date> range_end;    // exclusive
  TokenizerOptions tokenizer;
};

struct BucketResult {
  std::vector<CorpusBucket> buckets;  // sorted by window start, then author
  std::size_t excluded_out_of_range = 0;
  std::vector<std::string> empty_bucket_labels;  // gaps inside the observed range
};

// Assigns every in-range document to exactly one bucket and tokenizes it.
// Empty windows inside the observed range yield empty buckets so the window
// grid stays contiguous.
BucketResult bucket(const std::vector<Document>& documents, const BucketOptions& opts);

}  // namespace campnet::ingest
