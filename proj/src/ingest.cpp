#include "campnet/ingest.hpp"

#include "campnet/csv.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace campnet::ingest {

namespace {

constexpr std::size_t kMaxMessages = 20;

void record_skip(LoadResult& res, std::size_t line_no, const std::string& why, bool strict) {
  if (strict) throw std::runtime_error("line " + std::to_string(line_no) + ": " + why);
  ++res.skipped_malformed;
  if (res.messages.size() < kMaxMessages)
    res.messages.push_back("line " + std::to_string(line_no) + ": " + why);
}

bool accept_document(LoadResult& res, Document&& doc, std::size_t line_no, bool strict,
                     bool drop_duplicate_text, std::unordered_set<std::string>& seen_ids,
                     std::unordered_set<std::string>& seen_texts) {
  if (doc.id.empty()) {
    record_skip(res, line_no, "empty id", strict);
    return false;
  }
  if (!seen_ids.insert(doc.id).second) {
    if (strict) throw std::runtime_error("line " + std::to_string(line_no) + ": duplicate id " + doc.id);
    ++res.skipped_duplicate_id;
    return false;
  }
  if (drop_duplicate_text && !seen_texts.insert(doc.text).second) {
    ++res.skipped_duplicate_text;
    return false;
  }
  res.documents.push_back(std::move(doc));
  return true;
}

void load_csv(std::istream& in, const LoadOptions& opts, LoadResult& res) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) throw std::runtime_error("csv: missing header row");
  std::unordered_map<std::string, std::size_t> cols;
  for (std::size_t i = 0; i < header->size(); ++i) cols.emplace((*header)[i], i);
  for (const char* required : {"id", "author", "timestamp", "text"}) {
    if (!cols.count(required))
      throw std::runtime_error(std::string("csv: missing required column '") + required + "'");
  }
  const std::size_t ncols = header->size();
  std::unordered_set<std::string> seen_ids, seen_texts;
  std::size_t line_no = 1;
  while (auto row = reader.next()) {
    ++line_no;
    if (row->size() == 1 && (*row)[0].empty()) continue;  // trailing blank line
    if (row->size() != ncols) {
      record_skip(res, line_no, "wrong field count", opts.strict);
      continue;
    }
    Document doc;
    doc.id = (*row)[cols["id"]];
    doc.author = (*row)[cols["author"]];
    doc.text = (*row)[cols["text"]];
    auto ts = parse_timestamp((*row)[cols["timestamp"]]);
    if (!ts) {
      record_skip(res, line_no, "unparseable timestamp '" + (*row)[cols["timestamp"]] + "'",
                  opts.strict);
      continue;
    }
    doc.timestamp = *ts;
    accept_document(res, std::move(doc), line_no, opts.strict, opts.drop_duplicate_text,
                    seen_ids, seen_texts);
  }
}

void load_jsonl(std::istream& in, const LoadOptions& opts, LoadResult& res) {
  std::string line;
  std::size_t line_no = 0;
  std::unordered_set<std::string> seen_ids, seen_texts;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      record_skip(res, line_no, "invalid json object", opts.strict);
      continue;
    }
    bool ok = true;
    for (const char* key : {"id", "author", "timestamp", "text"}) {
      if (!obj.contains(key) || !obj[key].is_string()) {
        record_skip(res, line_no, std::string("missing or non-string '") + key + "'", opts.strict);
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    Document doc;
    doc.id = obj["id"].get<std::string>();
    doc.author = obj["author"].get<std::string>();
    doc.text = obj["text"].get<std::string>();
    auto ts = parse_timestamp(obj["timestamp"].get<std::string>());
    if (!ts) {
      record_skip(res, line_no,
                  "unparseable timestamp '" + obj["timestamp"].get<std::string>() + "'",
                  opts.strict);
      continue;
    }
    doc.timestamp = *ts;
    accept_document(res, std::move(doc), line_no, opts.strict, opts.drop_duplicate_text,
                    seen_ids, seen_texts);
  }
}

}  // namespace

std::optional<Format> parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "jsonl") return Format::jsonl;
  return std::nullopt;
}

LoadResult load_documents(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path.string());
  LoadResult res;
  if (opts.format == Format::csv)
    load_csv(in, opts, res);
  else
    load_jsonl(in, opts, res);
  return res;
}

void write_documents_jsonl(std::ostream& out, const std::vector<Document>& documents) {
  for (const auto& doc : documents) {
    nlohmann::ordered_json j;
    j["id"] = doc.id;
    j["author"] = doc.author;
    j["timestamp"] = format_timestamp(doc.timestamp);
    j["text"] = doc.text;
    out << j.dump() << "\n";
  }
}

namespace {

struct Utf8Char {
  char32_t cp = 0;
  std::size_t len = 1;
};

Utf8Char decode_utf8(std::string_view s, std::size_t i) {
  unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  auto cont = [&](std::size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xc0) == 0x80;
  };
  if ((b0 & 0xe0) == 0xc0 && cont(1)) {
    char32_t cp = static_cast<char32_t>(b0 & 0x1f) << 6 |
                  (static_cast<unsigned char>(s[i + 1]) & 0x3f);
    return {cp, 2};
  }
  if ((b0 & 0xf0) == 0xe0 && cont(1) && cont(2)) {
    char32_t cp = static_cast<char32_t>(b0 & 0x0f) << 12 |
                  static_cast<char32_t>(static_cast<unsigned char>(s[i + 1]) & 0x3f) << 6 |
                  (static_cast<unsigned char>(s[i + 2]) & 0x3f);
    return {cp, 3};
  }
  if ((b0 & 0xf8) == 0xf0 && cont(1) && cont(2) && cont(3)) {
    char32_t cp = static_cast<char32_t>(b0 & 0x07) << 18 |
                  static_cast<char32_t>(static_cast<unsigned char>(s[i + 1]) & 0x3f) << 12 |
                  static_cast<char32_t>(static_cast<unsigned char>(s[i + 2]) & 0x3f) << 6 |
                  (static_cast<unsigned char>(s[i + 3]) & 0x3f);
    return {cp, 4};
  }
  return {0xfffd, 1};  // invalid byte, treated as punctuation
}

bool is_space_cp(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0x00a0 || cp == 0x2028 || cp == 0x2029;
}

bool is_word_cp(char32_t cp) {
  if (cp < 0x80)
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           cp == '_';
  if (cp == 0x2019) return false;                  // curly apostrophe is a joiner
  if (cp >= 0x2000 && cp <= 0x206f) return false;  // general punctuation (dashes, quotes)
  if (cp == 0x00ab || cp == 0x00bb || cp == 0x00d7 || cp == 0xfffd) return false;
  return true;
}

void append_lowered(std::string& tok, std::string_view s, std::size_t i, Utf8Char c) {
  if (c.cp < 0x80) {
    char ch = static_cast<char>(c.cp);
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    tok.push_back(ch);
  } else if (c.cp >= 0x00c0 && c.cp <= 0x00de && c.cp != 0x00d7) {
    // Latin-1 uppercase range folds by +0x20.
    char32_t low = c.cp + 0x20;
    tok.push_back(static_cast<char>(0xc0 | (low >> 6)));
    tok.push_back(static_cast<char>(0x80 | (low & 0x3f)));
  } else {
    tok.append(s.substr(i, c.len));
  }
}

bool starts_with_icase(std::string_view s, std::size_t i, std::string_view prefix) {
  if (i + prefix.size() > s.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    char a = s[i + k];
    if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
    if (a != prefix[k]) return false;
  }
  return true;
}

std::string decode_entities(std::string_view text) {
  static const std::pair<std::string_view, std::string_view> table[] = {
      {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"},
      {"&quot;", "\""}, {"&#39;", "'"}, {"&nbsp;", " "},
  };
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '&') {
      bool matched = false;
      for (const auto& [from, to] : table) {
        if (text.compare(i, from.size(), from) == 0) {
          out += to;
          i += from.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& opts) {
  std::string decoded;
  if (opts.decode_entities) {
    decoded = decode_entities(text);
    text = decoded;
  }

  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    Utf8Char c = decode_utf8(text, i);

    if (is_space_cp(c.cp)) {
      flush();
      i += c.len;
      continue;
    }

    if (cur.empty()) {
      // URLs are dropped whole.
      if (starts_with_icase(text, i, "http://") || starts_with_icase(text, i, "https://") ||
          starts_with_icase(text, i, "www.")) {
        while (i < n) {
          Utf8Char u = decode_utf8(text, i);
          if (is_space_cp(u.cp)) break;
          i += u.len;
        }
        continue;
      }
      if (c.cp == '#' || c.cp == '@') {
        std::size_t j = i + c.len;
        bool word_follows = j < n && is_word_cp(decode_utf8(text, j).cp);
        if (c.cp == '#' && word_follows) {
          cur.push_back('#');
          i += c.len;
          continue;
        }
        if (c.cp == '@' && word_follows) {
          if (opts.keep_mentions) {
            cur.push_back('@');
            i += c.len;
          } else {
            i += c.len;
            while (i < n) {
              Utf8Char u = decode_utf8(text, i);
              if (!is_word_cp(u.cp)) break;
              i += u.len;
            }
          }
          continue;
        }
        i += c.len;  // bare marker, dropped
        continue;
      }
    }

    if (is_word_cp(c.cp)) {
      append_lowered(cur, text, i, c);
      i += c.len;
      continue;
    }

    if (c.cp == '\'' || c.cp == 0x2019 || c.cp == '-') {
      char joiner = (c.cp == '-') ? '-' : '\'';
      std::size_t j = i + c.len;
      bool word_follows = j < n && is_word_cp(decode_utf8(text, j).cp);
      // Apostrophes join inside a token; hyphens also attach at token start
      // ("-john" style signatures).
      if (word_follows && (!cur.empty() || joiner == '-')) {
        cur.push_back(joiner);
        i += c.len;
        continue;
      }
    }

    flush();
    i += c.len;
  }
  flush();
  return tokens;
}

std::size_t CorpusBucket::token_total() const {
  std::size_t n = 0;
  for (const auto& toks : token_lists) n += toks.size();
  return n;
}

std::string CorpusBucket::label() const {
  std::string w = window.label();
  if (author) return *author + ":" + w;
  return w;
}

BucketResult bucket(const std::vector<Document>& documents, const BucketOptions& opts) {
  BucketResult res;

  // Resolve the observation range to whole windows.
  std::optional<std::int64_t> first_serial, last_serial;  // window start serials
  auto note_window = [&](const TimeWindow& w) {
    std::int64_t s = w.start.serial();
    if (!first_serial || s < *first_serial) first_serial = s;
    if (!last_serial || s > *last_serial) last_serial = s;
  };
  if (opts.range_start)
    note_window(window_for(*opts.range_start, opts.granularity, opts.anchor));
  if (opts.range_end) {
    Date last_day = Date::from_serial(opts.range_end->serial() - 1);
    note_window(window_for(last_day, opts.granularity, opts.anchor));
  }

  // Group in-range documents per (window, author) key, preserving order.
  struct Key {
    std::int64_t window_start;
    std::string author;
    bool operator<(const Key& o) const {
      if (window_start != o.window_start) return window_start < o.window_start;
      return author < o.author;
    }
  };
  std::map<Key, std::vector<const Document*>> groups;
  std::map<std::int64_t, TimeWindow> windows_seen;
  std::vector<std::string> authors;

  for (const Document& doc : documents) {
    Date d = date_of(doc.timestamp);
    if ((opts.range_start && d < *opts.range_start) ||
        (opts.range_end && !(d < *opts.range_end))) {
      ++res.excluded_out_of_range;
      continue;
    }
    TimeWindow w = window_for(d, opts.granularity, opts.anchor);
    windows_seen.emplace(w.start.serial(), w);
    if (!opts.range_start || !opts.range_end) note_window(w);
    std::string author = opts.per_author ? doc.author : std::string();
    if (opts.per_author && std::find(authors.begin(), authors.end(), author) == authors.end())
      authors.push_back(author);
    groups[{w.start.serial(), author}].push_back(&doc);
  }
  if (!opts.per_author) authors.push_back(std::string());
  std::sort(authors.begin(), authors.end());

  if (!first_serial) return res;  // nothing in range and no explicit range

  // Walk the contiguous window grid and emit one bucket per (window, author).
  TimeWindow w = opts.granularity == Granularity::monthly
                     ? window_for(Date::from_serial(*first_serial), opts.granularity, opts.anchor)
                     : TimeWindow{Date::from_serial(*first_serial),
                                  Date::from_serial(*first_serial + 14), opts.granularity};
  while (w.start.serial() <= *last_serial) {
    for (const std::string& author : authors) {
      CorpusBucket b;
      b.window = w;
      if (opts.per_author) b.author = author;
      auto it = groups.find({w.start.serial(), author});
      if (it != groups.end()) {
        for (const Document* doc : it->second) {
          b.documents.push_back(*doc);
          b.token_lists.push_back(tokenize(doc->text, opts.tokenizer));
        }
      }
      if (b.empty()) res.empty_bucket_labels.push_back(b.label());
      res.buckets.push_back(std::move(b));
    }
    w = next_window(w);
  }
  return res;
}

}  // namespace campnet::ingest
