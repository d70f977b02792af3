#include "campnet/csv.hpp"

#include <istream>

namespace campnet::csv {

std::string escape(const std::string& field) {
  bool needs_quoting = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quoting = true;
      break;
    }
  }
  if (!needs_quoting) return field;
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

std::optional<std::vector<std::string>> Reader::next() {
  int first = in_.peek();
  if (first == std::char_traits<char>::eof()) return std::nullopt;

  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  bool saw_any = false;

  int ci;
  while ((ci = in_.get()) != std::char_traits<char>::eof()) {
    char c = static_cast<char>(ci);
    saw_any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          cur.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        cur.push_back(c);
      }
      continue;
    }
    if (c == '"' && cur.empty()) {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\r') {
      if (in_.peek() == '\n') in_.get();
      fields.push_back(std::move(cur));
      return fields;
    } else if (c == '\n') {
      fields.push_back(std::move(cur));
      return fields;
    } else {
      cur.push_back(c);
    }
  }
  if (!saw_any) return std::nullopt;
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace campnet::csv
