#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "erdos/error.hpp"

namespace erdos {

// ---------------------------------------------------------------------------
// Records and messages
// ---------------------------------------------------------------------------

/// One raw mailbox record: unfolded headers in file order.
struct RawRecord {
  std::size_t source_offset = 0;
  std::vector<std::pair<std::string, std::string>> headers;
  bool body_present = false;

  /// Case-insensitive header lookup.
  const std::string* header(std::string_view name) const;
};

struct Message {
  std::string id;
  std::string author;
  std::int64_t timestamp = 0;
  std::optional<std::string> reply_to;
  std::size_t ordinal = 0;

  friend bool operator==(const Message&, const Message&) = default;
};

struct Corpus {
  std::vector<Message> messages;
  std::size_t n_participants = 0;
  std::size_t n_threads = 0;
  std::size_t n_missing = 0;
  std::int64_t date_first = 0;
  std::int64_t date_last = 0;

  std::size_t size() const { return messages.size(); }
};

namespace detail {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

inline std::string_view trim(std::string_view s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

/// All "<...>" tokens in a header value, brackets stripped.
inline std::vector<std::string> angle_ids(std::string_view value) {
  std::vector<std::string> ids;
  std::size_t pos = 0;
  while ((pos = value.find('<', pos)) != std::string_view::npos) {
    const auto end = value.find('>', pos + 1);
    if (end == std::string_view::npos) break;
    auto id = trim(value.substr(pos + 1, end - pos - 1));
    if (!id.empty()) ids.emplace_back(id);
    pos = end + 1;
  }
  return ids;
}

/// Days since 1970-01-01 for a proleptic Gregorian date.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
  std::int64_t year;
  unsigned month;  // 1..12
  unsigned day;    // 1..31
};

constexpr CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

constexpr bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

constexpr unsigned days_in_month(std::int64_t y, unsigned m) {
  constexpr unsigned table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29u : table[m - 1];
}

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  return a / b - ((a % b != 0) && ((a < 0) != (b < 0)));
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  const auto* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != ',') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<unsigned> month_from_name(std::string_view tok) {
  static constexpr std::string_view names[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                               "jul", "aug", "sep", "oct", "nov", "dec"};
  if (tok.size() < 3) return std::nullopt;
  for (unsigned i = 0; i < 12; ++i)
    if (iequals(tok.substr(0, 3), names[i])) return i + 1;
  return std::nullopt;
}

inline std::optional<std::int64_t> zone_offset_seconds(std::string_view tok) {
  if ((tok[0] == '+' || tok[0] == '-') && tok.size() == 5 &&
      std::all_of(tok.begin() + 1, tok.end(), [](unsigned char c) { return std::isdigit(c); })) {
    const int hh = (tok[1] - '0') * 10 + (tok[2] - '0');
    const int mm = (tok[3] - '0') * 10 + (tok[4] - '0');
    const std::int64_t off = hh * 3600 + mm * 60;
    return tok[0] == '-' ? -off : off;
  }
  struct Named {
    std::string_view name;
    int hours;
  };
  static constexpr Named named[] = {{"ut", 0},   {"utc", 0},  {"gmt", 0},  {"z", 0},
                                    {"est", -5}, {"edt", -4}, {"cst", -6}, {"cdt", -5},
                                    {"mst", -7}, {"mdt", -6}, {"pst", -8}, {"pdt", -7}};
  for (const auto& n : named)
    if (iequals(tok, n.name)) return n.hours * 3600;
  return std::nullopt;
}

}  // namespace detail

/// Parses an RFC 2822 date ("Tue, 1 Jul 2003 10:52:37 +0200", obsolete
/// forms included) into UTC epoch seconds.
inline std::optional<std::int64_t> parse_rfc2822_date(std::string_view text) {
  // Drop parenthesized comments such as "(PDT)".
  std::string cleaned;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    else if (c == ')') depth = std::max(0, depth - 1);
    else if (depth == 0) cleaned.push_back(c);
  }
  auto tokens = detail::split_ws(cleaned);
  if (!tokens.empty() && std::isalpha(static_cast<unsigned char>(tokens[0][0])) &&
      !detail::month_from_name(tokens[0]).has_value())
    tokens.erase(tokens.begin());  // day-of-week
  if (tokens.size() < 4) return std::nullopt;

  unsigned day = 0;
  std::optional<unsigned> month;
  // Accept both "1 Jul 2003" and "Jul 1 2003".
  if (detail::parse_int(tokens[0], day)) {
    month = detail::month_from_name(tokens[1]);
  } else {
    month = detail::month_from_name(tokens[0]);
    if (!detail::parse_int(tokens[1], day)) return std::nullopt;
  }
  if (!month) return std::nullopt;

  std::int64_t year = 0;
  if (!detail::parse_int(tokens[2], year)) return std::nullopt;
  if (tokens[2].size() <= 2) year += year < 50 ? 2000 : 1900;
  else if (tokens[2].size() == 3) year += 1900;
  if (day < 1 || day > detail::days_in_month(year, *month)) return std::nullopt;

  const auto clock = tokens[3];
  int hh = 0, mm = 0, ss = 0;
  {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= clock.size(); ++i) {
      if (i == clock.size() || clock[i] == ':') {
        parts.push_back(clock.substr(start, i - start));
        start = i + 1;
      }
    }
    if (parts.size() < 2 || parts.size() > 3) return std::nullopt;
    if (!detail::parse_int(parts[0], hh) || !detail::parse_int(parts[1], mm)) return std::nullopt;
    if (parts.size() == 3 && !detail::parse_int(parts[2], ss)) return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  }

  std::int64_t offset = 0;
  if (tokens.size() >= 5) {
    if (auto z = detail::zone_offset_seconds(tokens[4])) offset = *z;
    // Unknown zone names are read as UTC, as RFC 2822 prescribes for
    // military zones.
  }
  const std::int64_t days = detail::days_from_civil(year, *month, day);
  return days * 86400 + hh * 3600 + mm * 60 + ss - offset;
}

inline const std::string* RawRecord::header(std::string_view name) const {
  for (const auto& [k, v] : headers)
    if (detail::iequals(k, name)) return &v;
  return nullptr;
}

// ---------------------------------------------------------------------------
// mbox
// ---------------------------------------------------------------------------

/// Splits a mailbox into records delimited by "From " lines. Folded header
/// lines are joined to their predecessor with a single space. Records with no
/// header before the blank line are skipped and counted in `diag`.
inline std::vector<RawRecord> parse_mbox(std::istream& in, Diagnostics& diag) {
  std::vector<RawRecord> records;
  std::string line;
  std::size_t offset = 0;

  std::optional<RawRecord> current;
  bool in_headers = false;
  bool saw_header = false;
  bool skipping_duplicate = false;

  const auto finish = [&]() {
    if (!current) return;
    if (!saw_header) {
      diag.drop("record at byte " + std::to_string(current->source_offset) +
                ": no headers before blank line");
    } else {
      records.push_back(std::move(*current));
    }
    current.reset();
  };

  while (std::getline(in, line)) {
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    if (line.rfind("From ", 0) == 0) {
      finish();
      current.emplace();
      current->source_offset = line_offset;
      in_headers = true;
      saw_header = false;
      continue;
    }
    if (!current) continue;  // preamble before the first separator

    if (in_headers) {
      if (line.empty()) {
        in_headers = false;
        continue;
      }
      if (line[0] == ' ' || line[0] == '\t') {
        if (!current->headers.empty() && !skipping_duplicate) {
          auto& value = current->headers.back().second;
          const auto cont = detail::trim(line);
          if (!cont.empty()) {
            if (!value.empty()) value.push_back(' ');
            value.append(cont);
          }
        }
        continue;
      }
      const auto colon = line.find(':');
      if (colon == std::string::npos || colon == 0) {
        // Not a header: the header block ended without a blank line.
        in_headers = false;
        current->body_present = true;
        continue;
      }
      std::string name(detail::trim(std::string_view(line).substr(0, colon)));
      std::string value(detail::trim(std::string_view(line).substr(colon + 1)));
      saw_header = true;
      // First occurrence wins; later duplicates and their folds are ignored.
      skipping_duplicate = current->header(name) != nullptr;
      if (!skipping_duplicate) current->headers.emplace_back(std::move(name), std::move(value));
    } else if (!line.empty()) {
      current->body_present = true;
    }
  }
  finish();
  return records;
}

/// Lowercased address part of a From header value.
inline std::string normalize_address(std::string_view from) {
  const auto ids = detail::angle_ids(from);
  if (!ids.empty()) return detail::to_lower(ids.back());
  for (auto tok : detail::split_ws(from)) {
    if (tok.find('@') != std::string_view::npos) {
      while (!tok.empty() && (tok.front() == '"' || tok.front() == '\'')) tok.remove_prefix(1);
      while (!tok.empty() && (tok.back() == '"' || tok.back() == '\'')) tok.remove_suffix(1);
      return detail::to_lower(tok);
    }
  }
  return detail::to_lower(detail::trim(from));
}

/// Maps raw records onto messages. Records without a parsable Date, a
/// Message-ID or a From address are dropped and counted in `diag`.
inline std::vector<Message> normalize(const std::vector<RawRecord>& records, Diagnostics& diag) {
  std::vector<Message> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto where = "record at byte " + std::to_string(r.source_offset);
    const auto* mid = r.header("Message-ID");
    std::vector<std::string> ids = mid ? detail::angle_ids(*mid) : std::vector<std::string>{};
    std::string id = !ids.empty() ? ids.front() : (mid ? std::string(detail::trim(*mid)) : "");
    if (id.empty()) {
      diag.drop(where + ": missing Message-ID");
      continue;
    }
    const auto* date = r.header("Date");
    const auto ts = date ? parse_rfc2822_date(*date) : std::nullopt;
    if (!ts) {
      diag.drop(where + ": unparsable Date");
      continue;
    }
    const auto* from = r.header("From");
    std::string author = from ? normalize_address(*from) : "";
    if (author.empty()) {
      diag.drop(where + ": missing From");
      continue;
    }

    Message m;
    m.id = std::move(id);
    m.author = std::move(author);
    m.timestamp = *ts;
    if (const auto* irt = r.header("In-Reply-To")) {
      const auto refs = detail::angle_ids(*irt);
      if (!refs.empty()) m.reply_to = refs.front();
    }
    if (!m.reply_to) {
      if (const auto* refs_h = r.header("References")) {
        const auto refs = detail::angle_ids(*refs_h);
        if (!refs.empty()) m.reply_to = refs.back();
      }
    }
    if (m.reply_to && *m.reply_to == m.id) m.reply_to.reset();
    out.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSONL / CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::optional<Message> message_from_json(const nlohmann::json& j, std::string& why) {
  if (!j.is_object()) {
    why = "not an object";
    return std::nullopt;
  }
  const auto id = j.find("id");
  const auto author = j.find("author");
  const auto ts = j.find("timestamp");
  const auto rt = j.find("reply_to");
  if (id == j.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) {
    why = "id must be a non-empty string";
    return std::nullopt;
  }
  if (author == j.end() || !author->is_string() ||
      author->get_ref<const std::string&>().empty()) {
    why = "author must be a non-empty string";
    return std::nullopt;
  }
  if (ts == j.end() || !ts->is_number_integer()) {
    why = "timestamp must be an integer";
    return std::nullopt;
  }
  if (rt != j.end() && !rt->is_null() && !rt->is_string()) {
    why = "reply_to must be a string or null";
    return std::nullopt;
  }
  Message m;
  m.id = id->get<std::string>();
  m.author = author->get<std::string>();
  m.timestamp = ts->get<std::int64_t>();
  if (rt != j.end() && rt->is_string() && rt->get_ref<const std::string&>() != m.id)
    m.reply_to = rt->get<std::string>();
  return m;
}

/// RFC 4180 field splitting for one physical line.
inline std::optional<std::vector<std::string>> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back().push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  if (quoted) return std::nullopt;
  return fields;
}

}  // namespace detail

/// One JSON object per line: {id, author, timestamp, reply_to}. Lines
/// failing the schema are skipped and counted. Blank lines are ignored.
inline std::vector<Message> parse_jsonl(std::istream& in, Diagnostics& diag) {
  std::vector<Message> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    std::string why;
    const auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      diag.drop("line " + std::to_string(lineno) + ": invalid JSON");
      continue;
    }
    if (auto m = detail::message_from_json(j, why)) {
      out.push_back(std::move(*m));
    } else {
      diag.drop("line " + std::to_string(lineno) + ": " + why);
    }
  }
  return out;
}

/// CSV with a required header naming id, author, timestamp, reply_to (any
/// column order). An empty reply_to field means "no antecedent".
inline std::vector<Message> parse_csv(std::istream& in, Diagnostics& diag) {
  std::vector<Message> out;
  std::string line;
  if (!std::getline(in, line)) return out;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv_line(line);
  if (!header) throw ParseError("csv: malformed header row");
  int col_id = -1, col_author = -1, col_ts = -1, col_rt = -1;
  for (std::size_t i = 0; i < header->size(); ++i) {
    const auto name = detail::to_lower(detail::trim((*header)[i]));
    if (name == "id") col_id = static_cast<int>(i);
    else if (name == "author") col_author = static_cast<int>(i);
    else if (name == "timestamp") col_ts = static_cast<int>(i);
    else if (name == "reply_to") col_rt = static_cast<int>(i);
  }
  if (col_id < 0 || col_author < 0 || col_ts < 0 || col_rt < 0)
    throw ParseError("csv: header must name id, author, timestamp, reply_to");

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto where = "line " + std::to_string(lineno);
    const auto fields = detail::split_csv_line(line);
    if (!fields || fields->size() != header->size()) {
      diag.drop(where + ": wrong field count");
      continue;
    }
    Message m;
    m.id = (*fields)[col_id];
    m.author = (*fields)[col_author];
    if (m.id.empty() || m.author.empty()) {
      diag.drop(where + ": empty id or author");
      continue;
    }
    if (!detail::parse_int(detail::trim((*fields)[col_ts]), m.timestamp)) {
      diag.drop(where + ": timestamp must be an integer");
      continue;
    }
    if (!(*fields)[col_rt].empty() && (*fields)[col_rt] != m.id) m.reply_to = (*fields)[col_rt];
    out.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

/// Sorts by (timestamp, id), keeps the first `limit` messages, assigns
/// ordinals and computes the summary counts. Duplicate ids keep their first
/// occurrence in send order; the others count as missing. Replies whose
/// target is not in the kept set start a thread.
inline Corpus build_corpus(std::vector<Message> messages, std::optional<std::size_t> limit = {},
                           std::size_t n_missing = 0) {
  std::sort(messages.begin(), messages.end(), [](const Message& a, const Message& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.id < b.id;
  });
  {
    std::unordered_set<std::string> seen;
    std::vector<Message> unique;
    unique.reserve(messages.size());
    for (auto& m : messages) {
      if (seen.insert(m.id).second) unique.push_back(std::move(m));
      else ++n_missing;
    }
    messages = std::move(unique);
  }
  if (limit && messages.size() > *limit) messages.resize(*limit);
  if (messages.empty()) throw EmptyCorpusError();

  Corpus c;
  c.n_missing = n_missing;
  std::unordered_set<std::string_view> ids;
  std::unordered_set<std::string_view> authors;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    messages[i].ordinal = i;
    ids.insert(messages[i].id);
  }
  for (const auto& m : messages) {
    authors.insert(m.author);
    if (!m.reply_to || !ids.contains(*m.reply_to)) ++c.n_threads;
  }
  c.n_participants = authors.size();
  c.date_first = messages.front().timestamp;
  c.date_last = messages.back().timestamp;
  c.messages = std::move(messages);
  return c;
}

/// Canonical JSONL: one object per message in ordinal order, keys in the
/// order id, author, timestamp, reply_to; LF line endings.
inline void emit_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& m : corpus.messages) {
    nlohmann::ordered_json j;
    j["id"] = m.id;
    j["author"] = m.author;
    j["timestamp"] = m.timestamp;
    j["reply_to"] = m.reply_to ? nlohmann::ordered_json(*m.reply_to) : nullptr;
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Loading by format
// ---------------------------------------------------------------------------

enum class InputFormat { mbox, jsonl, csv };

inline std::optional<InputFormat> parse_input_format(std::string_view name) {
  if (name == "mbox") return InputFormat::mbox;
  if (name == "jsonl") return InputFormat::jsonl;
  if (name == "csv") return InputFormat::csv;
  return std::nullopt;
}

/// Messages from any supported input format. Skipped records land in `diag`.
inline std::vector<Message> read_messages(std::istream& in, InputFormat format, Diagnostics& diag) {
  switch (format) {
    case InputFormat::mbox: return normalize(parse_mbox(in, diag), diag);
    case InputFormat::jsonl: return parse_jsonl(in, diag);
    case InputFormat::csv: return parse_csv(in, diag);
  }
  return {};
}

/// Reads a stream and builds the corpus, counting skipped records as missing.
inline Corpus load_corpus(std::istream& in, InputFormat format, std::optional<std::size_t> limit,
                          Diagnostics& diag) {
  auto messages = read_messages(in, format, diag);
  return build_corpus(std::move(messages), limit, diag.dropped);
}

}  // namespace erdos
