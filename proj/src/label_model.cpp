#include "segcor/label_model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

namespace segcor {

namespace {

// Splits on '\n', dropping a trailing '\r' per line. Keeps empty lines so
// callers can report 1-based line numbers faithfully.
std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    std::string line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

bool parse_seconds(const std::string& s, double* out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size()) return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

constexpr double kContiguityTolerance = 1e-9;

}  // namespace

const char* to_string(PhoneClass c) {
  switch (c) {
    case PhoneClass::Vowel: return "vowel";
    case PhoneClass::Consonant: return "consonant";
    case PhoneClass::Silence: return "silence";
  }
  return "?";
}

PhoneClass phone_class_from_string(const std::string& s) {
  if (s == "vowel") return PhoneClass::Vowel;
  if (s == "consonant") return PhoneClass::Consonant;
  if (s == "silence") return PhoneClass::Silence;
  throw UnknownClass(s);
}

PhoneSet::PhoneSet(std::map<std::string, PhoneEntry> entries) : entries_(std::move(entries)) {
  bool has_silence = false;
  for (const auto& [symbol, entry] : entries_) {
    if (symbol.empty()) throw MalformedLine(0, "empty phone symbol");
    if (entry.stressed_vowel && entry.cls != PhoneClass::Vowel)
      throw UnknownClass("stressed mark on non-vowel '" + symbol + "'");
    if (entry.cls == PhoneClass::Silence) has_silence = true;
  }
  if (!has_silence) throw NoSilenceSymbol();
}

PhoneSet PhoneSet::parse(const std::string& text) {
  std::map<std::string, PhoneEntry> entries;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    const auto fields = split_tabs(lines[i]);
    if (fields.size() < 2 || fields.size() > 3)
      throw MalformedLine(line_no, "expected symbol<TAB>class[<TAB>stressed]");
    const std::string& symbol = fields[0];
    if (symbol.empty()) throw MalformedLine(line_no, "empty phone symbol");
    PhoneEntry entry;
    entry.cls = phone_class_from_string(fields[1]);
    if (fields.size() == 3) {
      if (fields[2] != "stressed")
        throw MalformedLine(line_no, "third field must be 'stressed'");
      if (entry.cls != PhoneClass::Vowel)
        throw UnknownClass("stressed mark on non-vowel '" + symbol + "'");
      entry.stressed_vowel = true;
    }
    if (!entries.emplace(symbol, entry).second) throw DuplicateSymbol(symbol);
  }
  if (entries.empty()) throw EmptyFile();
  return PhoneSet(std::move(entries));
}

std::string PhoneSet::serialize() const {
  std::string out;
  for (const auto& [symbol, entry] : entries_) {
    out += symbol;
    out += '\t';
    out += to_string(entry.cls);
    if (entry.stressed_vowel) out += "\tstressed";
    out += '\n';
  }
  return out;
}

bool PhoneSet::contains(const std::string& symbol) const {
  return entries_.find(symbol) != entries_.end();
}

const PhoneEntry& PhoneSet::at(const std::string& symbol) const {
  auto it = entries_.find(symbol);
  if (it == entries_.end()) throw UnknownPhone(symbol, 0);
  return it->second;
}

std::vector<std::string> PhoneSet::symbols() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [symbol, entry] : entries_) out.push_back(symbol);
  return out;
}

Alignment::Alignment(std::string utterance_id, std::vector<Segment> segments)
    : utterance_id_(std::move(utterance_id)), segments_(std::move(segments)) {
  if (segments_.empty()) throw InvalidAlignment("alignment has no segments");
  if (segments_.front().start < 0.0)
    throw InvalidAlignment("alignment starts before time zero");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (!(std::isfinite(s.start) && std::isfinite(s.end)))
      throw InvalidAlignment("non-finite segment time");
    if (!(s.end > s.start))
      throw InvalidAlignment("segment " + std::to_string(i) + " has end <= start");
    if (i > 0 && s.start != segments_[i - 1].end)
      throw InvalidAlignment("segment " + std::to_string(i) +
                             " does not start where the previous one ends");
  }
}

Alignment parse_label_file(const std::string& text, const PhoneSet& phoneset,
                           std::string utterance_id) {
  std::vector<Segment> segments;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    const auto fields = split_tabs(lines[i]);
    if (fields.size() != 3)
      throw MalformedLine(line_no, "expected start<TAB>end<TAB>phone");
    Segment seg;
    if (!parse_seconds(fields[0], &seg.start) || !parse_seconds(fields[1], &seg.end))
      throw MalformedLine(line_no, "unparsable time field");
    if (seg.start < 0.0) throw MalformedLine(line_no, "negative start time");
    if (!(seg.end > seg.start)) throw MalformedLine(line_no, "end is not after start");
    seg.phone = fields[2];
    if (seg.phone.empty()) throw MalformedLine(line_no, "empty phone symbol");
    if (!phoneset.contains(seg.phone)) throw UnknownPhone(seg.phone, line_no);
    if (!segments.empty()) {
      const double prev_end = segments.back().end;
      if (std::abs(seg.start - prev_end) > kContiguityTolerance)
        throw NonContiguous(line_no);
      seg.start = prev_end;  // snap away formatting jitter
    }
    segments.push_back(std::move(seg));
  }
  if (segments.empty()) throw EmptyFile();
  return Alignment(std::move(utterance_id), std::move(segments));
}

std::string serialize_label_file(const Alignment& a) {
  std::string out;
  for (const Segment& s : a.segments()) {
    out += format_seconds(s.start);
    out += '\t';
    out += format_seconds(s.end);
    out += '\t';
    out += s.phone;
    out += '\n';
  }
  return out;
}

std::string format_seconds(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

double round_to_grid(double seconds) {
  return std::round(seconds * 1e6) / 1e6;
}

}  // namespace segcor
