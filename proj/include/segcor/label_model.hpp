#pragma once

#include <map>
#include <string>
#include <vector>

#include "segcor/errors.hpp"

namespace segcor {

enum class PhoneClass { Vowel, Consonant, Silence };

const char* to_string(PhoneClass c);
PhoneClass phone_class_from_string(const std::string& s);  // throws UnknownClass

struct PhoneEntry {
  PhoneClass cls = PhoneClass::Consonant;
  bool stressed_vowel = false;
};

/// Phone inventory. Each symbol carries a V/C/- class and, for vowels,
/// an optional stressed mark (e.g. Italian SAMPA `i1` for stressed /i/).
class PhoneSet {
public:
  explicit PhoneSet(std::map<std::string, PhoneEntry> entries);

  /// Parses the phone-set file format: `symbol<TAB>class[<TAB>stressed]`,
  /// one record per line, class one of vowel/consonant/silence.
  static PhoneSet parse(const std::string& text);
  std::string serialize() const;

  bool contains(const std::string& symbol) const;
  const PhoneEntry& at(const std::string& symbol) const;
  PhoneClass cls(const std::string& symbol) const { return at(symbol).cls; }
  bool is_silence(const std::string& symbol) const { return cls(symbol) == PhoneClass::Silence; }

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, PhoneEntry>& entries() const { return entries_; }
  /// All symbols in lexicographic order.
  std::vector<std::string> symbols() const;

private:
  std::map<std::string, PhoneEntry> entries_;
};

/// One timed phone. Times are in seconds; end is exclusive and > start.
struct Segment {
  std::string phone;
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
  bool operator==(const Segment&) const = default;
};

/// Ordered, contiguous tiling of timed segments for one utterance.
/// Adjacent segments share their boundary exactly; the first segment may
/// start at any non-negative offset.
class Alignment {
public:
  Alignment(std::string utterance_id, std::vector<Segment> segments);

  const std::string& utterance_id() const { return utterance_id_; }
  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  const Segment& operator[](std::size_t i) const { return segments_[i]; }

  double start() const { return segments_.front().start; }
  double end() const { return segments_.back().end; }

  bool operator==(const Alignment&) const = default;

private:
  std::string utterance_id_;
  std::vector<Segment> segments_;
};

/// Parses a label file: one `start<TAB>end<TAB>phone` record per line,
/// times in seconds. Segments must tile contiguously and every phone must
/// be in the phone set.
Alignment parse_label_file(const std::string& text, const PhoneSet& phoneset,
                           std::string utterance_id = "");

/// Inverse of parse_label_file. Times are printed with fixed 6 decimals
/// (1 us resolution), so any alignment on the microsecond grid round-trips.
std::string serialize_label_file(const Alignment& a);

/// Formats seconds with fixed 6 decimals, the precision used by every
/// file format in the toolkit.
std::string format_seconds(double value);

/// Rounds seconds to the 1 us grid used by the label file format.
double round_to_grid(double seconds);

}  // namespace segcor
