#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "segcor/label_model.hpp"

namespace segcor {

struct Syllable {
  bool stressed = false;
  std::vector<std::string> phones;
};

struct Word {
  std::string text;
  std::vector<Syllable> syllables;
};

/// Word -> syllable -> phone relation structure for one utterance.
/// Silence phones appear as standalone single-syllable pseudo-words, so the
/// flattened phone sequence matches the alignment's phone sequence exactly.
class UtteranceStructure {
public:
  UtteranceStructure(std::string utterance_id, std::vector<Word> words,
                     const PhoneSet& phoneset);

  /// Parses the JSON structure document:
  /// {"utterance_id": ..., "words": [{"text": ..., "syllables":
  ///   [{"stressed": bool, "phones": [...]}, ...]}, ...]}
  static UtteranceStructure parse(const std::string& json_text, const PhoneSet& phoneset);
  std::string serialize() const;

  const std::string& utterance_id() const { return utterance_id_; }
  const std::vector<Word>& words() const { return words_; }

  std::size_t phone_count() const { return flat_.size(); }
  const std::string& phone(std::size_t index) const;
  PhoneClass phone_class(std::size_t index) const;

  /// Throws StructureAlignmentMismatch unless the flattened phone sequence
  /// equals the alignment's phone sequence.
  void check_matches(const Alignment& a) const;

  // Flat-index bookkeeping used by feature extraction.
  struct PhonePos {
    std::size_t word;            // index into words()
    std::size_t syllable;        // index within the word
    std::size_t phone;           // index within the syllable
    std::size_t global_syllable; // ordinal over all syllables in the utterance
  };
  const PhonePos& position(std::size_t index) const;
  bool is_silence_word(std::size_t word_index) const { return silence_word_[word_index]; }
  std::size_t global_syllable_count() const { return syllable_stressed_.size(); }
  bool global_syllable_stressed(std::size_t ordinal) const { return syllable_stressed_[ordinal]; }

private:
  std::string utterance_id_;
  std::vector<Word> words_;
  std::vector<std::string> flat_phones_;
  std::vector<PhoneClass> flat_classes_;
  std::vector<PhonePos> flat_;
  std::vector<bool> silence_word_;
  std::vector<bool> syllable_stressed_;
};

enum class FeatureKind { Categorical, Numeric };

struct FeatureDef {
  std::string name;
  FeatureKind kind = FeatureKind::Categorical;
  std::vector<std::string> domain;  // categorical values
  std::int64_t lo = 0, hi = 0;      // numeric range
};

/// Ordered, versioned list of the context features a senone carries.
/// The feature repertoire is fixed by the extractor but the active subset,
/// order, and context depth (prevN_/nextN_) are configuration, so schemas of
/// any width can be declared without code changes.
class FeatureSchema {
public:
  explicit FeatureSchema(std::vector<FeatureDef> features);

  /// Parses the schema file format: `name<TAB>kind<TAB>domain-spec` lines,
  /// kind categorical|numeric, domain a comma-separated value list or an
  /// integer range `lo..hi`.
  static FeatureSchema parse(const std::string& text);
  std::string serialize() const;

  /// Default 21-feature schema over the given phone inventory.
  static FeatureSchema default_for(const PhoneSet& phoneset);

  std::size_t size() const { return features_.size(); }
  const FeatureDef& at(std::size_t i) const { return features_[i]; }
  const std::vector<FeatureDef>& features() const { return features_; }
  std::size_t index_of(const std::string& name) const;  // throws SchemaError

  /// FNV-1a hash of the serialized schema; embedded in tree files.
  const std::string& hash() const { return hash_; }

private:
  std::vector<FeatureDef> features_;
  std::string hash_;
};

using FeatureValue = std::variant<std::string, std::int64_t>;

std::string to_string(const FeatureValue& v);

/// Context-dependent feature vector for one phone. Values are ordered
/// exactly as the schema declares; schema_hash ties the two together.
struct Senone {
  std::string schema_hash;
  std::vector<FeatureValue> values;

  bool operator==(const Senone&) const = default;
};

UtteranceStructure parse_utterance_structure(const std::string& json_text,
                                             const PhoneSet& phoneset);

/// Extracts the feature vector for the phone at `phone_index`. Out-of-range
/// context yields the `none` category (numeric 0); silence phones get the
/// degenerate `silence` categories for syllable- and word-scoped features.
Senone extract_senone(const UtteranceStructure& u, const PhoneSet& phoneset,
                      std::size_t phone_index, const FeatureSchema& schema);

std::uint64_t fnv1a64(const std::string& s);

}  // namespace segcor
