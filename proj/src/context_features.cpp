#include "segcor/context_features.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <json.hpp>

namespace segcor {

namespace {

using nlohmann::json;

constexpr std::int64_t kNumericLo = 0;
constexpr std::int64_t kNumericHi = 1000000;

// Context features come in prev/next families with an optional depth digit:
// prev_phone_class == prev1_phone_class, prev2_phone_symbol, next3_phone_class...
struct ContextFeature {
  bool prev = false;
  int depth = 1;
  bool symbol = false;  // otherwise class
};

bool parse_context_feature(const std::string& name, ContextFeature* out) {
  std::string rest;
  if (name.rfind("prev", 0) == 0) {
    out->prev = true;
    rest = name.substr(4);
  } else if (name.rfind("next", 0) == 0) {
    out->prev = false;
    rest = name.substr(4);
  } else {
    return false;
  }
  std::size_t i = 0;
  while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
  out->depth = 1;
  if (i > 0) {
    auto [p, ec] = std::from_chars(rest.data(), rest.data() + i, out->depth);
    if (ec != std::errc() || out->depth < 1) return false;
  }
  rest = rest.substr(i);
  if (rest == "_phone_class") {
    out->symbol = false;
    return true;
  }
  if (rest == "_phone_symbol") {
    out->symbol = true;
    return true;
  }
  return false;
}

const char* const kFixedFeatures[] = {
    "cur_phone_class",       "cur_is_stressed_vowel",  "syllable_stressed",
    "pos_in_syllable",       "syllable_len_phones",    "pos_of_syllable_in_word",
    "word_syllable_count",   "word_index_in_utterance", "words_in_utterance",
    "stressed_syllables_before", "stressed_syllables_after",
    "phones_since_last_silence", "phones_to_next_silence",
    "syllable_index_in_utterance", "is_word_final_phone",
};

bool is_known_feature(const std::string& name) {
  for (const char* f : kFixedFeatures)
    if (name == f) return true;
  ContextFeature cf;
  return parse_context_feature(name, &cf);
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

// ---------------------------------------------------------------------------
// UtteranceStructure
// ---------------------------------------------------------------------------

UtteranceStructure::UtteranceStructure(std::string utterance_id, std::vector<Word> words,
                                       const PhoneSet& phoneset)
    : utterance_id_(std::move(utterance_id)), words_(std::move(words)) {
  std::size_t global_syll = 0;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    const Word& word = words_[w];
    bool all_silence = !word.syllables.empty();
    for (std::size_t s = 0; s < word.syllables.size(); ++s) {
      const Syllable& syll = word.syllables[s];
      if (syll.phones.empty()) throw EmptySyllable();
      for (std::size_t p = 0; p < syll.phones.size(); ++p) {
        const std::string& sym = syll.phones[p];
        if (!phoneset.contains(sym)) throw PhoneNotInPhoneSet(sym);
        const PhoneClass cls = phoneset.cls(sym);
        if (cls != PhoneClass::Silence) all_silence = false;
        flat_phones_.push_back(sym);
        flat_classes_.push_back(cls);
        flat_.push_back(PhonePos{w, s, p, global_syll});
      }
      syllable_stressed_.push_back(syll.stressed);
      ++global_syll;
    }
    if (word.syllables.empty())
      throw StructureParseError("word '" + word.text + "' has no syllables");
    silence_word_.push_back(all_silence);
  }
}

UtteranceStructure UtteranceStructure::parse(const std::string& json_text,
                                             const PhoneSet& phoneset) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw StructureParseError(e.what());
  }
  if (!doc.is_object() || !doc.contains("words") || !doc["words"].is_array())
    throw StructureParseError("expected an object with a 'words' array");
  std::string id = doc.value("utterance_id", "");
  std::vector<Word> words;
  for (const auto& jw : doc["words"]) {
    if (!jw.is_object() || !jw.contains("syllables"))
      throw StructureParseError("word entry lacks 'syllables'");
    Word word;
    word.text = jw.value("text", "");
    for (const auto& js : jw["syllables"]) {
      Syllable syll;
      syll.stressed = js.value("stressed", false);
      if (!js.contains("phones") || !js["phones"].is_array())
        throw StructureParseError("syllable entry lacks 'phones'");
      for (const auto& jp : js["phones"]) {
        if (!jp.is_string()) throw StructureParseError("phone entry is not a string");
        syll.phones.push_back(jp.get<std::string>());
      }
      word.syllables.push_back(std::move(syll));
    }
    words.push_back(std::move(word));
  }
  return UtteranceStructure(std::move(id), std::move(words), phoneset);
}

std::string UtteranceStructure::serialize() const {
  json doc;
  doc["utterance_id"] = utterance_id_;
  json jwords = json::array();
  for (const Word& word : words_) {
    json jw;
    jw["text"] = word.text;
    json jsylls = json::array();
    for (const Syllable& syll : word.syllables) {
      json js;
      js["stressed"] = syll.stressed;
      js["phones"] = syll.phones;
      jsylls.push_back(std::move(js));
    }
    jw["syllables"] = std::move(jsylls);
    jwords.push_back(std::move(jw));
  }
  doc["words"] = std::move(jwords);
  return doc.dump(2) + "\n";
}

const std::string& UtteranceStructure::phone(std::size_t index) const {
  if (index >= flat_phones_.size()) throw IndexOutOfRange(index, flat_phones_.size());
  return flat_phones_[index];
}

PhoneClass UtteranceStructure::phone_class(std::size_t index) const {
  if (index >= flat_classes_.size()) throw IndexOutOfRange(index, flat_classes_.size());
  return flat_classes_[index];
}

const UtteranceStructure::PhonePos& UtteranceStructure::position(std::size_t index) const {
  if (index >= flat_.size()) throw IndexOutOfRange(index, flat_.size());
  return flat_[index];
}

void UtteranceStructure::check_matches(const Alignment& a) const {
  if (a.size() != flat_phones_.size())
    throw StructureAlignmentMismatch(
        "structure has " + std::to_string(flat_phones_.size()) + " phones, alignment has " +
        std::to_string(a.size()));
  for (std::size_t i = 0; i < flat_phones_.size(); ++i)
    if (a[i].phone != flat_phones_[i])
      throw StructureAlignmentMismatch("phone " + std::to_string(i) + " differs: structure '" +
                                       flat_phones_[i] + "' vs alignment '" + a[i].phone + "'");
}

// ---------------------------------------------------------------------------
// FeatureSchema
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

FeatureSchema::FeatureSchema(std::vector<FeatureDef> features) : features_(std::move(features)) {
  if (features_.empty()) throw SchemaError("schema has no features");
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const FeatureDef& f = features_[i];
    if (!is_known_feature(f.name)) throw SchemaError("unknown feature '" + f.name + "'");
    for (std::size_t j = 0; j < i; ++j)
      if (features_[j].name == f.name) throw SchemaError("duplicate feature '" + f.name + "'");
    if (f.kind == FeatureKind::Categorical && f.domain.empty())
      throw SchemaError("categorical feature '" + f.name + "' has an empty domain");
    if (f.kind == FeatureKind::Numeric && f.lo > f.hi)
      throw SchemaError("numeric feature '" + f.name + "' has an empty range");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize())));
  hash_ = buf;
}

FeatureSchema FeatureSchema::parse(const std::string& text) {
  std::vector<FeatureDef> features;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line =
        nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw SchemaError("line " + std::to_string(line_no) +
                        ": expected name<TAB>kind<TAB>domain");
    FeatureDef def;
    def.name = line.substr(0, t1);
    const std::string kind = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string domain = line.substr(t2 + 1);
    if (kind == "categorical") {
      def.kind = FeatureKind::Categorical;
      std::size_t p = 0;
      while (p <= domain.size()) {
        std::size_t c = domain.find(',', p);
        std::string v = c == std::string::npos ? domain.substr(p) : domain.substr(p, c - p);
        if (v.empty())
          throw SchemaError("line " + std::to_string(line_no) + ": empty domain value");
        def.domain.push_back(std::move(v));
        if (c == std::string::npos) break;
        p = c + 1;
      }
    } else if (kind == "numeric") {
      def.kind = FeatureKind::Numeric;
      std::size_t dots = domain.find("..");
      if (dots == std::string::npos)
        throw SchemaError("line " + std::to_string(line_no) + ": numeric domain must be lo..hi");
      try {
        def.lo = std::stoll(domain.substr(0, dots));
        def.hi = std::stoll(domain.substr(dots + 2));
      } catch (const std::exception&) {
        throw SchemaError("line " + std::to_string(line_no) + ": unparsable numeric range");
      }
    } else {
      throw SchemaError("line " + std::to_string(line_no) + ": kind must be categorical|numeric");
    }
    features.push_back(std::move(def));
  }
  return FeatureSchema(std::move(features));
}

std::string FeatureSchema::serialize() const {
  std::string out;
  for (const FeatureDef& f : features_) {
    out += f.name;
    out += '\t';
    if (f.kind == FeatureKind::Categorical) {
      out += "categorical\t";
      for (std::size_t i = 0; i < f.domain.size(); ++i) {
        if (i) out += ',';
        out += f.domain[i];
      }
    } else {
      out += "numeric\t";
      out += std::to_string(f.lo);
      out += "..";
      out += std::to_string(f.hi);
    }
    out += '\n';
  }
  return out;
}

FeatureSchema FeatureSchema::default_for(const PhoneSet& phoneset) {
  const std::vector<std::string> classes = {"vowel", "consonant", "silence"};
  std::vector<std::string> classes_none = classes;
  classes_none.push_back("none");
  std::vector<std::string> symbols_none = phoneset.symbols();
  symbols_none.push_back("none");
  const std::vector<std::string> booleans = {"false", "true"};

  auto cat = [](std::string name, std::vector<std::string> domain) {
    FeatureDef d;
    d.name = std::move(name);
    d.kind = FeatureKind::Categorical;
    d.domain = std::move(domain);
    return d;
  };
  auto num = [](std::string name) {
    FeatureDef d;
    d.name = std::move(name);
    d.kind = FeatureKind::Numeric;
    d.lo = kNumericLo;
    d.hi = kNumericHi;
    return d;
  };

  std::vector<FeatureDef> f;
  f.push_back(cat("cur_phone_class", classes));
  f.push_back(cat("cur_is_stressed_vowel", booleans));
  f.push_back(cat("prev_phone_class", classes_none));
  f.push_back(cat("prev2_phone_class", classes_none));
  f.push_back(cat("next_phone_class", classes_none));
  f.push_back(cat("next2_phone_class", classes_none));
  f.push_back(cat("prev_phone_symbol", symbols_none));
  f.push_back(cat("next_phone_symbol", symbols_none));
  f.push_back(cat("syllable_stressed", booleans));
  f.push_back(cat("pos_in_syllable", {"onset", "nucleus", "coda", "silence"}));
  f.push_back(num("syllable_len_phones"));
  f.push_back(cat("pos_of_syllable_in_word", {"initial", "medial", "final", "single", "silence"}));
  f.push_back(num("word_syllable_count"));
  f.push_back(num("word_index_in_utterance"));
  f.push_back(num("words_in_utterance"));
  f.push_back(num("stressed_syllables_before"));
  f.push_back(num("stressed_syllables_after"));
  f.push_back(num("phones_since_last_silence"));
  f.push_back(num("phones_to_next_silence"));
  f.push_back(num("syllable_index_in_utterance"));
  f.push_back(cat("is_word_final_phone", booleans));
  return FeatureSchema(std::move(f));
}

std::size_t FeatureSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].name == name) return i;
  throw SchemaError("schema has no feature '" + name + "'");
}

std::string to_string(const FeatureValue& v) {
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  return std::to_string(std::get<std::int64_t>(v));
}

// ---------------------------------------------------------------------------
// Senone extraction
// ---------------------------------------------------------------------------

namespace {

struct ExtractionContext {
  const UtteranceStructure& u;
  const PhoneSet& phoneset;
  std::size_t i;  // flat phone index

  bool is_silence() const { return u.phone_class(i) == PhoneClass::Silence; }
  const Word& word() const { return u.words()[u.position(i).word]; }
  const Syllable& syllable() const {
    const auto& pos = u.position(i);
    return u.words()[pos.word].syllables[pos.syllable];
  }
};

std::string class_or_none(const UtteranceStructure& u, std::ptrdiff_t j) {
  if (j < 0 || j >= static_cast<std::ptrdiff_t>(u.phone_count())) return "none";
  return to_string(u.phone_class(static_cast<std::size_t>(j)));
}

std::string symbol_or_none(const UtteranceStructure& u, std::ptrdiff_t j) {
  if (j < 0 || j >= static_cast<std::ptrdiff_t>(u.phone_count())) return "none";
  return u.phone(static_cast<std::size_t>(j));
}

std::string pos_in_syllable(const ExtractionContext& c) {
  if (c.is_silence()) return "silence";
  const Syllable& syll = c.syllable();
  const std::size_t p = c.u.position(c.i).phone;
  std::size_t nucleus = syll.phones.size();  // first vowel, if any
  for (std::size_t k = 0; k < syll.phones.size(); ++k) {
    if (c.phoneset.cls(syll.phones[k]) == PhoneClass::Vowel) {
      nucleus = k;
      break;
    }
  }
  if (p == nucleus) return "nucleus";
  if (p < nucleus) return "onset";
  return "coda";
}

std::string pos_of_syllable_in_word(const ExtractionContext& c) {
  if (c.is_silence()) return "silence";
  const Word& word = c.word();
  const std::size_t s = c.u.position(c.i).syllable;
  if (word.syllables.size() == 1) return "single";
  if (s == 0) return "initial";
  if (s + 1 == word.syllables.size()) return "final";
  return "medial";
}

std::int64_t count_real_words_before(const UtteranceStructure& u, std::size_t word_index) {
  std::int64_t n = 0;
  for (std::size_t w = 0; w < word_index; ++w)
    if (!u.is_silence_word(w)) ++n;
  return n;
}

FeatureValue extract_one(const ExtractionContext& c, const FeatureDef& def) {
  const UtteranceStructure& u = c.u;
  const std::size_t i = c.i;
  const std::string& name = def.name;

  ContextFeature cf;
  if (parse_context_feature(name, &cf)) {
    const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) +
                             (cf.prev ? -cf.depth : cf.depth);
    return cf.symbol ? symbol_or_none(u, j) : class_or_none(u, j);
  }
  if (name == "cur_phone_class") return std::string(to_string(u.phone_class(i)));
  if (name == "cur_is_stressed_vowel")
    return bool_str(c.phoneset.at(u.phone(i)).stressed_vowel);
  if (name == "syllable_stressed")
    return bool_str(!c.is_silence() && c.syllable().stressed);
  if (name == "pos_in_syllable") return pos_in_syllable(c);
  if (name == "syllable_len_phones")
    return c.is_silence() ? std::int64_t{0}
                          : static_cast<std::int64_t>(c.syllable().phones.size());
  if (name == "pos_of_syllable_in_word") return pos_of_syllable_in_word(c);
  if (name == "word_syllable_count")
    return c.is_silence() ? std::int64_t{0}
                          : static_cast<std::int64_t>(c.word().syllables.size());
  if (name == "word_index_in_utterance")
    return c.is_silence() ? std::int64_t{0}
                          : count_real_words_before(u, u.position(i).word) + 1;
  if (name == "words_in_utterance")
    return count_real_words_before(u, u.words().size());
  if (name == "stressed_syllables_before") {
    std::int64_t n = 0;
    for (std::size_t g = 0; g < u.position(i).global_syllable; ++g)
      if (u.global_syllable_stressed(g)) ++n;
    return n;
  }
  if (name == "stressed_syllables_after") {
    std::int64_t n = 0;
    for (std::size_t g = u.position(i).global_syllable + 1; g < u.global_syllable_count(); ++g)
      if (u.global_syllable_stressed(g)) ++n;
    return n;
  }
  if (name == "phones_since_last_silence") {
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) - 1;
    while (j >= 0 && u.phone_class(static_cast<std::size_t>(j)) != PhoneClass::Silence) --j;
    return static_cast<std::int64_t>(static_cast<std::ptrdiff_t>(i) - j - 1);
  }
  if (name == "phones_to_next_silence") {
    std::size_t k = i + 1;
    while (k < u.phone_count() && u.phone_class(k) != PhoneClass::Silence) ++k;
    return static_cast<std::int64_t>(k - i - 1);
  }
  if (name == "syllable_index_in_utterance") {
    if (c.is_silence()) return std::int64_t{0};
    // ordinal among real-word syllables only
    std::int64_t n = 0;
    const auto& pos = u.position(i);
    for (std::size_t w = 0; w < pos.word; ++w)
      if (!u.is_silence_word(w)) n += static_cast<std::int64_t>(u.words()[w].syllables.size());
    return n + static_cast<std::int64_t>(pos.syllable) + 1;
  }
  if (name == "is_word_final_phone") {
    if (c.is_silence()) return bool_str(false);
    const auto& pos = u.position(i);
    const Word& word = c.word();
    const bool last = pos.syllable + 1 == word.syllables.size() &&
                      pos.phone + 1 == word.syllables[pos.syllable].phones.size();
    return bool_str(last);
  }
  throw SchemaError("unknown feature '" + name + "'");
}

}  // namespace

Senone extract_senone(const UtteranceStructure& u, const PhoneSet& phoneset,
                      std::size_t phone_index, const FeatureSchema& schema) {
  if (phone_index >= u.phone_count()) throw IndexOutOfRange(phone_index, u.phone_count());
  ExtractionContext ctx{u, phoneset, phone_index};
  Senone senone;
  senone.schema_hash = schema.hash();
  senone.values.reserve(schema.size());
  for (const FeatureDef& def : schema.features()) {
    FeatureValue v = extract_one(ctx, def);
    if (def.kind == FeatureKind::Categorical) {
      const std::string& s = std::get<std::string>(v);
      if (std::find(def.domain.begin(), def.domain.end(), s) == def.domain.end())
        throw SchemaError("feature '" + def.name + "' produced value '" + s +
                          "' outside its declared domain");
    } else {
      std::int64_t n = std::get<std::int64_t>(v);
      v = std::clamp(n, def.lo, def.hi);
    }
    senone.values.push_back(std::move(v));
  }
  return senone;
}

UtteranceStructure parse_utterance_structure(const std::string& json_text,
                                             const PhoneSet& phoneset) {
  return UtteranceStructure::parse(json_text, phoneset);
}

}  // namespace segcor
