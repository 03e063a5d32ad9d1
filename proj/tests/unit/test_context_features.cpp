#include <doctest.h>

#include "segcor/context_features.hpp"
#include "segcor/corpus_sim.hpp"
#include "test_util.hpp"

using namespace segcor;
using segcor::test::tiny_phoneset;

namespace {

// sil | in = [i1 n] | sil | punto = [p u1 n][t o] | sil
UtteranceStructure in_punto(const PhoneSet& ps) {
  std::vector<Word> words;
  words.push_back({"sil", {{false, {"sil"}}}});
  words.push_back({"in", {{true, {"i1", "n"}}}});
  words.push_back({"sil", {{false, {"sil"}}}});
  words.push_back({"punto", {{true, {"p", "u1", "n"}}, {false, {"t", "o"}}}});
  words.push_back({"sil", {{false, {"sil"}}}});
  return UtteranceStructure("fig1", std::move(words), ps);
}

std::string feature(const Senone& s, const FeatureSchema& schema, const std::string& name) {
  return to_string(s.values[schema.index_of(name)]);
}

}  // namespace

TEST_CASE("single word structure") {
  const PhoneSet ps = tiny_phoneset();
  const UtteranceStructure u =
      UtteranceStructure("no", {{"no", {{true, {"n", "o1"}}}}}, ps);
  CHECK(u.words().size() == 1);
  CHECK(u.words()[0].syllables.size() == 1);
  CHECK(u.phone_count() == 2);
  CHECK(u.phone(0) == "n");
  CHECK(u.phone(1) == "o1");
}

TEST_CASE("structure constructor validations") {
  const PhoneSet ps = tiny_phoneset();
  CHECK_THROWS_AS(UtteranceStructure("u", {{"w", {{false, {}}}}}, ps), EmptySyllable);
  CHECK_THROWS_AS(UtteranceStructure("u", {{"w", {{false, {"zz"}}}}}, ps), PhoneNotInPhoneSet);
}

TEST_CASE("structure/alignment mismatch is detected") {
  const PhoneSet ps = tiny_phoneset();
  const UtteranceStructure u = UtteranceStructure("u", {{"no", {{true, {"n", "o1"}}}}}, ps);
  const Alignment good("u", {{"n", 0.0, 0.1}, {"o1", 0.1, 0.3}});
  CHECK_NOTHROW(u.check_matches(good));
  const Alignment wrong_phone("u", {{"n", 0.0, 0.1}, {"a", 0.1, 0.3}});
  CHECK_THROWS_AS(u.check_matches(wrong_phone), StructureAlignmentMismatch);
  const Alignment wrong_count("u", {{"n", 0.0, 0.1}});
  CHECK_THROWS_AS(u.check_matches(wrong_count), StructureAlignmentMismatch);
}

TEST_CASE("structure JSON round trip") {
  const PhoneSet ps = tiny_phoneset();
  const UtteranceStructure u = in_punto(ps);
  const UtteranceStructure v = parse_utterance_structure(u.serialize(), ps);
  CHECK(v.utterance_id() == "fig1");
  REQUIRE(v.phone_count() == u.phone_count());
  for (std::size_t i = 0; i < u.phone_count(); ++i) CHECK(v.phone(i) == u.phone(i));
  CHECK(v.serialize() == u.serialize());
}

TEST_CASE("structure JSON parse errors") {
  const PhoneSet ps = tiny_phoneset();
  CHECK_THROWS_AS(parse_utterance_structure("not json", ps), StructureParseError);
  CHECK_THROWS_AS(parse_utterance_structure("{}", ps), StructureParseError);
  CHECK_THROWS_AS(parse_utterance_structure(R"({"words":[{"text":"w"}]})", ps),
                  StructureParseError);
}

TEST_CASE("stressed vowel of 'punto' is described correctly") {
  const PhoneSet ps = tiny_phoneset();
  const UtteranceStructure u = in_punto(ps);
  const FeatureSchema schema = FeatureSchema::default_for(ps);
  // flat: sil i1 n sil p u1 n t o sil -> u1 at index 5
  REQUIRE(u.phone(5) == "u1");
  const Senone s = extract_senone(u, ps, 5, schema);
  CHECK(feature(s, schema, "syllable_stressed") == "true");
  CHECK(feature(s, schema, "pos_in_syllable") == "nucleus");
  CHECK(feature(s, schema, "cur_is_stressed_vowel") == "true");
  CHECK(feature(s, schema, "cur_phone_class") == "vowel");
  CHECK(feature(s, schema, "prev_phone_symbol") == "p");
  CHECK(feature(s, schema, "next_phone_symbol") == "n");
  CHECK(feature(s, schema, "pos_of_syllable_in_word") == "initial");
  CHECK(feature(s, schema, "word_syllable_count") == "2");
  CHECK(feature(s, schema, "word_index_in_utterance") == "2");
  CHECK(feature(s, schema, "words_in_utterance") == "2");
  CHECK(feature(s, schema, "is_word_final_phone") == "false");
  CHECK(feature(s, schema, "phones_since_last_silence") == "1");
  CHECK(feature(s, schema, "phones_to_next_silence") == "3");
}

TEST_CASE("out-of-range context maps to none") {
  const PhoneSet ps = tiny_phoneset();
  const UtteranceStructure u = in_punto(ps);
  const FeatureSchema schema = FeatureSchema::default_for(ps);
  const Senone first = extract_senone(u, ps, 0, schema);
  CHECK(feature(first, schema, "prev_phone_class") == "none");
  CHECK(feature(first, schema, "prev2_phone_class") == "none");
  CHECK(feature(first, schema, "prev_phone_symbol") == "none");
  const Senone last = extract_senone(u, ps, u.phone_count() - 1, schema);
  CHECK(feature(last, schema, "next_phone_class") == "none");
  CHECK(feature(last, schema, "next2_phone_class") == "none");
}

TEST_CASE("silence phones get the degenerate categories") {
  const PhoneSet ps = tiny_phoneset();
  const UtteranceStructure u = in_punto(ps);
  const FeatureSchema schema = FeatureSchema::default_for(ps);
  const Senone s = extract_senone(u, ps, 0, schema);
  CHECK(feature(s, schema, "cur_phone_class") == "silence");
  CHECK(feature(s, schema, "pos_in_syllable") == "silence");
  CHECK(feature(s, schema, "pos_of_syllable_in_word") == "silence");
  CHECK(feature(s, schema, "syllable_stressed") == "false");
  CHECK(feature(s, schema, "syllable_len_phones") == "0");
  CHECK(feature(s, schema, "word_index_in_utterance") == "0");
}

TEST_CASE("extraction rejects a bad index") {
  const PhoneSet ps = tiny_phoneset();
  const UtteranceStructure u = in_punto(ps);
  const FeatureSchema schema = FeatureSchema::default_for(ps);
  CHECK_THROWS_AS(extract_senone(u, ps, u.phone_count(), schema), IndexOutOfRange);
}

TEST_CASE("default schema has the documented 21 features and a stable hash") {
  const PhoneSet ps = tiny_phoneset();
  const FeatureSchema schema = FeatureSchema::default_for(ps);
  CHECK(schema.size() == 21);
  CHECK(schema.at(0).name == "cur_phone_class");
  CHECK(FeatureSchema::default_for(ps).hash() == schema.hash());
  // the hash follows the inventory
  const FeatureSchema other = FeatureSchema::default_for(default_sim_phoneset());
  CHECK(other.hash() != schema.hash());
}

TEST_CASE("schema file round trip") {
  const PhoneSet ps = tiny_phoneset();
  const FeatureSchema schema = FeatureSchema::default_for(ps);
  const FeatureSchema again = FeatureSchema::parse(schema.serialize());
  CHECK(again.size() == schema.size());
  CHECK(again.hash() == schema.hash());
  CHECK(again.serialize() == schema.serialize());
}

TEST_CASE("schema validation errors") {
  CHECK_THROWS_AS(FeatureSchema::parse(""), SchemaError);
  CHECK_THROWS_AS(FeatureSchema::parse("nonsense_feature\tcategorical\ta,b\n"), SchemaError);
  CHECK_THROWS_AS(FeatureSchema::parse("cur_phone_class\tweird\ta,b\n"), SchemaError);
  CHECK_THROWS_AS(FeatureSchema::parse("cur_phone_class\tnumeric\t5..1\n"), SchemaError);
  CHECK_THROWS_AS(
      FeatureSchema::parse("cur_phone_class\tcategorical\tvowel\ncur_phone_class\tcategorical\tvowel\n"),
      SchemaError);
}

TEST_CASE("context depth is configuration: prev3/next3 work") {
  const PhoneSet ps = tiny_phoneset();
  const FeatureSchema schema = FeatureSchema::parse(
      "prev3_phone_class\tcategorical\tvowel,consonant,silence,none\n"
      "next3_phone_symbol\tcategorical\tsil,a,o,i1,o1,u1,n,p,t,d,none\n");
  const UtteranceStructure u = in_punto(ps);
  const Senone s = extract_senone(u, ps, 4, schema);  // 'p': prev3 = i1, next3 = t
  CHECK(to_string(s.values[0]) == "vowel");
  CHECK(to_string(s.values[1]) == "t");
}

TEST_CASE("senones are deterministic and complete on simulated corpora") {
  const PhoneSet ps = default_sim_phoneset();
  const FeatureSchema schema = FeatureSchema::default_for(ps);
  SimConfig cfg;
  cfg.seed = 99;
  cfg.utterance_count = 20;
  const auto corpus = generate_corpus(cfg, ps, schema);
  for (const SimUtterance& su : corpus) {
    long total_stressed = 0;
    for (std::size_t g = 0; g < su.structure.global_syllable_count(); ++g)
      if (su.structure.global_syllable_stressed(g)) ++total_stressed;
    for (std::size_t i = 0; i < su.structure.phone_count(); ++i) {
      const Senone a = extract_senone(su.structure, ps, i, schema);
      const Senone b = extract_senone(su.structure, ps, i, schema);
      CHECK(a == b);
      REQUIRE(a.values.size() == schema.size());
      if (su.structure.phone_class(i) != PhoneClass::Silence) {
        const long before = std::stol(feature(a, schema, "stressed_syllables_before"));
        const long after = std::stol(feature(a, schema, "stressed_syllables_after"));
        const long cur = feature(a, schema, "syllable_stressed") == "true" ? 1 : 0;
        CHECK(before + after + cur == total_stressed);
      }
    }
  }
}
