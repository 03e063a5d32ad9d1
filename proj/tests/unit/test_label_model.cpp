#include <doctest.h>

#include "segcor/label_model.hpp"
#include "test_util.hpp"

using namespace segcor;
using segcor::test::tiny_phoneset;

TEST_CASE("parse_label_file reads contiguous records") {
  const PhoneSet ps = tiny_phoneset();
  const Alignment a = parse_label_file("0.0\t0.1\tsil\n0.1\t0.25\ta\n", ps, "x");
  REQUIRE(a.size() == 2);
  CHECK(a[0].phone == "sil");
  CHECK(a[1].phone == "a");
  CHECK(a[1].end == doctest::Approx(0.25));
  CHECK(a.utterance_id() == "x");
}

TEST_CASE("parse_label_file rejects gaps with the offending line") {
  const PhoneSet ps = tiny_phoneset();
  CHECK_THROWS_AS(parse_label_file("0.0\t0.1\tsil\n0.2\t0.3\ta\n", ps), NonContiguous);
  try {
    parse_label_file("0.0\t0.1\tsil\n0.2\t0.3\ta\n", ps);
  } catch (const NonContiguous& e) {
    CHECK(e.line_no == 2);
  }
  // overlaps are just as non-contiguous as gaps
  CHECK_THROWS_AS(parse_label_file("0.0\t0.2\tsil\n0.1\t0.3\ta\n", ps), NonContiguous);
}

TEST_CASE("parse_label_file error cases") {
  const PhoneSet ps = tiny_phoneset();
  CHECK_THROWS_AS(parse_label_file("", ps), EmptyFile);
  CHECK_THROWS_AS(parse_label_file("\n\n", ps), EmptyFile);
  CHECK_THROWS_AS(parse_label_file("0.0\t0.1\n", ps), MalformedLine);
  CHECK_THROWS_AS(parse_label_file("0.0\tnope\tsil\n", ps), MalformedLine);
  CHECK_THROWS_AS(parse_label_file("0.1\t0.1\tsil\n", ps), MalformedLine);  // zero length
  CHECK_THROWS_AS(parse_label_file("-0.1\t0.1\tsil\n", ps), MalformedLine);
  CHECK_THROWS_AS(parse_label_file("0.0\t0.1\tzz\n", ps), UnknownPhone);
  try {
    parse_label_file("0.0\t0.1\tsil\n0.1\t0.2\tzz\n", ps);
  } catch (const UnknownPhone& e) {
    CHECK(e.symbol == "zz");
    CHECK(e.line_no == 2);
  }
}

TEST_CASE("serialize_label_file uses fixed 6-decimal times") {
  const PhoneSet ps = tiny_phoneset();
  const Alignment a("u", {{"sil", 0.0, 0.5}});
  CHECK(serialize_label_file(a) == "0.000000\t0.500000\tsil\n");
}

TEST_CASE("alignment constructor enforces the invariants") {
  CHECK_THROWS_AS(Alignment("u", {}), InvalidAlignment);
  CHECK_THROWS_AS(Alignment("u", {{"a", 0.0, 0.0}}), InvalidAlignment);
  CHECK_THROWS_AS(Alignment("u", {{"a", -0.5, 0.5}}), InvalidAlignment);
  CHECK_THROWS_AS(Alignment("u", {{"a", 0.0, 0.5}, {"a", 0.6, 0.7}}), InvalidAlignment);
  // declared offset is fine
  const Alignment a("u", {{"a", 1.5, 2.0}});
  CHECK(a.start() == doctest::Approx(1.5));
}

TEST_CASE("label file round-trip is the identity on grid-time alignments") {
  const PhoneSet ps = tiny_phoneset();
  std::mt19937_64 rng(20250811);
  for (int it = 0; it < 1000; ++it) {
    const Alignment a = segcor::test::random_alignment(rng, ps);
    const std::string text = serialize_label_file(a);
    const Alignment b = parse_label_file(text, ps, a.utterance_id());
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(b[i].phone == a[i].phone);
      CHECK(b[i].start == a[i].start);
      CHECK(b[i].end == a[i].end);
    }
    // serialize . parse is idempotent
    CHECK(serialize_label_file(b) == text);
  }
}

TEST_CASE("serialize . parse canonicalizes loose formatting") {
  const PhoneSet ps = tiny_phoneset();
  const Alignment a = parse_label_file("0\t0.1\tsil\n0.100000\t.25\ta\n", ps);
  CHECK(serialize_label_file(a) == "0.000000\t0.100000\tsil\n0.100000\t0.250000\ta\n");
}

TEST_CASE("segment durations tile the alignment span") {
  const PhoneSet ps = tiny_phoneset();
  std::mt19937_64 rng(7);
  for (int it = 0; it < 200; ++it) {
    const Alignment a = segcor::test::random_alignment(rng, ps);
    double total = 0.0;
    for (const Segment& s : a.segments()) total += s.duration();
    CHECK(total == doctest::Approx(a.end() - a.start()).epsilon(1e-12));
  }
}

TEST_CASE("parse_phoneset accepts the documented format") {
  const PhoneSet ps = PhoneSet::parse("sil\tsilence\na\tvowel\ni1\tvowel\tstressed\nt\tconsonant\n");
  CHECK(ps.size() == 4);
  CHECK(ps.cls("sil") == PhoneClass::Silence);
  CHECK(ps.cls("a") == PhoneClass::Vowel);
  CHECK(ps.at("i1").stressed_vowel);
  CHECK_FALSE(ps.at("a").stressed_vowel);
  CHECK(ps.cls("t") == PhoneClass::Consonant);
}

TEST_CASE("parse_phoneset error cases") {
  CHECK_THROWS_AS(PhoneSet::parse("a\tvowel\ni1\tvowel\tstressed\n"), NoSilenceSymbol);
  CHECK_THROWS_AS(PhoneSet::parse("sil\tsilence\na\tvowel\na\tvowel\n"), DuplicateSymbol);
  CHECK_THROWS_AS(PhoneSet::parse("sil\tsilence\na\tglide\n"), UnknownClass);
  CHECK_THROWS_AS(PhoneSet::parse("sil\tsilence\nt\tconsonant\tstressed\n"), UnknownClass);
  CHECK_THROWS_AS(PhoneSet::parse(""), EmptyFile);
  CHECK_THROWS_AS(PhoneSet::parse("sil\n"), MalformedLine);
}

TEST_CASE("phoneset round-trips through its file format") {
  const PhoneSet ps = tiny_phoneset();
  const PhoneSet again = PhoneSet::parse(ps.serialize());
  CHECK(again.size() == ps.size());
  CHECK(again.serialize() == ps.serialize());
}
