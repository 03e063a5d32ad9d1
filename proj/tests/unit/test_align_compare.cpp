#include <doctest.h>

#include <cmath>

#include "segcor/align_compare.hpp"
#include "segcor/corpus_sim.hpp"
#include "test_util.hpp"

using namespace segcor;
using segcor::test::tiny_phoneset;

namespace {

Alignment shift_phones(const Alignment& a, const std::vector<std::pair<int, std::string>>& relabels) {
  std::vector<Segment> segs = a.segments();
  for (const auto& [idx, sym] : relabels) segs[idx].phone = sym;
  return Alignment(a.utterance_id(), std::move(segs));
}

}  // namespace

TEST_CASE("identical alignments pair as all-position with zero error") {
  const PhoneSet ps = tiny_phoneset();
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    const Alignment a = segcor::test::random_alignment(rng, ps);
    const auto pairs = pair_alignments(a, a, ps);
    REQUIRE(pairs.size() == a.size());
    for (const PairedSegment& p : pairs) CHECK(p.kind == PairKind::Position);
    const auto records = compute_errors(pairs, a.utterance_id());
    CHECK(records.size() == a.size() - 1);  // final boundary is shared
    for (const auto& r : records) {
      CHECK(r.err == 0.0);
      CHECK_FALSE(r.significant);
    }
  }
}

TEST_CASE("mislabeled phones become recognition errors, the rest stay position") {
  const PhoneSet ps = tiny_phoneset();
  // "in punto": sil i1 n sil p u1 n t o sil
  std::vector<Segment> segs;
  double t = 0.0;
  for (const char* sym : {"sil", "i1", "n", "sil", "p", "u1", "n", "t", "o", "sil"}) {
    segs.push_back({sym, t, t + 0.1});
    t += 0.1;
  }
  const Alignment ref("fig1", segs);
  // the hypothesis mislabels /t/ and the final /sil/
  const Alignment hyp = shift_phones(ref, {{7, "d"}, {9, "a"}});
  const auto pairs = pair_alignments(ref, hyp, ps);
  REQUIRE(pairs.size() == 10);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i == 7 || i == 9)
      CHECK(pairs[i].kind == PairKind::Recognition);
    else
      CHECK(pairs[i].kind == PairKind::Position);
  }
}

TEST_CASE("matching symbols with zero temporal overlap are recognition errors") {
  const PhoneSet ps = tiny_phoneset();
  const Alignment ref("u", {{"a", 0.0, 1.0}, {"o", 1.0, 2.0}, {"n", 2.0, 3.0}});
  // hyp segment 2 sits in ref segment 3's span
  const Alignment hyp("u", {{"a", 0.0, 2.0}, {"o", 2.0, 3.0}, {"n", 3.0, 4.0}});
  const auto pairs = pair_alignments(ref, hyp, ps);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].kind == PairKind::Position);
  CHECK(pairs[1].kind == PairKind::Recognition);  // out of its existence area
  CHECK(pairs[2].kind == PairKind::Recognition);
}

TEST_CASE("inserted segments and their neighbors are recognition errors") {
  const PhoneSet ps = tiny_phoneset();
  const Alignment ref("u", {{"sil", 0.0, 0.2}, {"a", 0.2, 0.4}, {"n", 0.4, 0.6},
                            {"o", 0.6, 0.8}, {"sil", 0.8, 1.0}});
  const Alignment hyp("u", {{"sil", 0.0, 0.2}, {"a", 0.2, 0.3}, {"t", 0.3, 0.4},
                            {"n", 0.4, 0.6}, {"o", 0.6, 0.8}, {"sil", 0.8, 1.0}});
  const auto pairs = pair_alignments(ref, hyp, ps);
  REQUIRE(pairs.size() == 6);
  // unmatched hyp /t/ plus its matched neighbors
  int recognition = 0, unmatched = 0;
  for (const PairedSegment& p : pairs) {
    if (p.kind == PairKind::Recognition) ++recognition;
    if (!p.ref_seg || !p.hyp_seg) ++unmatched;
  }
  CHECK(unmatched == 1);
  CHECK(recognition == 3);
  CHECK(pairs[0].kind == PairKind::Position);
  CHECK(pairs[5].kind == PairKind::Position);
}

TEST_CASE("symbol map translates the hypothesis inventory") {
  const PhoneSet ps = PhoneSet::parse(
      "sil\tsilence\na\tvowel\nA\tvowel\nn\tconsonant\nN\tconsonant\n");
  const Alignment ref("u", {{"a", 0.0, 0.5}, {"n", 0.5, 1.0}});
  const Alignment hyp("u", {{"A", 0.0, 0.5}, {"N", 0.5, 1.0}});
  SymbolMap map = parse_symbol_map("A\ta\nN\tn\n", ps);
  CompareOptions opts;
  opts.symbol_map = &map;
  for (const PairedSegment& p : pair_alignments(ref, hyp, ps, opts))
    CHECK(p.kind == PairKind::Position);
  // without the map the same comparison reports recognition errors
  for (const PairedSegment& p : pair_alignments(ref, hyp, ps))
    CHECK(p.kind == PairKind::Recognition);
}

TEST_CASE("symbol map file validation") {
  const PhoneSet ps = tiny_phoneset();
  CHECK_THROWS_AS(parse_symbol_map("a\tzz\n", ps), UnknownPhone);
  CHECK_THROWS_AS(parse_symbol_map("zz\ta\n", ps), UnknownPhone);
  CHECK_THROWS_AS(parse_symbol_map("a\to\na\to\n", ps), DuplicateSymbol);
  CHECK_THROWS_AS(parse_symbol_map("a o\n", ps), MalformedLine);
}

TEST_CASE("utterance ids must match") {
  const PhoneSet ps = tiny_phoneset();
  const Alignment a("u1", {{"a", 0.0, 0.5}});
  const Alignment b("u2", {{"a", 0.0, 0.5}});
  CHECK_THROWS_AS(pair_alignments(a, b, ps), UtteranceMismatch);
}

TEST_CASE("boundary errors follow Err = ref_end - hyp_end with the 0.01 s rule") {
  const PhoneSet ps = tiny_phoneset();
  const Alignment ref("u", {{"a", 0.0, 1.230}, {"n", 1.230, 2.0}});

  const Alignment hyp_early("u", {{"a", 0.0, 1.200}, {"n", 1.200, 2.0}});
  auto records = compute_errors(pair_alignments(ref, hyp_early, ps), "u");
  REQUIRE(records.size() == 1);
  CHECK(records[0].err == doctest::Approx(0.030).epsilon(1e-9));
  CHECK(records[0].significant);
  CHECK(records[0].phone_index == 0);
  CHECK(records[0].phone == "a");

  const Alignment hyp_close("u", {{"a", 0.0, 1.225}, {"n", 1.225, 2.0}});
  records = compute_errors(pair_alignments(ref, hyp_close, ps), "u");
  REQUIRE(records.size() == 1);
  CHECK(records[0].err == doctest::Approx(0.005).epsilon(1e-9));
  CHECK_FALSE(records[0].significant);
}

TEST_CASE("preprocess drops recognition pairs and reports the fraction") {
  const PhoneSet ps = tiny_phoneset();
  const Alignment ref("u", {{"sil", 0.0, 0.2}, {"a", 0.2, 0.4}, {"n", 0.4, 0.6}, {"o", 0.6, 0.8}});
  SUBCASE("all position") {
    const auto pre = preprocess(pair_alignments(ref, ref, ps));
    CHECK(pre.discarded_fraction == 0.0);
    CHECK(pre.unified.size() == 4);
  }
  SUBCASE("one recognition out of four") {
    const Alignment hyp = shift_phones(ref, {{2, "t"}});
    const auto pre = preprocess(pair_alignments(ref, hyp, ps));
    CHECK(pre.total_units == 4);
    CHECK(pre.discarded_units == 1);
    CHECK(pre.discarded_fraction == doctest::Approx(0.25));
    CHECK(pre.unified.size() == 3);
  }
}

TEST_CASE("swapping ref and hyp negates every boundary error") {
  const PhoneSet ps = default_sim_phoneset();
  const FeatureSchema schema = FeatureSchema::default_for(ps);
  SimConfig cfg;
  cfg.seed = 404;
  cfg.utterance_count = 60;
  cfg.noise_sigma = 0.02;
  cfg.recognition_error_rate = 0.05;
  cfg.split_fraction = 0.0;  // keep the sequences the same length
  cfg.bias_rules.push_back({{{"cur_phone_class", "vowel"}}, 0.02});
  const auto corpus = generate_corpus(cfg, ps, schema);
  for (const SimUtterance& su : corpus) {
    const auto fwd = compute_errors(pair_alignments(su.ref, su.hyp, ps), "u");
    const auto bwd = compute_errors(pair_alignments(su.hyp, su.ref, ps), "u");
    REQUIRE(fwd.size() == bwd.size());
    for (std::size_t i = 0; i < fwd.size(); ++i) {
      CHECK(fwd[i].phone_index == bwd[i].phone_index);
      CHECK(fwd[i].err == doctest::Approx(-bwd[i].err).epsilon(1e-12));
    }
  }
}

TEST_CASE("every position pair overlaps in time") {
  const PhoneSet ps = default_sim_phoneset();
  const FeatureSchema schema = FeatureSchema::default_for(ps);
  SimConfig cfg;
  cfg.seed = 17;
  cfg.utterance_count = 40;
  cfg.noise_sigma = 0.03;
  cfg.recognition_error_rate = 0.08;
  const auto corpus = generate_corpus(cfg, ps, schema);
  std::size_t position_pairs = 0, records_count = 0;
  for (const SimUtterance& su : corpus) {
    const auto pairs = pair_alignments(su.ref, su.hyp, ps);
    int last_hyp = -1;
    for (const PairedSegment& p : pairs) last_hyp = std::max(last_hyp, p.hyp_index);
    for (const PairedSegment& p : pairs) {
      if (p.kind != PairKind::Position) continue;
      ++position_pairs;
      CHECK(temporal_overlap(*p.ref_seg, *p.hyp_seg) > 0.0);
      if (p.hyp_index != last_hyp) ++records_count;
    }
    CHECK(compute_errors(pairs, "u").size() == records_count);
    records_count = 0;
  }
  CHECK(position_pairs > 0);
}
