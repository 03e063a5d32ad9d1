#include "segcor/corpus_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <json.hpp>

namespace segcor {

namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// Box-Muller, cosine branch only, so every call consumes exactly two draws.
double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

int uniform_int(std::mt19937_64& rng, int n) {
  return n <= 1 ? 0 : static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

std::int64_t to_us(double seconds) { return std::llround(seconds * 1e6); }
double to_s(std::int64_t us) { return static_cast<double>(us) / 1e6; }

struct Pools {
  std::vector<std::string> stressed_vowels, vowels, consonants, silences;
};

Pools build_pools(const PhoneSet& phoneset) {
  Pools pools;
  for (const auto& [symbol, entry] : phoneset.entries()) {
    switch (entry.cls) {
      case PhoneClass::Vowel:
        (entry.stressed_vowel ? pools.stressed_vowels : pools.vowels).push_back(symbol);
        break;
      case PhoneClass::Consonant:
        pools.consonants.push_back(symbol);
        break;
      case PhoneClass::Silence:
        pools.silences.push_back(symbol);
        break;
    }
  }
  if (pools.vowels.empty() || pools.consonants.empty() || pools.silences.empty())
    throw InvalidConfig("simulation needs vowels, consonants, and a silence symbol");
  if (pools.stressed_vowels.empty()) pools.stressed_vowels = pools.vowels;
  return pools;
}

const std::string& pick(std::mt19937_64& rng, const std::vector<std::string>& pool) {
  return pool[uniform_int(rng, static_cast<int>(pool.size()))];
}

Word make_silence_word(std::mt19937_64& rng, const Pools& pools) {
  Word w;
  w.text = pick(rng, pools.silences);
  Syllable s;
  s.stressed = false;
  s.phones.push_back(w.text);
  w.syllables.push_back(std::move(s));
  return w;
}

Word make_word(std::mt19937_64& rng, const Pools& pools) {
  Word w;
  const int n_syll = 1 + uniform_int(rng, 4);
  const int stressed_idx = uniform_int(rng, n_syll);
  for (int s = 0; s < n_syll; ++s) {
    Syllable syll;
    syll.stressed = s == stressed_idx;
    const int onset = uniform_int(rng, 3);
    for (int k = 0; k < onset; ++k) syll.phones.push_back(pick(rng, pools.consonants));
    syll.phones.push_back(pick(rng, syll.stressed ? pools.stressed_vowels : pools.vowels));
    if (uniform_int(rng, 2) == 1) syll.phones.push_back(pick(rng, pools.consonants));
    w.syllables.push_back(std::move(syll));
  }
  for (const Syllable& s : w.syllables)
    for (const std::string& p : s.phones) w.text += p;
  return w;
}

std::int64_t sample_duration_us(std::mt19937_64& rng, const DurationModel& m) {
  const double d = m.median * std::exp(m.sigma * gaussian(rng));
  return to_us(std::clamp(d, 0.02, 2.0));
}

bool rule_matches(const BiasRule& rule, const Senone& senone, const FeatureSchema& schema) {
  for (const auto& [name, value] : rule.when) {
    const std::size_t f = schema.index_of(name);
    if (to_string(senone.values[f]) != value) return false;
  }
  return true;
}

double matched_bias(const std::vector<BiasRule>& rules, const Senone& senone,
                    const FeatureSchema& schema) {
  for (const BiasRule& rule : rules)
    if (rule_matches(rule, senone, schema)) return rule.bias;
  return 0.0;
}

struct Edit {
  enum Type { Relabel, Split } type;
  std::size_t index;
  std::string symbol;  // replacement or second-half label
};

std::string pick_other_symbol(std::mt19937_64& rng, const std::vector<std::string>& symbols,
                              const std::string& current) {
  // symbols has >= 3 entries (pools were validated)
  while (true) {
    const std::string& s = symbols[uniform_int(rng, static_cast<int>(symbols.size()))];
    if (s != current) return s;
  }
}

}  // namespace

void SimConfig::validate() const {
  if (utterance_count < 1) throw InvalidConfig("utterance_count must be >= 1");
  if (min_phones < 3 || max_phones < min_phones)
    throw InvalidConfig("phones_per_utterance range must satisfy 3 <= min <= max");
  for (const DurationModel* m : {&vowel, &consonant, &silence})
    if (!(m->median > 0.0) || !(m->sigma >= 0.0))
      throw InvalidConfig("duration models need median > 0 and sigma >= 0");
  if (!(noise_sigma >= 0.0)) throw InvalidConfig("noise_sigma must be >= 0");
  if (recognition_error_rate < 0.0 || recognition_error_rate > 1.0)
    throw InvalidConfig("recognition_error_rate must be in [0, 1]");
  if (split_fraction < 0.0 || split_fraction > 1.0)
    throw InvalidConfig("split_fraction must be in [0, 1]");
  if (!(min_dur > 0.0)) throw InvalidConfig("min_dur must be > 0");
  for (const BiasRule& r : bias_rules)
    if (!std::isfinite(r.bias)) throw InvalidConfig("bias values must be finite");
}

SimConfig SimConfig::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("bad simulation config: ") + e.what());
  }
  SimConfig cfg;
  cfg.seed = doc.value("seed", cfg.seed);
  cfg.utterance_count = doc.value("utterance_count", cfg.utterance_count);
  if (doc.contains("phones_per_utterance")) {
    const auto& r = doc["phones_per_utterance"];
    if (!r.is_array() || r.size() != 2)
      throw InvalidConfig("phones_per_utterance must be [min, max]");
    cfg.min_phones = r[0].get<int>();
    cfg.max_phones = r[1].get<int>();
  }
  if (doc.contains("durations")) {
    auto read = [&](const char* key, DurationModel* m) {
      if (!doc["durations"].contains(key)) return;
      const auto& j = doc["durations"][key];
      m->median = j.value("median", m->median);
      m->sigma = j.value("sigma", m->sigma);
    };
    read("vowel", &cfg.vowel);
    read("consonant", &cfg.consonant);
    read("silence", &cfg.silence);
  }
  cfg.noise_sigma = doc.value("noise_sigma", cfg.noise_sigma);
  cfg.recognition_error_rate = doc.value("recognition_error_rate", cfg.recognition_error_rate);
  cfg.split_fraction = doc.value("split_fraction", cfg.split_fraction);
  cfg.min_dur = doc.value("min_dur", cfg.min_dur);
  if (doc.contains("bias_rules")) {
    for (const auto& jr : doc["bias_rules"]) {
      BiasRule rule;
      rule.bias = jr.value("bias", 0.0);
      if (jr.contains("when")) {
        for (const auto& [key, val] : jr["when"].items()) {
          std::string v = val.is_string() ? val.get<std::string>() : val.dump();
          rule.when.emplace_back(key, std::move(v));
        }
      }
      cfg.bias_rules.push_back(std::move(rule));
    }
  }
  cfg.validate();
  return cfg;
}

std::string SimConfig::to_json() const {
  json doc;
  doc["seed"] = seed;
  doc["utterance_count"] = utterance_count;
  doc["phones_per_utterance"] = {min_phones, max_phones};
  doc["durations"] = {
      {"vowel", {{"median", vowel.median}, {"sigma", vowel.sigma}}},
      {"consonant", {{"median", consonant.median}, {"sigma", consonant.sigma}}},
      {"silence", {{"median", silence.median}, {"sigma", silence.sigma}}},
  };
  doc["noise_sigma"] = noise_sigma;
  doc["recognition_error_rate"] = recognition_error_rate;
  doc["split_fraction"] = split_fraction;
  doc["min_dur"] = min_dur;
  json rules = json::array();
  for (const BiasRule& r : bias_rules) {
    json jr;
    json when = json::object();
    for (const auto& [k, v] : r.when) when[k] = v;
    jr["when"] = std::move(when);
    jr["bias"] = r.bias;
    rules.push_back(std::move(jr));
  }
  doc["bias_rules"] = std::move(rules);
  return doc.dump(2) + "\n";
}

PhoneSet default_sim_phoneset() {
  std::map<std::string, PhoneEntry> entries;
  for (const char* v : {"a", "e", "i", "o", "u"})
    entries[v] = {PhoneClass::Vowel, false};
  for (const char* v : {"a1", "e1", "i1", "o1", "u1"})
    entries[v] = {PhoneClass::Vowel, true};
  for (const char* c : {"b", "d", "dZ", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t",
                        "tS", "v", "z"})
    entries[c] = {PhoneClass::Consonant, false};
  entries["sil"] = {PhoneClass::Silence, false};
  return PhoneSet(std::move(entries));
}

std::vector<SimUtterance> generate_corpus(const SimConfig& cfg, const PhoneSet& phoneset,
                                          const FeatureSchema& schema) {
  cfg.validate();
  const Pools pools = build_pools(phoneset);
  const std::vector<std::string> all_symbols = phoneset.symbols();
  const std::int64_t min_dur_us = to_us(cfg.min_dur);

  std::vector<SimUtterance> corpus;
  corpus.reserve(cfg.utterance_count);

  for (int utt = 0; utt < cfg.utterance_count; ++utt) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(utt) + 1)));
    char id_buf[32];
    std::snprintf(id_buf, sizeof(id_buf), "utt_%05d", utt);
    const std::string utterance_id = id_buf;

    // --- structure ---
    const int target = cfg.min_phones + uniform_int(rng, cfg.max_phones - cfg.min_phones + 1);
    std::vector<Word> words;
    words.push_back(make_silence_word(rng, pools));
    int phone_count = 1;
    while (phone_count < target - 1) {
      Word w = make_word(rng, pools);
      for (const Syllable& s : w.syllables) phone_count += static_cast<int>(s.phones.size());
      words.push_back(std::move(w));
      if (phone_count < target - 1 && uniform01(rng) < 0.15) {
        words.push_back(make_silence_word(rng, pools));
        ++phone_count;
      }
    }
    words.push_back(make_silence_word(rng, pools));
    ++phone_count;

    UtteranceStructure structure(utterance_id, words, phoneset);
    const std::size_t n = structure.phone_count();

    // --- reference alignment ---
    std::vector<std::int64_t> ref_bounds(n);  // right edges, microseconds
    std::int64_t t = 0;
    std::vector<Segment> ref_segments(n);
    for (std::size_t i = 0; i < n; ++i) {
      const DurationModel& m = structure.phone_class(i) == PhoneClass::Vowel ? cfg.vowel
                               : structure.phone_class(i) == PhoneClass::Consonant
                                   ? cfg.consonant
                                   : cfg.silence;
      const std::int64_t start = t;
      t += sample_duration_us(rng, m);
      ref_bounds[i] = t;
      ref_segments[i] = {structure.phone(i), to_s(start), to_s(t)};
    }
    Alignment ref(utterance_id, std::move(ref_segments));

    // --- hypothesis boundaries: ref shifted by -bias + noise, re-tiled ---
    std::vector<std::int64_t> hyp_bounds(ref_bounds);
    std::int64_t prev = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Senone senone = extract_senone(structure, phoneset, i, schema);
      const std::int64_t bias_us = to_us(matched_bias(cfg.bias_rules, senone, schema));
      const std::int64_t noise_us =
          cfg.noise_sigma > 0.0 ? to_us(cfg.noise_sigma * gaussian(rng)) : 0;
      const std::int64_t desired = ref_bounds[i] - bias_us + noise_us;
      const std::int64_t lower = prev + min_dur_us;
      const std::int64_t upper = ref_bounds[i + 1] - min_dur_us;  // uncorrected neighbor
      hyp_bounds[i] = lower > upper ? ref_bounds[i] : std::clamp(desired, lower, upper);
      prev = hyp_bounds[i];
    }

    struct HypSeg {
      std::string phone;
      std::int64_t start, end;
    };
    std::vector<HypSeg> hyp_segs(n);
    prev = 0;
    for (std::size_t i = 0; i < n; ++i) {
      hyp_segs[i] = {structure.phone(i), prev, hyp_bounds[i]};
      prev = hyp_bounds[i];
    }

    // --- recognition errors: relabel or split segments ---
    std::vector<Edit> edits;
    for (std::size_t i = 0; i < n; ++i) {
      if (uniform01(rng) >= cfg.recognition_error_rate) continue;
      const bool split = uniform01(rng) < cfg.split_fraction &&
                         hyp_segs[i].end - hyp_segs[i].start >= 2 * min_dur_us;
      edits.push_back({split ? Edit::Split : Edit::Relabel, i,
                       pick_other_symbol(rng, all_symbols, hyp_segs[i].phone)});
    }
    if (!edits.empty()) {
      std::vector<Word> edited = structure.words();
      // apply right to left so flat indices stay valid
      for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
        const auto& pos = structure.position(it->index);
        Syllable& syll = edited[pos.word].syllables[pos.syllable];
        if (it->type == Edit::Relabel) {
          syll.phones[pos.phone] = it->symbol;
          hyp_segs[it->index].phone = it->symbol;
        } else {
          HypSeg& seg = hyp_segs[it->index];
          const std::int64_t mid = (seg.start + seg.end) / 2;
          HypSeg second{it->symbol, mid, seg.end};
          seg.end = mid;
          hyp_segs.insert(hyp_segs.begin() + static_cast<std::ptrdiff_t>(it->index) + 1,
                          std::move(second));
          syll.phones.insert(syll.phones.begin() + static_cast<std::ptrdiff_t>(pos.phone) + 1,
                             it->symbol);
        }
      }
      structure = UtteranceStructure(utterance_id, std::move(edited), phoneset);
    }

    std::vector<Segment> hyp_segments;
    hyp_segments.reserve(hyp_segs.size());
    for (const HypSeg& s : hyp_segs)
      hyp_segments.push_back({s.phone, to_s(s.start), to_s(s.end)});
    Alignment hyp(utterance_id, std::move(hyp_segments));
    structure.check_matches(hyp);

    corpus.push_back(SimUtterance{std::move(structure), std::move(ref), std::move(hyp)});
  }
  return corpus;
}

std::string oracle_group_key(const Senone& senone, const FeatureSchema& schema,
                             const std::vector<std::string>& grouping_features) {
  std::string key;
  for (std::size_t k = 0; k < grouping_features.size(); ++k) {
    if (k) key += '|';
    key += to_string(senone.values[schema.index_of(grouping_features[k])]);
  }
  return key;
}

std::map<std::string, double> oracle_class_means(const std::vector<SimUtterance>& corpus,
                                                 const PhoneSet& phoneset,
                                                 const FeatureSchema& schema,
                                                 const std::vector<std::string>& grouping_features) {
  std::map<std::string, double> sums;
  std::map<std::string, long> counts;
  for (const SimUtterance& u : corpus) {
    const auto pairs = pair_alignments(u.ref, u.hyp, phoneset);
    const auto records = compute_errors(pairs, u.ref.utterance_id());
    for (const BoundaryErrorRecord& rec : records) {
      const Senone senone =
          extract_senone(u.structure, phoneset, static_cast<std::size_t>(rec.phone_index), schema);
      const std::string key = oracle_group_key(senone, schema, grouping_features);
      sums[key] += rec.err;
      counts[key] += 1;
    }
  }
  std::map<std::string, double> means;
  for (const auto& [key, sum] : sums) means[key] = sum / static_cast<double>(counts[key]);
  return means;
}

}  // namespace segcor
