#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "segcor/align_compare.hpp"
#include "segcor/context_features.hpp"

namespace segcor {

struct DurationModel {
  double median = 0.1;  // seconds
  double sigma = 0.3;   // log-domain spread
};

/// Injected systematic error: when every (feature, value) condition matches
/// a phone's senone, its right boundary is moved early by `bias` seconds.
/// Rules are tried in order; the first match wins. An empty condition list
/// matches every phone.
struct BiasRule {
  std::vector<std::pair<std::string, std::string>> when;
  double bias = 0.0;  // Err = ref - hyp equals this (plus noise) on average
};

struct SimConfig {
  std::uint64_t seed = 1;
  int utterance_count = 10;
  int min_phones = 20;
  int max_phones = 50;
  DurationModel vowel{0.09, 0.3};
  DurationModel consonant{0.06, 0.3};
  DurationModel silence{0.20, 0.3};
  std::vector<BiasRule> bias_rules;
  double noise_sigma = 0.0;              // stddev of the boundary jitter, seconds
  double recognition_error_rate = 0.0;   // per-segment relabel/split probability
  double split_fraction = 0.05;          // share of recognition errors that split
  double min_dur = 0.005;                // clamp floor for shifted boundaries

  void validate() const;  // throws InvalidConfig
  static SimConfig from_json(const std::string& text);
  std::string to_json() const;
};

/// One generated utterance. The structure matches the hypothesis phone
/// sequence (what a front end would hand the aligner being corrected); the
/// reference alignment plays the role of the trusted segmentation.
struct SimUtterance {
  UtteranceStructure structure;
  Alignment ref;
  Alignment hyp;
};

/// Italian-flavoured SAMPA inventory used by the simulator by default:
/// plain and stressed vowels, a consonant set, and `sil`.
PhoneSet default_sim_phoneset();

/// Deterministic synthetic corpus: word/syllable structures sampled from the
/// phone inventory, reference times from the per-class duration models, and
/// hypothesis boundaries shifted by -bias + Gaussian noise, then re-tiled.
/// Segments are relabeled or split at recognition_error_rate. All times lie
/// on the 1 us grid. The same seed reproduces the corpus bit for bit
/// (mt19937_64 with splitmix64-derived per-utterance streams).
std::vector<SimUtterance> generate_corpus(const SimConfig& cfg, const PhoneSet& phoneset,
                                          const FeatureSchema& schema);

/// Brute-force referee: groups every boundary error record by the values of
/// `grouping_features` (joined with '|') and averages the signed errors.
std::map<std::string, double> oracle_class_means(const std::vector<SimUtterance>& corpus,
                                                 const PhoneSet& phoneset,
                                                 const FeatureSchema& schema,
                                                 const std::vector<std::string>& grouping_features);

/// Senone-value key used by oracle_class_means, exposed so callers can line
/// predictions up with oracle groups.
std::string oracle_group_key(const Senone& senone, const FeatureSchema& schema,
                             const std::vector<std::string>& grouping_features);

}  // namespace segcor
