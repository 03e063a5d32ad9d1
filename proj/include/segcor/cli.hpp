#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace segcor::cli {

/// Paths and knobs shared by the pipeline commands. Loaded from a JSON
/// config file; individual fields can be overridden per flag.
struct RunConfig {
  std::string phoneset;    // phone-set file
  std::string schema;      // feature-schema file; empty = default schema
  std::string symbol_map;  // optional hyp->ref symbol translation file
  std::string ref_dir;
  std::string hyp_dir;
  std::string struct_dir;
  std::string out_dir;
  int stop_size = 25;
  double min_dur = 0.005;
  double split = 0.9;  // train fraction, utterance granularity
  std::uint64_t split_seed = 7;
  double iou_threshold = 0.0;

  static RunConfig from_json(const std::string& text);
};

/// Deterministic utterance-level train/test split: sorted ids are shuffled
/// with a seeded Fisher-Yates pass and the first round(fraction * n) become
/// the training set.
struct SplitIds {
  std::vector<std::string> train;
  std::vector<std::string> test;
};
SplitIds split_utterances(std::vector<std::string> ids, double fraction, std::uint64_t seed);

/// Entry point behind the `segcor` binary: args exclude argv[0].
/// Returns the process exit code (0 = no per-utterance errors).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace segcor::cli
