#pragma once

#include <map>
#include <string>
#include <vector>

#include "segcor/align_compare.hpp"
#include "segcor/context_features.hpp"

namespace segcor {

/// Corpus-level boundary statistics: total absolute error over all paired
/// position boundaries, its mean, and the population stddev of the signed
/// errors.
struct CorpusMetrics {
  double total_error = 0.0;  // sum of |err|, seconds
  double mean_error = 0.0;   // total_error / boundary_count
  double stddev = 0.0;       // population stddev of signed errors
  long boundary_count = 0;
  long significant_count = 0;
};

CorpusMetrics corpus_metrics(const std::vector<BoundaryErrorRecord>& records);

/// V/C/- class letters of the (previous, current, next) phones around
/// `phone_index`; out-of-utterance context maps to '-'.
std::string triphone_class(const PhoneSet& phoneset, const UtteranceStructure& u,
                           std::size_t phone_index);

struct TriphoneStats {
  long count = 0;
  double mean_abs_error = 0.0;
  double mean_signed_error = 0.0;
  double share_of_total_error = 0.0;  // class sum of |err| / corpus sum of |err|
};

/// Per-triphone-class aggregation. All 27 possible labels are present in the
/// result, zero-count classes included.
std::map<std::string, TriphoneStats> triphone_stats(
    const std::vector<BoundaryErrorRecord>& records, const std::vector<std::string>& labels);

/// Fractional reduction of total error: (before - after) / before.
double improvement(const CorpusMetrics& before, const CorpusMetrics& after);

/// The 27 triphone labels over {V, C, -} in lexicographic order.
std::vector<std::string> all_triphone_labels();

}  // namespace segcor
