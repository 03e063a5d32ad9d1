#pragma once

#include <utility>
#include <vector>

#include "segcor/cart.hpp"

namespace segcor {

/// What happened at one internal boundary during correction.
struct BoundaryShift {
  std::size_t phone_index = 0;   // segment whose right edge this is
  double predicted_shift = 0.0;  // tree output, seconds
  double applied_shift = 0.0;    // shift after clamping
  bool clamped = false;          // applied != predicted
};

struct CorrectionReport {
  std::vector<BoundaryShift> boundaries;

  std::size_t clamped_count() const {
    std::size_t n = 0;
    for (const BoundaryShift& b : boundaries)
      if (b.clamped) ++n;
    return n;
  }
};

/// Shifts every internal boundary of `hyp` by the tree's predicted
/// systematic error for the phone on its left, sweeping left to right.
/// Each new position is clamped so the left neighbor (already corrected)
/// and the right neighbor (still uncorrected) both keep at least min_dur
/// of duration; the utterance start and final end never move.
std::pair<Alignment, CorrectionReport> correct_alignment(
    const Alignment& hyp, const UtteranceStructure& u, const RegressionTree& tree,
    const FeatureSchema& schema, const PhoneSet& phoneset, double min_dur = 0.005);

}  // namespace segcor
