#include "segcor/boundary_correct.hpp"

#include <algorithm>

namespace segcor {

std::pair<Alignment, CorrectionReport> correct_alignment(
    const Alignment& hyp, const UtteranceStructure& u, const RegressionTree& tree,
    const FeatureSchema& schema, const PhoneSet& phoneset, double min_dur) {
  if (min_dur <= 0.0) throw InvalidConfig("min_dur must be positive");
  u.check_matches(hyp);
  if (tree.schema_hash() != schema.hash())
    throw SchemaMismatch(schema.hash(), tree.schema_hash());

  std::vector<Segment> corrected(hyp.segments());
  CorrectionReport report;
  report.boundaries.reserve(hyp.size() > 0 ? hyp.size() - 1 : 0);

  for (std::size_t i = 0; i + 1 < hyp.size(); ++i) {
    const double old_pos = hyp[i].end;
    const double predicted = tree.predict(extract_senone(u, phoneset, i, schema));
    const double desired = old_pos + predicted;

    const double lower = corrected[i].start + min_dur;
    const double upper = hyp[i + 1].end - min_dur;  // uncorrected right neighbor
    double applied_pos;
    if (lower > upper) {
      applied_pos = old_pos;  // degenerate input segment; leave the marker alone
    } else {
      applied_pos = std::clamp(desired, lower, upper);
    }

    corrected[i].end = applied_pos;
    corrected[i + 1].start = applied_pos;

    BoundaryShift shift;
    shift.phone_index = i;
    shift.predicted_shift = predicted;
    shift.applied_shift = applied_pos - old_pos;
    shift.clamped = applied_pos != desired;
    report.boundaries.push_back(shift);
  }

  return {Alignment(hyp.utterance_id(), std::move(corrected)), std::move(report)};
}

}  // namespace segcor
