#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segcor/label_model.hpp"

namespace segcor {

enum class PairKind { Position, Recognition };

/// One unit of the phone-by-phone comparison. Unmatched segments (insertions
/// or deletions in the sequence alignment) leave the missing side empty and
/// are always recognition errors.
struct PairedSegment {
  std::optional<Segment> ref_seg;
  std::optional<Segment> hyp_seg;
  // indices into the source alignments; -1 for the missing side
  int ref_index = -1;
  int hyp_index = -1;
  PairKind kind = PairKind::Recognition;
};

/// Signed right-boundary error of one position pair:
/// err = reference end - hypothesis end, so err > 0 means the hypothesis
/// marker is early. Significant iff |err| > 0.01 s.
struct BoundaryErrorRecord {
  std::string utterance_id;
  int phone_index = 0;  // segment index in the hypothesis alignment
  std::string phone;    // hypothesis phone symbol
  double err = 0.0;
  bool significant = false;
};

/// hyp symbol -> ref symbol translation used when the two aligners use
/// different phone inventories. Symbols without an entry map to themselves.
using SymbolMap = std::map<std::string, std::string>;

/// Parses the symbol-map file format: `hyp_symbol<TAB>ref_symbol` lines.
SymbolMap parse_symbol_map(const std::string& text, const PhoneSet& phoneset);

struct CompareOptions {
  const SymbolMap* symbol_map = nullptr;
  // A matched pair needs intersection/union above this to count as a
  // position pair; 0 means any positive overlap qualifies.
  double iou_threshold = 0.0;
};

/// Pairs the two alignments phone by phone with a global minimum-cost
/// sequence alignment (substitution 0 for equal mapped symbols, 0.5 for the
/// same phone class, 1 otherwise; insertion/deletion 1). A matched pair is a
/// position pair iff the mapped symbols are equal, the segments overlap in
/// time, and the pair is not adjacent to an insertion or deletion; everything
/// else is a recognition error.
std::vector<PairedSegment> pair_alignments(const Alignment& ref, const Alignment& hyp,
                                           const PhoneSet& phoneset,
                                           const CompareOptions& opts = {});

/// One record per position pair, excluding the utterance-final boundary
/// (both aligners share the audio duration). Recognition pairs yield none.
std::vector<BoundaryErrorRecord> compute_errors(const std::vector<PairedSegment>& pairs,
                                                const std::string& utterance_id);

/// Drops recognition pairs; returns the surviving (ref, hyp) pairs in order
/// plus the discarded fraction of all units.
struct PreprocessResult {
  std::vector<std::pair<Segment, Segment>> unified;
  double discarded_fraction = 0.0;
  std::size_t total_units = 0;
  std::size_t discarded_units = 0;
};
PreprocessResult preprocess(const std::vector<PairedSegment>& pairs);

double temporal_overlap(const Segment& a, const Segment& b);

}  // namespace segcor
