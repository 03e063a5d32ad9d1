#include "segcor/align_compare.hpp"

#include <algorithm>
#include <cmath>

namespace segcor {

namespace {

constexpr double kSignificance = 0.01;  // seconds

struct Op {
  enum Type { Match, Delete, Insert } type;  // Delete drops a ref segment
  int ref = -1;
  int hyp = -1;
};

const std::string& mapped_symbol(const std::string& hyp_symbol, const SymbolMap* map) {
  if (map) {
    auto it = map->find(hyp_symbol);
    if (it != map->end()) return it->second;
  }
  return hyp_symbol;
}

}  // namespace

double temporal_overlap(const Segment& a, const Segment& b) {
  return std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
}

SymbolMap parse_symbol_map(const std::string& text, const PhoneSet& phoneset) {
  SymbolMap map;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw MalformedLine(line_no, "expected hyp_symbol<TAB>ref_symbol");
    std::string hyp = line.substr(0, tab);
    std::string ref = line.substr(tab + 1);
    if (!phoneset.contains(hyp)) throw UnknownPhone(hyp, line_no);
    if (!phoneset.contains(ref)) throw UnknownPhone(ref, line_no);
    if (!map.emplace(std::move(hyp), std::move(ref)).second)
      throw DuplicateSymbol(line.substr(0, tab));
  }
  return map;
}

std::vector<PairedSegment> pair_alignments(const Alignment& ref, const Alignment& hyp,
                                           const PhoneSet& phoneset,
                                           const CompareOptions& opts) {
  if (ref.utterance_id() != hyp.utterance_id())
    throw UtteranceMismatch(ref.utterance_id(), hyp.utterance_id());

  const int m = static_cast<int>(ref.size());
  const int n = static_cast<int>(hyp.size());

  auto sub_cost = [&](int i, int j) -> double {
    const std::string& r = ref[i].phone;
    const std::string& h = mapped_symbol(hyp[j].phone, opts.symbol_map);
    if (r == h) return 0.0;
    if (phoneset.cls(r) == phoneset.cls(h)) return 0.5;
    return 1.0;
  };

  // Global minimum-cost alignment of the two phone strings.
  std::vector<double> dp(static_cast<std::size_t>(m + 1) * (n + 1));
  auto at = [&](int i, int j) -> double& { return dp[static_cast<std::size_t>(i) * (n + 1) + j]; };
  for (int i = 0; i <= m; ++i) at(i, 0) = i;
  for (int j = 0; j <= n; ++j) at(0, j) = j;
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= n; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + sub_cost(i - 1, j - 1),
                           at(i - 1, j) + 1.0, at(i, j - 1) + 1.0});

  // Traceback, ties preferring substitution, then ref-side deletion.
  std::vector<Op> ops;
  ops.reserve(static_cast<std::size_t>(std::max(m, n)));
  int i = m, j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + sub_cost(i - 1, j - 1)) {
      ops.push_back({Op::Match, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1.0) {
      ops.push_back({Op::Delete, i - 1, -1});
      --i;
    } else {
      ops.push_back({Op::Insert, -1, j - 1});
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());

  std::vector<PairedSegment> pairs;
  pairs.reserve(ops.size());
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const Op& op = ops[k];
    PairedSegment pair;
    if (op.type == Op::Match) {
      const Segment& r = ref[op.ref];
      const Segment& h = hyp[op.hyp];
      pair.ref_seg = r;
      pair.hyp_seg = h;
      pair.ref_index = op.ref;
      pair.hyp_index = op.hyp;
      const bool symbols_equal = r.phone == mapped_symbol(h.phone, opts.symbol_map);
      const double inter = temporal_overlap(r, h);
      const double uni = r.duration() + h.duration() - inter;
      const bool overlapping = uni > 0.0 && inter / uni > opts.iou_threshold;
      const bool beside_indel = (k > 0 && ops[k - 1].type != Op::Match) ||
                                (k + 1 < ops.size() && ops[k + 1].type != Op::Match);
      pair.kind = symbols_equal && overlapping && !beside_indel ? PairKind::Position
                                                                : PairKind::Recognition;
    } else if (op.type == Op::Delete) {
      pair.ref_seg = ref[op.ref];
      pair.ref_index = op.ref;
      pair.kind = PairKind::Recognition;
    } else {
      pair.hyp_seg = hyp[op.hyp];
      pair.hyp_index = op.hyp;
      pair.kind = PairKind::Recognition;
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<BoundaryErrorRecord> compute_errors(const std::vector<PairedSegment>& pairs,
                                                const std::string& utterance_id) {
  int last_hyp_index = -1;
  for (const PairedSegment& p : pairs) last_hyp_index = std::max(last_hyp_index, p.hyp_index);

  std::vector<BoundaryErrorRecord> records;
  for (const PairedSegment& p : pairs) {
    if (p.kind != PairKind::Position) continue;
    if (p.hyp_index == last_hyp_index) continue;  // utterance end is shared
    BoundaryErrorRecord rec;
    rec.utterance_id = utterance_id;
    rec.phone_index = p.hyp_index;
    rec.phone = p.hyp_seg->phone;
    rec.err = p.ref_seg->end - p.hyp_seg->end;
    rec.significant = std::abs(rec.err) > kSignificance;
    records.push_back(std::move(rec));
  }
  return records;
}

PreprocessResult preprocess(const std::vector<PairedSegment>& pairs) {
  PreprocessResult result;
  result.total_units = pairs.size();
  for (const PairedSegment& p : pairs) {
    if (p.kind == PairKind::Position)
      result.unified.emplace_back(*p.ref_seg, *p.hyp_seg);
    else
      ++result.discarded_units;
  }
  result.discarded_fraction =
      result.total_units == 0
          ? 0.0
          : static_cast<double>(result.discarded_units) / static_cast<double>(result.total_units);
  return result;
}

}  // namespace segcor
