#include "segcor/eval_report.hpp"

#include <cmath>

namespace segcor {

namespace {

char class_letter(PhoneClass c) {
  switch (c) {
    case PhoneClass::Vowel: return 'V';
    case PhoneClass::Consonant: return 'C';
    case PhoneClass::Silence: return '-';
  }
  return '?';
}

}  // namespace

CorpusMetrics corpus_metrics(const std::vector<BoundaryErrorRecord>& records) {
  if (records.empty()) throw EmptyRecords();
  CorpusMetrics m;
  m.boundary_count = static_cast<long>(records.size());
  double signed_sum = 0.0;
  for (const BoundaryErrorRecord& r : records) {
    m.total_error += std::abs(r.err);
    signed_sum += r.err;
    if (r.significant) ++m.significant_count;
  }
  m.mean_error = m.total_error / static_cast<double>(m.boundary_count);
  const double signed_mean = signed_sum / static_cast<double>(m.boundary_count);
  double var = 0.0;
  for (const BoundaryErrorRecord& r : records) {
    const double d = r.err - signed_mean;
    var += d * d;
  }
  m.stddev = std::sqrt(var / static_cast<double>(m.boundary_count));
  return m;
}

std::string triphone_class(const PhoneSet& phoneset, const UtteranceStructure& u,
                           std::size_t phone_index) {
  if (phone_index >= u.phone_count()) throw IndexOutOfRange(phone_index, u.phone_count());
  (void)phoneset;  // classes were resolved when the structure was built
  std::string label(3, '-');
  if (phone_index > 0) label[0] = class_letter(u.phone_class(phone_index - 1));
  label[1] = class_letter(u.phone_class(phone_index));
  if (phone_index + 1 < u.phone_count()) label[2] = class_letter(u.phone_class(phone_index + 1));
  return label;
}

std::vector<std::string> all_triphone_labels() {
  const char letters[] = {'-', 'C', 'V'};
  std::vector<std::string> labels;
  labels.reserve(27);
  for (char a : letters)
    for (char b : letters)
      for (char c : letters) labels.push_back(std::string{a, b, c});
  return labels;
}

std::map<std::string, TriphoneStats> triphone_stats(
    const std::vector<BoundaryErrorRecord>& records, const std::vector<std::string>& labels) {
  if (records.size() != labels.size())
    throw LengthMismatch(records.size(), labels.size());

  std::map<std::string, TriphoneStats> stats;
  for (const std::string& label : all_triphone_labels()) stats[label];

  std::map<std::string, double> abs_sum, signed_sum;
  double corpus_abs = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    TriphoneStats& s = stats[labels[i]];
    ++s.count;
    abs_sum[labels[i]] += std::abs(records[i].err);
    signed_sum[labels[i]] += records[i].err;
    corpus_abs += std::abs(records[i].err);
  }
  for (auto& [label, s] : stats) {
    if (s.count > 0) {
      s.mean_abs_error = abs_sum[label] / static_cast<double>(s.count);
      s.mean_signed_error = signed_sum[label] / static_cast<double>(s.count);
    }
    if (corpus_abs > 0.0) s.share_of_total_error = abs_sum[label] / corpus_abs;
  }
  return stats;
}

double improvement(const CorpusMetrics& before, const CorpusMetrics& after) {
  if (!(before.total_error > 0.0)) throw ZeroBaseline();
  return (before.total_error - after.total_error) / before.total_error;
}

}  // namespace segcor
