#include "segcor/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "segcor/align_compare.hpp"
#include "segcor/boundary_correct.hpp"
#include "segcor/cart.hpp"
#include "segcor/context_features.hpp"
#include "segcor/corpus_sim.hpp"
#include "segcor/eval_report.hpp"
#include "segcor/label_model.hpp"

namespace segcor::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// small file/CSV plumbing
// ---------------------------------------------------------------------------

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidConfig("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so partially written outputs never appear under the
// final name.
void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidConfig("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::vector<std::string> list_utterance_ids(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw InvalidConfig("not a directory: " + dir.string());
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ext)
      ids.push_back(entry.path().stem().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Runs fn(0..n-1) on a bounded pool; each task owns its output slot, so the
// reduction stays deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, 8);
  if (n < 2 || workers < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

struct UtteranceError {
  std::string utterance_id;
  std::string message;
};

int finish(const std::vector<UtteranceError>& errors, const fs::path& out_dir,
           std::ostream& err_stream) {
  if (errors.empty()) return 0;
  json listing = json::array();
  for (const UtteranceError& e : errors) {
    listing.push_back({{"utterance_id", e.utterance_id}, {"error", e.message}});
    err_stream << "error [" << e.utterance_id << "]: " << e.message << "\n";
  }
  write_file(out_dir / "errors.json", listing.dump(2) + "\n");
  return 1;
}

std::string format_real(double v) { return format_seconds(v); }

// ---------------------------------------------------------------------------
// shared pipeline pieces
// ---------------------------------------------------------------------------

struct Loaded {
  PhoneSet phoneset;
  FeatureSchema schema;
};

Loaded load_phoneset_and_schema(const RunConfig& cfg) {
  PhoneSet ps = PhoneSet::parse(read_file(cfg.phoneset));
  FeatureSchema schema = cfg.schema.empty() ? FeatureSchema::default_for(ps)
                                            : FeatureSchema::parse(read_file(cfg.schema));
  return Loaded{std::move(ps), std::move(schema)};
}

Alignment load_alignment(const fs::path& dir, const std::string& id, const PhoneSet& ps) {
  return parse_label_file(read_file(dir / (id + ".lab")), ps, id);
}

UtteranceStructure load_structure(const fs::path& dir, const std::string& id,
                                  const PhoneSet& ps) {
  return UtteranceStructure::parse(read_file(dir / (id + ".json")), ps);
}

std::string records_csv_header() {
  return "utterance_id,phone_index,phone,err_seconds,significant\n";
}

std::string records_to_csv_rows(const std::vector<BoundaryErrorRecord>& records) {
  std::string out;
  for (const BoundaryErrorRecord& r : records) {
    out += csv_field(r.utterance_id);
    out += ',';
    out += std::to_string(r.phone_index);
    out += ',';
    out += csv_field(r.phone);
    out += ',';
    out += format_real(r.err);
    out += ',';
    out += r.significant ? "true" : "false";
    out += '\n';
  }
  return out;
}

std::vector<BoundaryErrorRecord> parse_records_csv(const std::string& text) {
  std::vector<BoundaryErrorRecord> records;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;  // header
    }
    const auto fields = parse_csv_line(line);
    if (fields.size() != 5) throw InvalidConfig("bad records.csv row: " + line);
    BoundaryErrorRecord rec;
    rec.utterance_id = fields[0];
    rec.phone_index = std::stoi(fields[1]);
    rec.phone = fields[2];
    rec.err = std::stod(fields[3]);
    rec.significant = fields[4] == "true";
    records.push_back(std::move(rec));
  }
  return records;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_simulate(const SimConfig& sim_cfg, const fs::path& out_dir, std::ostream& out) {
  const PhoneSet phoneset = default_sim_phoneset();
  const FeatureSchema schema = FeatureSchema::default_for(phoneset);
  const auto corpus = generate_corpus(sim_cfg, phoneset, schema);

  write_file(out_dir / "phoneset.tsv", phoneset.serialize());
  write_file(out_dir / "schema.tsv", schema.serialize());
  write_file(out_dir / "sim_config.json", sim_cfg.to_json());

  std::vector<std::string> ref_texts(corpus.size()), hyp_texts(corpus.size()),
      struct_texts(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) {
    ref_texts[i] = serialize_label_file(corpus[i].ref);
    hyp_texts[i] = serialize_label_file(corpus[i].hyp);
    struct_texts[i] = corpus[i].structure.serialize();
  });
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::string& id = corpus[i].ref.utterance_id();
    write_file(out_dir / "ref" / (id + ".lab"), ref_texts[i]);
    write_file(out_dir / "hyp" / (id + ".lab"), hyp_texts[i]);
    write_file(out_dir / "structs" / (id + ".json"), struct_texts[i]);
  }
  out << "simulated " << corpus.size() << " utterances into " << out_dir.string() << "\n";
  return 0;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Loaded loaded = load_phoneset_and_schema(cfg);
  std::optional<SymbolMap> symbol_map;
  if (!cfg.symbol_map.empty())
    symbol_map = parse_symbol_map(read_file(cfg.symbol_map), loaded.phoneset);

  const auto ids = list_utterance_ids(cfg.ref_dir, ".lab");
  struct Result {
    std::vector<BoundaryErrorRecord> records;
    std::size_t total_units = 0;
    std::size_t discarded_units = 0;
    std::string error;
  };
  std::vector<Result> results(ids.size());

  parallel_for(ids.size(), [&](std::size_t i) {
    Result& res = results[i];
    try {
      const Alignment ref = load_alignment(cfg.ref_dir, ids[i], loaded.phoneset);
      const Alignment hyp = load_alignment(cfg.hyp_dir, ids[i], loaded.phoneset);
      CompareOptions opts;
      opts.symbol_map = symbol_map ? &*symbol_map : nullptr;
      opts.iou_threshold = cfg.iou_threshold;
      const auto pairs = pair_alignments(ref, hyp, loaded.phoneset, opts);
      res.records = compute_errors(pairs, ids[i]);
      const PreprocessResult pre = preprocess(pairs);
      res.total_units = pre.total_units;
      res.discarded_units = pre.discarded_units;
    } catch (const std::exception& e) {
      res.error = e.what();
    }
  });

  std::string csv = records_csv_header();
  std::size_t total_units = 0, discarded_units = 0, record_count = 0;
  std::vector<UtteranceError> errors;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!results[i].error.empty()) {
      errors.push_back({ids[i], results[i].error});
      continue;
    }
    csv += records_to_csv_rows(results[i].records);
    total_units += results[i].total_units;
    discarded_units += results[i].discarded_units;
    record_count += results[i].records.size();
  }

  const double discarded_fraction =
      total_units == 0 ? 0.0
                       : static_cast<double>(discarded_units) / static_cast<double>(total_units);
  write_file(fs::path(cfg.out_dir) / "records.csv", csv);
  json summary{{"utterances", ids.size() - errors.size()},
               {"total_units", total_units},
               {"discarded_units", discarded_units},
               {"discarded_fraction", discarded_fraction},
               {"records", record_count}};
  write_file(fs::path(cfg.out_dir) / "compare_summary.json", summary.dump(2) + "\n");
  out << "compared " << ids.size() - errors.size() << " utterances: " << record_count
      << " boundary records, " << discarded_units << "/" << total_units
      << " units discarded (" << format_real(discarded_fraction * 100.0) << "%)\n";
  return finish(errors, cfg.out_dir, err);
}

struct ExampleSet {
  std::vector<TrainingExample> train;
  std::vector<TrainingExample> test;
};

// Turns compare output into senone/target pairs, split by utterance.
ExampleSet build_examples(const RunConfig& cfg, const Loaded& loaded,
                          const std::vector<BoundaryErrorRecord>& records) {
  std::vector<std::string> ids;
  std::map<std::string, std::vector<const BoundaryErrorRecord*>> by_utt;
  for (const BoundaryErrorRecord& r : records) {
    auto [it, inserted] = by_utt.try_emplace(r.utterance_id);
    if (inserted) ids.push_back(r.utterance_id);
    it->second.push_back(&r);
  }
  std::sort(ids.begin(), ids.end());
  const SplitIds split = split_utterances(ids, cfg.split, cfg.split_seed);

  ExampleSet set;
  auto emit = [&](const std::vector<std::string>& subset, std::vector<TrainingExample>* dst) {
    for (const std::string& id : subset) {
      const UtteranceStructure structure = load_structure(cfg.struct_dir, id, loaded.phoneset);
      for (const BoundaryErrorRecord* rec : by_utt.at(id)) {
        TrainingExample ex;
        ex.senone = extract_senone(structure, loaded.phoneset,
                                   static_cast<std::size_t>(rec->phone_index), loaded.schema);
        ex.target = rec->err;
        dst->push_back(std::move(ex));
      }
    }
  };
  emit(split.train, &set.train);
  emit(split.test, &set.test);
  return set;
}

std::string dataset_csv(const std::vector<TrainingExample>& examples,
                        const FeatureSchema& schema) {
  std::string out;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    out += csv_field(schema.at(f).name);
    out += ',';
  }
  out += "target\n";
  for (const TrainingExample& ex : examples) {
    for (const FeatureValue& v : ex.senone.values) {
      out += csv_field(to_string(v));
      out += ',';
    }
    out += format_real(ex.target);
    out += '\n';
  }
  return out;
}

std::string metrics_row(const std::string& tree_name, const std::string& split,
                        std::size_t n, const TreeMetrics& m) {
  std::string out;
  out += tree_name + "," + split + "," + std::to_string(n) + "," + format_real(m.rmse) + "," +
         format_real(m.correlation) + "," + format_real(m.mean_error) + "," +
         format_real(m.mean_abs_error) + "\n";
  return out;
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Loaded loaded = load_phoneset_and_schema(cfg);
  const auto records = parse_records_csv(read_file(fs::path(cfg.out_dir) / "records.csv"));
  const ExampleSet set = build_examples(cfg, loaded, records);
  if (set.train.empty()) throw EmptyTrainingSet();
  if (static_cast<std::size_t>(cfg.stop_size) > set.train.size())
    err << "warning: stop_size " << cfg.stop_size << " exceeds the " << set.train.size()
        << " training examples; the tree will be a single leaf\n";

  const RegressionTree tree =
      RegressionTree::train(set.train, cfg.stop_size, loaded.schema);
  const std::string tree_name = "cor.S" + std::to_string(cfg.stop_size) + ".tree";
  write_file(fs::path(cfg.out_dir) / tree_name, tree.serialize(loaded.schema));
  write_file(fs::path(cfg.out_dir) / "dataset.csv", dataset_csv(set.train, loaded.schema));

  std::string csv = "tree,split,examples,rmse,correlation,mean_error,mean_abs_error\n";
  const TreeMetrics train_m = tree.evaluate(set.train);
  csv += metrics_row(tree_name, "train", set.train.size(), train_m);
  out << tree_name << " train: rmse " << format_real(train_m.rmse) << ", corr "
      << format_real(train_m.correlation) << ", mean " << format_real(train_m.mean_error)
      << ", mean|.| " << format_real(train_m.mean_abs_error) << " (" << set.train.size()
      << " examples)\n";
  if (!set.test.empty()) {
    const TreeMetrics test_m = tree.evaluate(set.test);
    csv += metrics_row(tree_name, "test", set.test.size(), test_m);
    out << tree_name << " test:  rmse " << format_real(test_m.rmse) << ", corr "
        << format_real(test_m.correlation) << ", mean " << format_real(test_m.mean_error)
        << ", mean|.| " << format_real(test_m.mean_abs_error) << " (" << set.test.size()
        << " examples)\n";
  }
  write_file(fs::path(cfg.out_dir) / "train_metrics.csv", csv);
  return 0;
}

int cmd_correct(const RunConfig& cfg, const std::string& tree_path, std::ostream& out,
                std::ostream& err) {
  const Loaded loaded = load_phoneset_and_schema(cfg);
  const fs::path tree_file = tree_path.empty()
                                 ? fs::path(cfg.out_dir) / ("cor.S" + std::to_string(cfg.stop_size) + ".tree")
                                 : fs::path(tree_path);
  const RegressionTree tree = RegressionTree::parse(read_file(tree_file), loaded.schema);

  const auto ids = list_utterance_ids(cfg.hyp_dir, ".lab");
  struct Result {
    std::string corrected_text;
    std::string report_rows;
    std::size_t clamped = 0;
    std::size_t boundaries = 0;
    std::string error;
  };
  std::vector<Result> results(ids.size());

  parallel_for(ids.size(), [&](std::size_t i) {
    Result& res = results[i];
    try {
      const Alignment hyp = load_alignment(cfg.hyp_dir, ids[i], loaded.phoneset);
      const UtteranceStructure structure =
          load_structure(cfg.struct_dir, ids[i], loaded.phoneset);
      auto [corrected, report] =
          correct_alignment(hyp, structure, tree, loaded.schema, loaded.phoneset, cfg.min_dur);
      res.corrected_text = serialize_label_file(corrected);
      for (const BoundaryShift& b : report.boundaries) {
        res.report_rows += csv_field(ids[i]);
        res.report_rows += ',';
        res.report_rows += std::to_string(b.phone_index);
        res.report_rows += ',';
        res.report_rows += csv_field(hyp[b.phone_index].phone);
        res.report_rows += ',';
        res.report_rows += format_real(b.predicted_shift);
        res.report_rows += ',';
        res.report_rows += format_real(b.applied_shift);
        res.report_rows += ',';
        res.report_rows += b.clamped ? "true" : "false";
        res.report_rows += '\n';
      }
      res.clamped = report.clamped_count();
      res.boundaries = report.boundaries.size();
    } catch (const std::exception& e) {
      res.error = e.what();
    }
  });

  std::string report_csv =
      "utterance_id,phone_index,phone,predicted_shift,applied_shift,clamped\n";
  std::size_t clamped = 0, boundaries = 0;
  std::vector<UtteranceError> errors;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!results[i].error.empty()) {
      errors.push_back({ids[i], results[i].error});
      continue;
    }
    write_file(fs::path(cfg.out_dir) / "corrected" / (ids[i] + ".lab"),
               results[i].corrected_text);
    report_csv += results[i].report_rows;
    clamped += results[i].clamped;
    boundaries += results[i].boundaries;
  }
  write_file(fs::path(cfg.out_dir) / "correction_report.csv", report_csv);
  out << "corrected " << ids.size() - errors.size() << " utterances: " << boundaries
      << " boundaries shifted, " << clamped << " clamped\n";
  return finish(errors, cfg.out_dir, err);
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Loaded loaded = load_phoneset_and_schema(cfg);
  std::optional<SymbolMap> symbol_map;
  if (!cfg.symbol_map.empty())
    symbol_map = parse_symbol_map(read_file(cfg.symbol_map), loaded.phoneset);
  const fs::path corrected_dir = fs::path(cfg.out_dir) / "corrected";

  const auto ids = list_utterance_ids(cfg.ref_dir, ".lab");
  struct Result {
    std::vector<BoundaryErrorRecord> before, after;
    std::vector<std::string> before_labels, after_labels;
    std::string error;
  };
  std::vector<Result> results(ids.size());

  parallel_for(ids.size(), [&](std::size_t i) {
    Result& res = results[i];
    try {
      const Alignment ref = load_alignment(cfg.ref_dir, ids[i], loaded.phoneset);
      const Alignment hyp = load_alignment(cfg.hyp_dir, ids[i], loaded.phoneset);
      const Alignment cor = load_alignment(corrected_dir, ids[i], loaded.phoneset);
      const UtteranceStructure structure =
          load_structure(cfg.struct_dir, ids[i], loaded.phoneset);
      CompareOptions opts;
      opts.symbol_map = symbol_map ? &*symbol_map : nullptr;
      opts.iou_threshold = cfg.iou_threshold;
      res.before = compute_errors(pair_alignments(ref, hyp, loaded.phoneset, opts), ids[i]);
      res.after = compute_errors(pair_alignments(ref, cor, loaded.phoneset, opts), ids[i]);
      for (const BoundaryErrorRecord& r : res.before)
        res.before_labels.push_back(triphone_class(loaded.phoneset, structure,
                                                   static_cast<std::size_t>(r.phone_index)));
      for (const BoundaryErrorRecord& r : res.after)
        res.after_labels.push_back(triphone_class(loaded.phoneset, structure,
                                                  static_cast<std::size_t>(r.phone_index)));
    } catch (const std::exception& e) {
      res.error = e.what();
    }
  });

  std::vector<UtteranceError> errors;
  std::vector<std::string> ok_ids;
  std::map<std::string, const Result*> by_id;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!results[i].error.empty()) {
      errors.push_back({ids[i], results[i].error});
      continue;
    }
    ok_ids.push_back(ids[i]);
    by_id[ids[i]] = &results[i];
  }

  const SplitIds split = split_utterances(ok_ids, cfg.split, cfg.split_seed);
  auto gather = [&](const std::vector<std::string>& subset, bool corrected) {
    std::vector<BoundaryErrorRecord> records;
    for (const std::string& id : subset) {
      const Result* r = by_id.at(id);
      const auto& src = corrected ? r->after : r->before;
      records.insert(records.end(), src.begin(), src.end());
    }
    return records;
  };

  std::string csv =
      "variant,split,total_error,mean_error,stddev,boundary_count,significant_count,"
      "improvement\n";
  std::map<std::string, CorpusMetrics> metrics;
  for (const bool corrected : {false, true}) {
    for (const auto& [split_name, subset] :
         {std::pair{"train", &split.train}, std::pair{"test", &split.test}}) {
      if (subset->empty()) continue;
      const auto records = gather(*subset, corrected);
      if (records.empty()) continue;
      const CorpusMetrics m = corpus_metrics(records);
      metrics[std::string(corrected ? "corrected" : "uncorrected") + "/" + split_name] = m;
      csv += std::string(corrected ? "corrected" : "uncorrected") + "," + split_name + "," +
             format_real(m.total_error) + "," + format_real(m.mean_error) + "," +
             format_real(m.stddev) + "," + std::to_string(m.boundary_count) + "," +
             std::to_string(m.significant_count) + ",";
      if (corrected && metrics.count("uncorrected/" + std::string(split_name)))
        csv += format_real(
            improvement(metrics.at("uncorrected/" + std::string(split_name)), m));
      csv += '\n';
    }
  }
  write_file(fs::path(cfg.out_dir) / "metrics.csv", csv);

  // Per-triphone-class table over the test split (falls back to the train
  // split when the split leaves no test utterances).
  const std::vector<std::string>& tri_subset = split.test.empty() ? split.train : split.test;
  std::vector<BoundaryErrorRecord> before_records, after_records;
  std::vector<std::string> before_labels, after_labels;
  for (const std::string& id : tri_subset) {
    const Result* r = by_id.at(id);
    before_records.insert(before_records.end(), r->before.begin(), r->before.end());
    after_records.insert(after_records.end(), r->after.begin(), r->after.end());
    before_labels.insert(before_labels.end(), r->before_labels.begin(), r->before_labels.end());
    after_labels.insert(after_labels.end(), r->after_labels.begin(), r->after_labels.end());
  }
  const auto before_stats = triphone_stats(before_records, before_labels);
  const auto after_stats = triphone_stats(after_records, after_labels);
  std::string tri_csv =
      "label,count_before,count_after,mean_abs_error_before,mean_abs_error_after,"
      "mean_signed_error_before,mean_signed_error_after,share_before,share_after\n";
  for (const std::string& label : all_triphone_labels()) {
    const TriphoneStats& b = before_stats.at(label);
    const TriphoneStats& a = after_stats.at(label);
    tri_csv += csv_field(label) + "," + std::to_string(b.count) + "," + std::to_string(a.count) +
               "," + format_real(b.mean_abs_error) + "," + format_real(a.mean_abs_error) + "," +
               format_real(b.mean_signed_error) + "," + format_real(a.mean_signed_error) + "," +
               format_real(b.share_of_total_error) + "," + format_real(a.share_of_total_error) +
               "\n";
  }
  write_file(fs::path(cfg.out_dir) / "triphone.csv", tri_csv);

  for (const auto& [key, m] : metrics)
    out << key << ": total " << format_real(m.total_error) << " s over " << m.boundary_count
        << " boundaries, mean " << format_real(m.mean_error) << ", stddev "
        << format_real(m.stddev) << "\n";
  if (metrics.count("uncorrected/test") && metrics.count("corrected/test"))
    out << "test-split total error reduction: "
        << format_real(improvement(metrics.at("uncorrected/test"), metrics.at("corrected/test")) *
                       100.0)
        << "%\n";
  return finish(errors, cfg.out_dir, err);
}

}  // namespace

RunConfig RunConfig::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("bad run config: ") + e.what());
  }
  RunConfig cfg;
  cfg.phoneset = doc.value("phoneset", "");
  cfg.schema = doc.value("schema", "");
  cfg.symbol_map = doc.value("symbol_map", "");
  cfg.ref_dir = doc.value("ref_dir", "");
  cfg.hyp_dir = doc.value("hyp_dir", "");
  cfg.struct_dir = doc.value("struct_dir", "");
  cfg.out_dir = doc.value("out_dir", "");
  cfg.stop_size = doc.value("stop_size", cfg.stop_size);
  cfg.min_dur = doc.value("min_dur", cfg.min_dur);
  cfg.split = doc.value("split", cfg.split);
  cfg.split_seed = doc.value("split_seed", cfg.split_seed);
  cfg.iou_threshold = doc.value("iou_threshold", cfg.iou_threshold);
  if (!(cfg.split > 0.0 && cfg.split < 1.0))
    throw InvalidConfig("split fraction must lie in (0, 1)");
  return cfg;
}

SplitIds split_utterances(std::vector<std::string> ids, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw InvalidConfig("split fraction must lie in (0, 1)");
  std::sort(ids.begin(), ids.end());
  std::mt19937_64 rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i)
    std::swap(ids[i - 1], ids[rng() % i]);
  const std::size_t train_count =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(ids.size())));
  SplitIds split;
  split.train.assign(ids.begin(), ids.begin() + std::min(train_count, ids.size()));
  split.test.assign(ids.begin() + std::min(train_count, ids.size()), ids.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"context-dependent boundary correction for forced alignments"};
  app.require_subcommand(1);

  std::string config_path, sim_config_path, sim_out, tree_path;
  std::optional<int> stop_size;
  std::optional<double> min_dur, split_fraction, iou;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run config JSON")->required();
    cmd->add_option("--stop-size", stop_size, "leaf cluster size (5, 10, 25, 100, ...)");
    cmd->add_option("--min-dur", min_dur, "minimum segment duration in seconds");
    cmd->add_option("--split", split_fraction, "train fraction of utterances");
    cmd->add_option("--seed", seed, "train/test split seed");
    cmd->add_option("--iou", iou, "overlap threshold for position pairs");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic corpus");
  simulate->add_option("--config", sim_config_path, "simulation config JSON")->required();
  simulate->add_option("--out", sim_out, "output corpus directory")->required();
  simulate->add_option("--seed", seed, "override the config seed");

  CLI::App* compare = app.add_subcommand("compare", "pair alignments and extract errors");
  CLI::App* train = app.add_subcommand("train", "grow the correction tree");
  CLI::App* correct = app.add_subcommand("correct", "apply a tree to the hypothesis files");
  CLI::App* evaluate = app.add_subcommand("evaluate", "corpus metrics before/after correction");
  for (CLI::App* cmd : {compare, train, correct, evaluate}) add_common(cmd);
  correct->add_option("--tree", tree_path, "tree file (default: out_dir/cor.S<stop>.tree)");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (simulate->parsed()) {
      SimConfig sim_cfg = SimConfig::from_json(read_file(sim_config_path));
      if (seed) sim_cfg.seed = *seed;
      return cmd_simulate(sim_cfg, sim_out, out);
    }
    RunConfig cfg = RunConfig::from_json(read_file(config_path));
    if (stop_size) cfg.stop_size = *stop_size;
    if (min_dur) cfg.min_dur = *min_dur;
    if (split_fraction) cfg.split = *split_fraction;
    if (seed) cfg.split_seed = *seed;
    if (iou) cfg.iou_threshold = *iou;
    if (compare->parsed()) return cmd_compare(cfg, out, err);
    if (train->parsed()) return cmd_train(cfg, out, err);
    if (correct->parsed()) return cmd_correct(cfg, tree_path, out, err);
    if (evaluate->parsed()) return cmd_evaluate(cfg, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "no subcommand\n";
  return 2;
}

}  // namespace segcor::cli
