#include "segcor/cart.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace segcor {

namespace {

double clamp_nonneg(double x) { return x < 0.0 ? 0.0 : x; }

// Sum of squared deviations from the mean, via sums. Negative results are
// cancellation noise on near-constant targets.
double sse(double sum, double sumsq, double count) {
  return clamp_nonneg(sumsq - sum * sum / count);
}

struct Candidate {
  bool valid = false;
  double child_sse = std::numeric_limits<double>::infinity();
  int feature = -1;
  bool categorical = true;
  int category_id = -1;
  double threshold = 0.0;
};

// Column-major view of the training targets and feature values. Categorical
// values are interned as indices into the schema domain.
struct Columns {
  std::vector<double> targets;
  std::vector<std::vector<int>> cat;       // [feature][example], -1 for numeric features
  std::vector<std::vector<std::int64_t>> num;
  std::vector<std::vector<int>> domain_order;  // domain ids in lexicographic order
};

Columns build_columns(const std::vector<TrainingExample>& examples,
                      const FeatureSchema& schema) {
  Columns cols;
  const std::size_t n = examples.size();
  const std::size_t nf = schema.size();
  cols.targets.reserve(n);
  cols.cat.resize(nf);
  cols.num.resize(nf);
  cols.domain_order.resize(nf);

  for (std::size_t f = 0; f < nf; ++f) {
    const FeatureDef& def = schema.at(f);
    if (def.kind == FeatureKind::Categorical) {
      cols.cat[f].reserve(n);
      std::vector<int> order(def.domain.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return def.domain[a] < def.domain[b]; });
      cols.domain_order[f] = std::move(order);
    } else {
      cols.num[f].reserve(n);
    }
  }

  for (const TrainingExample& ex : examples) {
    if (ex.senone.schema_hash != schema.hash())
      throw SchemaMismatch(schema.hash(), ex.senone.schema_hash);
    if (ex.senone.values.size() != schema.size())
      throw SchemaMismatch(schema.hash(), "senone of width " +
                                              std::to_string(ex.senone.values.size()));
    cols.targets.push_back(ex.target);
    for (std::size_t f = 0; f < nf; ++f) {
      const FeatureDef& def = schema.at(f);
      const FeatureValue& v = ex.senone.values[f];
      if (def.kind == FeatureKind::Categorical) {
        const std::string& s = std::get<std::string>(v);
        auto it = std::find(def.domain.begin(), def.domain.end(), s);
        if (it == def.domain.end())
          throw SchemaError("value '" + s + "' of feature '" + def.name +
                            "' is outside the schema domain");
        cols.cat[f].push_back(static_cast<int>(it - def.domain.begin()));
      } else {
        cols.num[f].push_back(std::get<std::int64_t>(v));
      }
    }
  }
  return cols;
}

Candidate best_question(const Columns& cols, const FeatureSchema& schema,
                        const std::vector<int>& idx, int stop_size) {
  const int n = static_cast<int>(idx.size());
  Candidate best;

  for (std::size_t f = 0; f < schema.size(); ++f) {
    const FeatureDef& def = schema.at(f);
    if (def.kind == FeatureKind::Categorical) {
      const std::vector<int>& values = cols.cat[f];
      const std::size_t dom = def.domain.size();
      std::vector<double> sum(dom, 0.0), sumsq(dom, 0.0);
      std::vector<int> cnt(dom, 0);
      double tot_sum = 0.0, tot_sumsq = 0.0;
      for (int i : idx) {
        const int v = values[i];
        const double t = cols.targets[i];
        ++cnt[v];
        sum[v] += t;
        sumsq[v] += t * t;
        tot_sum += t;
        tot_sumsq += t * t;
      }
      for (int v : cols.domain_order[f]) {
        const int cy = cnt[v];
        if (cy < stop_size || n - cy < stop_size) continue;
        const double child = sse(sum[v], sumsq[v], cy) +
                             sse(tot_sum - sum[v], tot_sumsq - sumsq[v], n - cy);
        if (child < best.child_sse) {
          best = {true, child, static_cast<int>(f), true, v, 0.0};
        }
      }
    } else {
      const std::vector<std::int64_t>& values = cols.num[f];
      std::vector<std::pair<std::int64_t, double>> sorted;
      sorted.reserve(idx.size());
      for (int i : idx) sorted.emplace_back(values[i], cols.targets[i]);
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double tot_sum = 0.0, tot_sumsq = 0.0;
      for (const auto& [v, t] : sorted) {
        tot_sum += t;
        tot_sumsq += t * t;
      }
      double left_sum = 0.0, left_sumsq = 0.0;
      for (int k = 0; k < n - 1; ++k) {
        const double t = sorted[k].second;
        left_sum += t;
        left_sumsq += t * t;
        if (sorted[k].first == sorted[k + 1].first) continue;  // not a boundary
        const int cy = k + 1;
        if (cy < stop_size || n - cy < stop_size) continue;
        const double child = sse(left_sum, left_sumsq, cy) +
                             sse(tot_sum - left_sum, tot_sumsq - left_sumsq, n - cy);
        if (child < best.child_sse) {
          const double thr =
              (static_cast<double>(sorted[k].first) + static_cast<double>(sorted[k + 1].first)) /
              2.0;
          best = {true, child, static_cast<int>(f), false, -1, thr};
        }
      }
    }
  }
  return best;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

bool needs_quoting(const std::string& s) {
  if (s.empty()) return true;
  for (char c : s)
    if (c == ' ' || c == '\t' || c == '\n' || c == '(' || c == ')' || c == '"' || c == '\\')
      return true;
  return false;
}

std::string quote_atom(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

// --- s-expression tokenizer/parser for tree files ---

struct Token {
  enum Type { LParen, RParen, Atom, End } type;
  std::string text;
  std::size_t pos;
};

class Lexer {
public:
  Lexer(const std::string& text, std::size_t start) : text_(text), pos_(start) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size()) return {Token::End, "", pos_};
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      return {Token::LParen, "(", start};
    }
    if (c == ')') {
      ++pos_;
      return {Token::RParen, ")", start};
    }
    if (c == '"') {
      ++pos_;
      std::string out;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        out += text_[pos_++];
      }
      if (pos_ >= text_.size()) throw TreeParseError(start, "unterminated quoted atom");
      ++pos_;
      return {Token::Atom, out, start};
    }
    std::string out;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')')
      out += text_[pos_++];
    return {Token::Atom, out, start};
  }

  Token peek() {
    const std::size_t save = pos_;
    Token t = next();
    pos_ = save;
    return t;
  }

private:
  const std::string& text_;
  std::size_t pos_;
};

double parse_real(const Token& t) {
  char* end = nullptr;
  const double v = std::strtod(t.text.c_str(), &end);
  if (end != t.text.c_str() + t.text.size() || t.text.empty())
    throw TreeParseError(t.pos, "expected a number, got '" + t.text + "'");
  return v;
}

long parse_count(const Token& t) {
  char* end = nullptr;
  const long v = std::strtol(t.text.c_str(), &end, 10);
  if (end != t.text.c_str() + t.text.size() || t.text.empty() || v < 0)
    throw TreeParseError(t.pos, "expected a count, got '" + t.text + "'");
  return v;
}

int parse_node(Lexer& lex, const FeatureSchema& schema,
               std::vector<RegressionTree::Node>& nodes) {
  Token t = lex.next();
  if (t.type != Token::LParen) throw TreeParseError(t.pos, "expected '('");
  Token inner = lex.next();
  if (inner.type != Token::LParen) throw TreeParseError(inner.pos, "expected '('");

  std::vector<Token> atoms;
  while (true) {
    Token a = lex.next();
    if (a.type == Token::RParen) break;
    if (a.type != Token::Atom) throw TreeParseError(a.pos, "expected an atom");
    atoms.push_back(std::move(a));
    if (atoms.size() > 3) throw TreeParseError(atoms.back().pos, "too many atoms in node head");
  }
  if (atoms.size() != 3) throw TreeParseError(t.pos, "node head must have three atoms");

  const int slot = static_cast<int>(nodes.size());
  nodes.emplace_back();

  Token after = lex.peek();
  if (after.type == Token::RParen) {
    // leaf: ((mean stddev count))
    lex.next();
    RegressionTree::Node& node = nodes[slot];
    node.is_leaf = true;
    node.mean = parse_real(atoms[0]);
    node.stddev = parse_real(atoms[1]);
    node.count = parse_count(atoms[2]);
    return slot;
  }

  // question: ((name is value) yes no) or ((name <= threshold) yes no)
  RegressionTree::Node& node = nodes[slot];
  node.is_leaf = false;
  std::size_t feature_index;
  try {
    feature_index = schema.index_of(atoms[0].text);
  } catch (const SchemaError&) {
    throw TreeParseError(atoms[0].pos, "unknown feature '" + atoms[0].text + "'");
  }
  nodes[slot].feature = static_cast<int>(feature_index);
  if (atoms[1].text == "is") {
    nodes[slot].categorical = true;
    nodes[slot].category = atoms[2].text;
  } else if (atoms[1].text == "<=") {
    nodes[slot].categorical = false;
    nodes[slot].threshold = parse_real(atoms[2]);
  } else {
    throw TreeParseError(atoms[1].pos, "question operator must be 'is' or '<='");
  }

  const int yes = parse_node(lex, schema, nodes);
  const int no = parse_node(lex, schema, nodes);
  nodes[slot].yes = yes;
  nodes[slot].no = no;

  Token close = lex.next();
  if (close.type != Token::RParen) throw TreeParseError(close.pos, "expected ')'");
  return slot;
}

}  // namespace

RegressionTree RegressionTree::train(const std::vector<TrainingExample>& examples,
                                     int stop_size, const FeatureSchema& schema) {
  if (examples.empty()) throw EmptyExamples();
  if (stop_size < 1) throw InvalidConfig("stop_size must be >= 1");

  const Columns cols = build_columns(examples, schema);

  RegressionTree tree;
  tree.schema_hash_ = schema.hash();

  std::vector<int> root_idx(examples.size());
  std::iota(root_idx.begin(), root_idx.end(), 0);

  struct Task {
    int slot;
    std::vector<int> idx;
  };
  std::vector<Task> stack;
  tree.nodes_.emplace_back();
  stack.push_back({0, std::move(root_idx)});

  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    const std::vector<int>& idx = task.idx;
    const int n = static_cast<int>(idx.size());

    double sum = 0.0, sumsq = 0.0;
    for (int i : idx) {
      sum += cols.targets[i];
      sumsq += cols.targets[i] * cols.targets[i];
    }
    const double parent_sse = sse(sum, sumsq, n);

    Candidate cand;
    if (n >= 2 * stop_size) cand = best_question(cols, schema, idx, stop_size);
    const bool improves = cand.valid && parent_sse - cand.child_sse > 0.0;

    if (!improves) {
      Node& node = tree.nodes_[task.slot];
      node.is_leaf = true;
      node.count = n;
      node.mean = sum / n;
      node.stddev = std::sqrt(clamp_nonneg(sumsq / n - node.mean * node.mean));
      continue;
    }

    std::vector<int> yes_idx, no_idx;
    yes_idx.reserve(idx.size());
    no_idx.reserve(idx.size());
    for (int i : idx) {
      const bool yes = cand.categorical ? cols.cat[cand.feature][i] == cand.category_id
                                        : static_cast<double>(cols.num[cand.feature][i]) <=
                                              cand.threshold;
      (yes ? yes_idx : no_idx).push_back(i);
    }

    const int yes_slot = static_cast<int>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    const int no_slot = static_cast<int>(tree.nodes_.size());
    tree.nodes_.emplace_back();

    Node& node = tree.nodes_[task.slot];
    node.is_leaf = false;
    node.feature = cand.feature;
    node.categorical = cand.categorical;
    if (cand.categorical)
      node.category = schema.at(cand.feature).domain[cand.category_id];
    else
      node.threshold = cand.threshold;
    node.yes = yes_slot;
    node.no = no_slot;

    stack.push_back({no_slot, std::move(no_idx)});
    stack.push_back({yes_slot, std::move(yes_idx)});
  }
  return tree;
}

double RegressionTree::predict(const Senone& senone) const {
  if (senone.schema_hash != schema_hash_)
    throw SchemaMismatch(schema_hash_, senone.schema_hash);
  const Node* node = &nodes_[0];
  while (!node->is_leaf) {
    const FeatureValue& v = senone.values[node->feature];
    bool yes;
    if (node->categorical)
      yes = std::holds_alternative<std::string>(v) && std::get<std::string>(v) == node->category;
    else
      yes = static_cast<double>(std::get<std::int64_t>(v)) <= node->threshold;
    node = &nodes_[yes ? node->yes : node->no];
  }
  return node->mean;
}

TreeMetrics RegressionTree::evaluate(const std::vector<TrainingExample>& examples) const {
  if (examples.empty()) throw EmptyExamples();
  const std::size_t n = examples.size();
  std::vector<double> preds(n), targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    preds[i] = predict(examples[i].senone);
    targets[i] = examples[i].target;
  }

  TreeMetrics m;
  double se = 0.0, err = 0.0, abserr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = preds[i] - targets[i];
    se += d * d;
    err += d;
    abserr += std::abs(d);
  }
  m.rmse = std::sqrt(se / n);
  m.mean_error = err / n;
  m.mean_abs_error = abserr / n;

  // Pearson correlation; a constant series has zero variance by definition
  // and yields 0 by convention.
  const bool const_p = std::all_of(preds.begin(), preds.end(),
                                   [&](double v) { return v == preds[0]; });
  const bool const_t = std::all_of(targets.begin(), targets.end(),
                                   [&](double v) { return v == targets[0]; });
  if (const_p || const_t) {
    m.correlation = 0.0;
    return m;
  }
  double mean_p = 0.0, mean_t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_p += preds[i];
    mean_t += targets[i];
  }
  mean_p /= n;
  mean_t /= n;
  double sp = 0.0, st = 0.0, spt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dp = preds[i] - mean_p;
    const double dt = targets[i] - mean_t;
    sp += dp * dp;
    st += dt * dt;
    spt += dp * dt;
  }
  m.correlation = (sp == 0.0 || st == 0.0) ? 0.0 : spt / std::sqrt(sp * st);
  return m;
}

std::string RegressionTree::serialize(const FeatureSchema& schema) const {
  if (schema.hash() != schema_hash_) throw SchemaMismatch(schema_hash_, schema.hash());
  std::string out = ";; schema " + schema_hash_ + "\n";

  // iterative pre-order emit; Item is either a literal or a node reference
  struct Item {
    int slot = -1;
    const char* literal = nullptr;
  };
  std::vector<Item> stack{{0, nullptr}};
  while (!stack.empty()) {
    Item item = stack.back();
    stack.pop_back();
    if (item.literal) {
      out += item.literal;
      continue;
    }
    const Node& node = nodes_[item.slot];
    if (node.is_leaf) {
      out += "((" + format_real(node.mean) + " " + format_real(node.stddev) + " " +
             std::to_string(node.count) + "))";
      continue;
    }
    out += "((" + quote_atom(schema.at(node.feature).name);
    if (node.categorical)
      out += " is " + quote_atom(node.category);
    else
      out += " <= " + format_real(node.threshold);
    out += ") ";
    stack.push_back({-1, ")"});
    stack.push_back({node.no, nullptr});
    stack.push_back({-1, " "});
    stack.push_back({node.yes, nullptr});
  }
  out += "\n";
  return out;
}

RegressionTree RegressionTree::parse(const std::string& text, const FeatureSchema& schema) {
  const std::string header = ";; schema ";
  if (text.rfind(header, 0) != 0) throw SchemaHashMissing();
  const std::size_t eol = text.find('\n');
  if (eol == std::string::npos) throw SchemaHashMissing();
  const std::string hash = text.substr(header.size(), eol - header.size());
  if (hash.empty()) throw SchemaHashMissing();
  if (hash != schema.hash()) throw SchemaMismatch(schema.hash(), hash);

  RegressionTree tree;
  tree.schema_hash_ = hash;
  Lexer lex(text, eol + 1);
  parse_node(lex, schema, tree.nodes_);
  Token rest = lex.next();
  if (rest.type != Token::End)
    throw TreeParseError(rest.pos, "trailing content after the tree");
  return tree;
}

std::size_t RegressionTree::leaf_count() const {
  std::size_t n = 0;
  for (const Node& node : nodes_)
    if (node.is_leaf) ++n;
  return n;
}

long RegressionTree::min_leaf_count() const {
  long best = std::numeric_limits<long>::max();
  for (const Node& node : nodes_)
    if (node.is_leaf) best = std::min(best, node.count);
  return best;
}

}  // namespace segcor
