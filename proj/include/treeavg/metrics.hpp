#pragma once

// Unlabeled precision/recall/F1 and corpus-level evaluation with the
// standard filtering protocol: punctuation dropped, trivial constituents
// (single words and the whole sentence) ignored, sentence-level F1
// averaged over the corpus. The library reports raw fractions in [0,1];
// percent formatting belongs to the CLI.

#include <climits>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "treeavg/tree.hpp"

namespace treeavg {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct LengthBucket {
  int lo = 1;
  int hi = INT_MAX;  // inclusive; INT_MAX for an open-ended bucket
};

inline const std::set<std::string>& default_punctuation() {
  static const std::set<std::string> punct = {
      ".",  ",",  ":", ";",     "``",    "''", "'", "`",
      "?",  "!",  "-LRB-", "-RRB-", "...", "--", "-"};
  return punct;
}

inline std::vector<LengthBucket> default_length_buckets() {
  return {{1, 10}, {11, 20}, {21, 30}, {31, 40}, {41, INT_MAX}};
}

struct EvalConfig {
  std::set<std::string> punctuation = default_punctuation();
  int min_gold_constituents = 1;
  std::vector<LengthBucket> length_buckets = default_length_buckets();
};

inline void validate_eval_config(const EvalConfig& cfg) {
  if (cfg.min_gold_constituents < 0)
    throw std::invalid_argument("min_gold_constituents must be >= 0");
  int prev_hi = 0;
  for (const LengthBucket& b : cfg.length_buckets) {
    if (b.lo < 1 || b.hi < b.lo)
      throw std::invalid_argument("invalid length bucket");
    if (b.lo <= prev_hi)
      throw std::invalid_argument("length buckets must be ordered and disjoint");
    prev_hi = b.hi;
  }
}

struct SentenceScore {
  int id = 0;       // 1-based line number
  int length = 0;   // token count after punctuation stripping
  std::optional<double> f1;  // empty when the sentence was excluded
};

struct EvalReport {
  std::vector<SentenceScore> sentences;
  std::optional<double> corpus_f1;  // mean of included sentence F1s
  int skipped = 0;
};

namespace detail {

inline void require_same_tokens(const Tree& pred, const Tree& gold) {
  if (pred.size() != gold.size())
    throw ValidationError("token count mismatch: " +
                          std::to_string(pred.size()) + " vs " +
                          std::to_string(gold.size()));
  for (int i = 0; i < pred.size(); ++i)
    if (pred.tokens[i].surface != gold.tokens[i].surface)
      throw ValidationError("token mismatch at index " + std::to_string(i + 1) +
                            ": '" + pred.tokens[i].surface + "' vs '" +
                            gold.tokens[i].surface + "'");
}

}  // namespace detail

// P = |pred∩gold|/|pred|, R = |pred∩gold|/|gold|, F1 the harmonic mean
// (computed as 2·hits/(|pred|+|gold|), which is the same quantity).
// Conventions: both sets empty -> (1,1,1); exactly one empty -> (0,0,0).
inline Prf prf(const SpanSet& pred, const SpanSet& gold) {
  const std::size_t np = pred.size();
  const std::size_t ng = gold.size();
  if (np == 0 && ng == 0) return {1.0, 1.0, 1.0};
  if (np == 0 || ng == 0) return {0.0, 0.0, 0.0};
  const auto hits =
      static_cast<double>(detail::intersection_size(pred.spans, gold.spans));
  return {hits / static_cast<double>(np), hits / static_cast<double>(ng),
          hits == 0.0 ? 0.0 : 2.0 * hits / static_cast<double>(np + ng)};
}

inline bool is_punctuation(const EvalConfig& cfg, const Token& tok) {
  return cfg.punctuation.count(tok.surface) != 0;
}

inline Tree strip_punctuation(const Tree& tree, const EvalConfig& cfg) {
  return strip_tokens(tree, [&](const Token& t) { return is_punctuation(cfg, t); });
}

// F1 of pred against gold under the filtering protocol, or nullopt when
// the sentence is excluded (filtered gold set below min_gold_constituents,
// or nothing but punctuation). Both trees must share one token sequence.
inline std::optional<double> sentence_f1(const Tree& pred, const Tree& gold,
                                         const EvalConfig& cfg) {
  detail::require_same_tokens(pred, gold);
  bool any_kept = false;
  for (const Token& tok : gold.tokens)
    if (!is_punctuation(cfg, tok)) {
      any_kept = true;
      break;
    }
  if (!any_kept) return std::nullopt;
  const Tree p = strip_punctuation(pred, cfg);
  const Tree g = strip_punctuation(gold, cfg);
  const SpanSet ps = constituents(p, false);
  const SpanSet gs = constituents(g, false);
  if (static_cast<int>(gs.size()) < cfg.min_gold_constituents)
    return std::nullopt;
  return prf(ps, gs).f1;
}

inline EvalReport corpus_eval(const std::vector<Tree>& preds,
                              const std::vector<Tree>& golds,
                              const EvalConfig& cfg) {
  if (preds.size() != golds.size())
    throw ValidationError("stream length mismatch: " +
                          std::to_string(preds.size()) + " predictions vs " +
                          std::to_string(golds.size()) + " references");
  EvalReport report;
  double sum = 0.0;
  int included = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    SentenceScore score;
    score.id = static_cast<int>(i) + 1;
    try {
      score.f1 = sentence_f1(preds[i], golds[i], cfg);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    score.length = 0;
    for (const Token& tok : golds[i].tokens)
      if (!is_punctuation(cfg, tok)) ++score.length;
    if (score.f1) {
      sum += *score.f1;
      ++included;
    } else {
      ++report.skipped;
    }
    report.sentences.push_back(score);
  }
  if (included > 0) report.corpus_f1 = sum / included;
  return report;
}

// Entry (i,j) scores model i with model j as the reference; the diagonal
// is 1 by definition. Entries are empty when every sentence was excluded.
inline std::vector<std::vector<std::optional<double>>> agreement_matrix(
    const std::vector<std::vector<Tree>>& models, const EvalConfig& cfg) {
  const std::size_t k = models.size();
  for (const auto& m : models)
    if (m.size() != models.front().size())
      throw ValidationError("model streams have different lengths");
  std::vector<std::vector<std::optional<double>>> matrix(
      k, std::vector<std::optional<double>>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      matrix[i][j] = (i == j) ? std::optional<double>(1.0)
                              : corpus_eval(models[i], models[j], cfg).corpus_f1;
  return matrix;
}

struct LabelRecall {
  std::string label;
  long long gold_count = 0;
  std::optional<double> recall;  // empty when the label never occurs
};

namespace detail {

// PTB function tags and indices ("NP-SBJ", "NP=2") count toward the bare
// category.
inline std::string label_key(const std::string& label) {
  for (std::size_t i = 1; i < label.size(); ++i)
    if (label[i] == '-' || label[i] == '=' || label[i] == '|')
      return label.substr(0, i);
  return label;
}

}  // namespace detail

// Corpus-wide recall of gold spans per label: how many gold constituents
// carrying each label also appear in the prediction's span set. Spans are
// filtered as in sentence_f1 (punctuation stripped, trivial spans ignored).
inline std::vector<LabelRecall> recall_by_label(
    const std::vector<Tree>& preds, const std::vector<Tree>& golds,
    const EvalConfig& cfg, const std::vector<std::string>& labels) {
  if (preds.size() != golds.size())
    throw ValidationError("stream length mismatch: " +
                          std::to_string(preds.size()) + " predictions vs " +
                          std::to_string(golds.size()) + " references");
  std::map<std::string, long long> total;
  std::map<std::string, long long> found;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    try {
      detail::require_same_tokens(preds[i], golds[i]);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    bool any_kept = false;
    for (const Token& tok : golds[i].tokens)
      if (!is_punctuation(cfg, tok)) any_kept = true;
    if (!any_kept) continue;
    const Tree p = strip_punctuation(preds[i], cfg);
    const Tree g = strip_punctuation(golds[i], cfg);
    const SpanSet ps = constituents(p, false);
    const SpanSet gs = constituents(g, false);
    for (const auto& [span, label] : gs.labels) {
      const std::string key = detail::label_key(label);
      ++total[key];
      if (ps.contains(span)) ++found[key];
    }
  }
  std::vector<LabelRecall> out;
  for (const std::string& label : labels) {
    const std::string key = detail::label_key(label);
    LabelRecall r;
    r.label = label;
    auto it = total.find(key);
    if (it != total.end() && it->second > 0) {
      r.gold_count = it->second;
      r.recall = static_cast<double>(found[key]) / static_cast<double>(it->second);
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct BucketScore {
  LengthBucket bucket;
  int count = 0;                   // scored sentences in the bucket
  std::optional<double> mean_f1;   // empty for an empty bucket
};

// Mean sentence F1 grouped by post-stripping sentence length.
inline std::vector<BucketScore> f1_by_length(const std::vector<Tree>& preds,
                                             const std::vector<Tree>& golds,
                                             const EvalConfig& cfg) {
  validate_eval_config(cfg);
  const EvalReport report = corpus_eval(preds, golds, cfg);
  std::vector<BucketScore> out;
  for (const LengthBucket& b : cfg.length_buckets) out.push_back({b, 0, {}});
  std::vector<double> sums(out.size(), 0.0);
  for (const SentenceScore& s : report.sentences) {
    if (!s.f1) continue;
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (s.length >= out[k].bucket.lo && s.length <= out[k].bucket.hi) {
        sums[k] += *s.f1;
        ++out[k].count;
        break;
      }
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k)
    if (out[k].count > 0) out[k].mean_f1 = sums[k] / out[k].count;
  return out;
}

}  // namespace treeavg
