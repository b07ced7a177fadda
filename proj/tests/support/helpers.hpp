#pragma once

// Shared test fixtures, generators, and independent reference
// implementations. References here deliberately avoid the library's code
// paths (linear scans instead of set intersections, explicit tree
// comparison instead of chart tie-breaking) so they can serve as oracles.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "treeavg/treeavg.hpp"

namespace testsupport {

using namespace treeavg;

// --- fixtures -------------------------------------------------------------

// The four-teacher, five-token worked example; the expected hit counts and
// chart values below were transcribed once and are frozen.
inline std::vector<std::string> fig5_teacher_lines() {
  return {
      "(((w1 w2) (w3 w4)) w5)",
      "((w1 w2) ((w3 w4) w5))",
      "(((w1 w2) w3) (w4 w5))",
      "(w1 ((w2 (w3 w4)) w5))",
  };
}

inline std::vector<Tree> fig5_teachers() {
  std::vector<Tree> out;
  for (const std::string& line : fig5_teacher_lines())
    out.push_back(parse_bracketed(line, TreeDialect::unlabeled));
  return out;
}

inline const char* fig5_average = "((w1 w2) ((w3 w4) w5))";

// --- independent references ------------------------------------------------

// Naive set arithmetic over unsorted vectors; exact rational results.
struct RationalPrf {
  long long p_num = 0, p_den = 0;
  long long r_num = 0, r_den = 0;
  long long f_num = 0, f_den = 0;
};

inline RationalPrf naive_prf(const std::vector<Span>& pred,
                             const std::vector<Span>& gold) {
  long long hits = 0;
  for (const Span& a : pred)
    for (const Span& b : gold)
      if (a == b) {
        ++hits;
        break;
      }
  RationalPrf out;
  out.p_num = hits;
  out.p_den = static_cast<long long>(pred.size());
  out.r_num = hits;
  out.r_den = static_cast<long long>(gold.size());
  out.f_num = 2 * hits;
  out.f_den = static_cast<long long>(pred.size() + gold.size());
  return out;
}

inline int64_t catalan(int m) {
  // C(0)=1; C(m) = sum C(i)C(m-1-i)
  std::vector<int64_t> c(m + 1, 0);
  c[0] = 1;
  for (int i = 1; i <= m; ++i)
    for (int j = 0; j < i; ++j) c[i] += c[j] * c[i - 1 - j];
  return c[m];
}

// Orders binary trees by split structure, topmost split first and left
// subtree before right: the order in which smallest-split tie-breaking
// resolves ties.
inline int split_lex_compare(const Node& a, const Node& b) {
  if (a.is_leaf() && b.is_leaf()) return 0;
  const int ja = a.children[1].span.begin;
  const int jb = b.children[1].span.begin;
  if (ja != jb) return ja < jb ? -1 : 1;
  if (const int c = split_lex_compare(a.children[0], b.children[0])) return c;
  return split_lex_compare(a.children[1], b.children[1]);
}

// --- random generators ------------------------------------------------------

inline std::vector<Token> tokens_w(int n, const std::string& prefix = "w") {
  std::vector<Token> tokens;
  for (int i = 1; i <= n; ++i) tokens.push_back({prefix + std::to_string(i), i});
  return tokens;
}

inline Node random_binary_node(int b, int e, std::mt19937& rng) {
  if (e - b == 1) return Node{{b, e}, "", {}};
  std::uniform_int_distribution<int> pick(b + 1, e - 1);
  const int j = pick(rng);
  std::vector<Node> ch;
  ch.push_back(random_binary_node(b, j, rng));
  ch.push_back(random_binary_node(j, e, rng));
  return Node{{b, e}, "", std::move(ch)};
}

inline Tree random_binary_tree(int n, std::mt19937& rng) {
  return Tree{tokens_w(n), random_binary_node(1, n + 1, rng)};
}

inline Node random_node(int b, int e, std::mt19937& rng, int max_arity) {
  if (e - b == 1) return Node{{b, e}, "", {}};
  const int width = e - b;
  std::uniform_int_distribution<int> arity_pick(2, std::min(max_arity, width));
  const int arity = arity_pick(rng);
  std::vector<int> cuts;
  std::uniform_int_distribution<int> cut_pick(b + 1, e - 1);
  while (static_cast<int>(cuts.size()) < arity - 1) {
    const int c = cut_pick(rng);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(e);
  std::vector<Node> ch;
  int at = b;
  for (const int cut : cuts) {
    ch.push_back(random_node(at, cut, rng, max_arity));
    at = cut;
  }
  return Node{{b, e}, "", std::move(ch)};
}

inline Tree random_tree(int n, std::mt19937& rng, int max_arity = 4) {
  return Tree{tokens_w(n), random_node(1, n + 1, rng, max_arity)};
}

// A tree with at least one node of arity >= 3 (requires n >= 3).
inline Tree random_non_binary_tree(int n, std::mt19937& rng) {
  for (;;) {
    Tree t = random_tree(n, rng, 4);
    if (!is_binary(t)) return t;
  }
}

inline std::vector<Span> random_span_vector(int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> count_pick(1, 2 * n);
  std::uniform_int_distribution<int> b_pick(1, n);
  std::vector<Span> spans;
  const int count = count_pick(rng);
  while (static_cast<int>(spans.size()) < count) {
    const int b = b_pick(rng);
    std::uniform_int_distribution<int> e_pick(b + 1, n + 1);
    const Span s{b, e_pick(rng)};
    if (std::find(spans.begin(), spans.end(), s) == spans.end())
      spans.push_back(s);
  }
  return spans;
}

inline SpanSet to_span_set(const std::vector<Span>& spans) {
  SpanSet out;
  for (const Span& s : spans) out.spans.insert(s);
  return out;
}

// Gold-style line: every internal node labeled, every leaf POS-tagged,
// with occasional extra unary wrappers.
inline std::string labeled_line(const Node& node, const std::vector<Token>& tokens,
                                std::mt19937& rng) {
  static const char* kLabels[] = {"S", "NP", "VP", "PP", "SBAR", "ADJP"};
  static const char* kTags[] = {"DT", "NN", "VBZ", "IN", "JJ"};
  std::uniform_int_distribution<int> label_pick(0, 5);
  std::uniform_int_distribution<int> tag_pick(0, 4);
  std::uniform_int_distribution<int> wrap_pick(0, 4);
  std::string out;
  if (node.is_leaf()) {
    out = "(" + std::string(kTags[tag_pick(rng)]) + " " +
          tokens[node.span.begin - 1].surface + ")";
  } else {
    out = "(" + std::string(kLabels[label_pick(rng)]);
    for (const Node& child : node.children)
      out += " " + labeled_line(child, tokens, rng);
    out += ")";
  }
  if (wrap_pick(rng) == 0)
    out = "(" + std::string(kLabels[label_pick(rng)]) + " " + out + ")";
  return out;
}

// Uniform pick from the enumerated binary trees of n tokens; the list is
// cached per n.
inline const std::vector<Tree>& all_binary_trees(int n) {
  static std::vector<std::vector<Tree>> cache(13);
  if (cache[n].empty()) cache[n] = enumerate_binary_trees(n);
  return cache[n];
}

inline Tree sample_binary_tree(int n, std::mt19937& rng) {
  const auto& trees = all_binary_trees(n);
  std::uniform_int_distribution<std::size_t> pick(0, trees.size() - 1);
  return trees[pick(rng)];
}

}  // namespace testsupport
