#pragma once

// Averaging constituency trees over multiple parsers' outputs.
//
// The average of K trees on one sentence is the unlabeled binary tree
// whose constituents appear most often in the K outputs: maximizing the
// summed F1 against all K trees reduces to maximizing the total hit count
// of the chosen constituents, which a CYK-style dynamic program solves
// exactly in O(n^3). Brute-force enumeration oracles for small sentences
// live here too, so the DP can be checked against exhaustive search.

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "treeavg/tree.hpp"

namespace treeavg {

inline constexpr int kDefaultEnumerationCap = 12;

// Number of teacher trees containing each span, over one sentence.
// Sparse: spans absent from every teacher read as 0. Singleton spans and
// the whole-sentence span are present in every teacher, so they count k.
struct HitCountTable {
  std::vector<Token> tokens;
  int teacher_count = 0;
  std::map<Span, long long> counts;

  int size() const { return static_cast<int>(tokens.size()); }
  long long at(Span s) const {
    auto it = counts.find(s);
    return it == counts.end() ? 0 : it->second;
  }
};

namespace detail {

inline void require_aligned_teachers(const std::vector<Tree>& teachers) {
  const Tree& ref = teachers.front();
  for (std::size_t k = 1; k < teachers.size(); ++k) {
    if (teachers[k].size() != ref.size())
      throw ValidationError("teacher " + std::to_string(k + 1) +
                            " has a different token count");
    for (int i = 0; i < ref.size(); ++i)
      if (teachers[k].tokens[i].surface != ref.tokens[i].surface)
        throw ValidationError("teacher " + std::to_string(k + 1) +
                              " token mismatch at index " + std::to_string(i + 1) +
                              ": '" + teachers[k].tokens[i].surface + "' vs '" +
                              ref.tokens[i].surface + "'");
  }
}

}  // namespace detail

inline HitCountTable hit_counts(const std::vector<Tree>& teachers) {
  if (teachers.empty())
    throw std::invalid_argument("hit_counts: at least one teacher required");
  detail::require_aligned_teachers(teachers);
  HitCountTable table;
  table.tokens = teachers.front().tokens;
  table.teacher_count = static_cast<int>(teachers.size());
  for (const Tree& teacher : teachers)
    for (const Span& span : constituents(teacher, true).spans)
      ++table.counts[span];
  return table;
}

struct AvgTreeResult;
class Chart;
inline AvgTreeResult avg_tree(const HitCountTable& hits);

// Triangular chart of the dynamic program: per span the best total hit
// count and the split that attains it (the smallest such split).
class Chart {
 public:
  explicit Chart(int n)
      : n_(n),
        h_(static_cast<std::size_t>(n) * (n + 1), 0),
        split_(static_cast<std::size_t>(n) * (n + 1), 0) {}

  int size() const { return n_; }

  long long h(Span s) const { return h_[index(s)]; }

  // Defined for spans of width >= 2.
  int split(Span s) const {
    if (s.width() < 2) throw std::out_of_range("split: span width must be >= 2");
    return split_[index(s)];
  }

  long long split_evaluations() const { return split_evaluations_; }

 private:
  std::size_t index(Span s) const {
    if (s.begin < 1 || s.end > n_ + 1 || s.width() < 1)
      throw std::out_of_range("span outside chart");
    return static_cast<std::size_t>(s.begin - 1) * (n_ + 1) + (s.end - 1);
  }

  int n_;
  std::vector<long long> h_;
  std::vector<int> split_;
  long long split_evaluations_ = 0;

  friend AvgTreeResult avg_tree(const HitCountTable& hits);
};

struct AvgTreeResult {
  Tree tree;
  Chart chart;
  long long objective() const {
    return chart.h({1, chart.size() + 1});
  }
};

// The unlabeled binary tree with the highest total hit count, found by
// the CYK-style recursion. Ties at every argmax go to the smallest split,
// making the output deterministic.
inline AvgTreeResult avg_tree(const HitCountTable& hits) {
  const int n = hits.size();
  if (n < 1) throw std::invalid_argument("avg_tree: empty sentence");
  Chart chart(n);
  // Dense per-sentence view of the sparse counts.
  std::vector<long long> cnt(static_cast<std::size_t>(n) * (n + 1), 0);
  const auto at = [n](int b, int e) {
    return static_cast<std::size_t>(b - 1) * (n + 1) + (e - 1);
  };
  for (const auto& [span, c] : hits.counts) {
    if (span.begin < 1 || span.end > n + 1 || span.width() < 1)
      throw ValidationError("hit count span outside the sentence");
    cnt[at(span.begin, span.end)] = c;
  }
  for (int b = 1; b <= n; ++b) chart.h_[at(b, b + 1)] = hits.teacher_count;
  for (int l = 2; l <= n; ++l) {
    for (int b = 1; b + l <= n + 1; ++b) {
      const int e = b + l;
      long long best = -1;
      int best_j = 0;
      for (int j = b + 1; j < e; ++j) {
        ++chart.split_evaluations_;
        const long long v = chart.h_[at(b, j)] + chart.h_[at(j, e)];
        if (v > best) {
          best = v;
          best_j = j;
        }
      }
      chart.h_[at(b, e)] = best + cnt[at(b, e)];
      chart.split_[at(b, e)] = best_j;
    }
  }
  const std::function<Node(int, int)> build = [&](int b, int e) -> Node {
    if (e - b == 1) return Node{{b, e}, "", {}};
    const int j = chart.split_[at(b, e)];
    std::vector<Node> children;
    children.push_back(build(b, j));
    children.push_back(build(j, e));
    return Node{{b, e}, "", std::move(children)};
  };
  Tree tree;
  tree.tokens = hits.tokens;
  tree.root = build(1, n + 1);
  return {std::move(tree), std::move(chart)};
}

// Total hit count of a tree's constituents (trivial spans included); the
// quantity avg_tree maximizes.
inline long long total_hit_count(const Tree& tree, const HitCountTable& hits) {
  long long sum = 0;
  for (const Span& span : constituents(tree, true).spans) sum += hits.at(span);
  return sum;
}

namespace detail {

// Exact non-negative rational on __int128, enough headroom for summed F1
// scores over any realistic teacher count.
struct Rational {
  __int128 num = 0;
  __int128 den = 1;

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static __int128 checked_mul(__int128 a, __int128 b) {
    __int128 out;
    if (__builtin_mul_overflow(a, b, &out))
      throw std::overflow_error("F1 sum exceeds exact arithmetic range");
    return out;
  }

  void add(long long n, long long d) {
    const __int128 g = gcd128(den, d);
    num = checked_mul(num, d / g) + checked_mul(den / g, n);
    den = checked_mul(den, d / g);
    const __int128 r = gcd128(num < 0 ? -num : num, den);
    if (r > 1) {
      num /= r;
      den /= r;
    }
  }

  bool greater_than(const Rational& o) const {
    return checked_mul(num, o.den) > checked_mul(o.num, den);
  }
};

}  // namespace detail

// The teacher tree with the highest summed F1 against all teachers
// (candidates restricted to the teachers' own outputs). Ties go to the
// lowest teacher index. Scores are compared in exact rational arithmetic.
inline Tree selective_mbr(const std::vector<Tree>& teachers) {
  if (teachers.empty())
    throw std::invalid_argument("selective_mbr: empty teacher list");
  detail::require_aligned_teachers(teachers);
  std::vector<std::set<Span>> sets;
  sets.reserve(teachers.size());
  for (const Tree& t : teachers) sets.push_back(constituents(t, true).spans);
  std::size_t best = 0;
  detail::Rational best_score;
  for (std::size_t i = 0; i < teachers.size(); ++i) {
    detail::Rational score;
    for (std::size_t k = 0; k < teachers.size(); ++k) {
      const auto hits =
          static_cast<long long>(detail::intersection_size(sets[i], sets[k]));
      const auto d = static_cast<long long>(sets[i].size() + sets[k].size());
      score.add(2 * hits, d);
    }
    if (i == 0 || score.greater_than(best_score)) {
      best = i;
      best_score = score;
    }
  }
  return teachers[best];
}

namespace detail {

// Emits every binary bracketing of [b, e) in ascending (split, left,
// right) order: the same order in which the chart's smallest-split rule
// resolves ties, so a first-wins scan over this stream reproduces
// avg_tree's tie-breaking.
inline void for_each_bracketing(int b, int e,
                                const std::function<void(Node&&)>& emit) {
  if (e - b == 1) {
    emit(Node{{b, e}, "", {}});
    return;
  }
  for (int j = b + 1; j < e; ++j) {
    for_each_bracketing(b, j, [&](Node&& left) {
      const Node left_held = std::move(left);
      for_each_bracketing(j, e, [&](Node&& right) {
        std::vector<Node> children;
        children.reserve(2);
        children.push_back(left_held);
        children.push_back(std::move(right));
        emit(Node{{b, e}, "", std::move(children)});
      });
    });
  }
}

inline std::vector<Token> placeholder_tokens(int n) {
  std::vector<Token> tokens;
  tokens.reserve(n);
  for (int i = 1; i <= n; ++i) tokens.push_back({"w" + std::to_string(i), i});
  return tokens;
}

}  // namespace detail

// Streams every distinct unlabeled binary tree over the given tokens.
inline void for_each_binary_tree(const std::vector<Token>& tokens,
                                 const std::function<void(Tree&&)>& visit) {
  const int n = static_cast<int>(tokens.size());
  if (n < 1)
    throw std::invalid_argument("for_each_binary_tree: zero tokens");
  detail::for_each_bracketing(1, n + 1, [&](Node&& root) {
    visit(Tree{tokens, std::move(root)});
  });
}

// All Catalan(n-1) binary bracketings of n tokens, materialized. The cap
// guards the combinatorial explosion.
inline std::vector<Tree> enumerate_binary_trees(
    int n, int cap = kDefaultEnumerationCap) {
  if (n < 1) throw std::invalid_argument("enumerate_binary_trees: zero tokens");
  if (n > cap)
    throw std::invalid_argument("enumerate_binary_trees: " + std::to_string(n) +
                                " tokens exceeds the cap of " +
                                std::to_string(cap));
  std::vector<Tree> out;
  for_each_binary_tree(detail::placeholder_tokens(n),
                       [&](Tree&& t) { out.push_back(std::move(t)); });
  return out;
}

// Exhaustive argmax of the summed F1 against the teachers over all binary
// trees. Shares avg_tree's tie-breaking (first maximizer in split order),
// so on binary teachers the two return identical trees, not merely equal
// objectives.
inline Tree brute_force_avg(const std::vector<Tree>& teachers,
                            int cap = kDefaultEnumerationCap) {
  HitCountTable table = hit_counts(teachers);
  const int n = table.size();
  if (n > cap)
    throw std::invalid_argument("brute_force_avg: " + std::to_string(n) +
                                " tokens exceeds the cap of " +
                                std::to_string(cap));
  // With binary teachers every F1 shares the denominator 2n-1 and the
  // summed F1 is proportional to the total hit count. Otherwise each
  // teacher k contributes hits/d_k with its own constant d_k; scaling by
  // lcm(d_k) turns the sum into integer per-teacher weights.
  bool all_binary = true;
  for (const Tree& t : teachers)
    if (!is_binary(t)) all_binary = false;
  std::map<Span, __int128> weighted;
  if (all_binary) {
    for (const auto& [span, c] : table.counts) weighted[span] = c;
  } else {
    std::vector<long long> dens;
    for (const Tree& t : teachers)
      dens.push_back(2LL * n - 1 + static_cast<long long>(
                                       constituents(t, true).spans.size()));
    __int128 lcm = 1;
    for (long long d : dens)
      lcm = detail::Rational::checked_mul(lcm / detail::Rational::gcd128(lcm, d), d);
    for (std::size_t k = 0; k < teachers.size(); ++k) {
      const __int128 w = 2 * (lcm / dens[k]);
      for (const Span& span : constituents(teachers[k], true).spans)
        weighted[span] += w;
    }
  }
  const std::function<__int128(const Node&)> score_node =
      [&](const Node& node) -> __int128 {
    __int128 s = 0;
    auto it = weighted.find(node.span);
    if (it != weighted.end()) s += it->second;
    for (const Node& child : node.children) s += score_node(child);
    return s;
  };
  __int128 best_score = -1;
  Node best_root;
  detail::for_each_bracketing(1, n + 1, [&](Node&& root) {
    const __int128 s = score_node(root);
    if (s > best_score) {
      best_score = s;
      best_root = std::move(root);
    }
  });
  return Tree{table.tokens, std::move(best_root)};
}

// Best achievable binary tree against a (possibly non-binary) reference:
// the chart run with the reference as a single teacher. A binary tree's
// own span count is fixed at 2n-1 and the reference's is constant, so
// maximizing F1 reduces to maximizing the hit count.
inline Tree binary_oracle(const Tree& gold) {
  return avg_tree(hit_counts({gold})).tree;
}

}  // namespace treeavg
