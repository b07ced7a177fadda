#pragma once

// Core domain types for constituency trees: tokens, half-open spans,
// tree nodes, and span-set extraction. Spans are 1-based: [b, e) covers
// the b-th through (e-1)-th word of the sentence.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace treeavg {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Token {
  std::string surface;
  int index = 0;  // 1-based position in the sentence
};

inline bool operator==(const Token& a, const Token& b) {
  return a.index == b.index && a.surface == b.surface;
}
inline bool operator!=(const Token& a, const Token& b) { return !(a == b); }

struct Span {
  int begin = 0;  // 1-based, inclusive
  int end = 0;    // exclusive
  int width() const { return end - begin; }
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Node {
  Span span;
  std::string label;           // empty when unlabeled
  std::vector<Node> children;  // empty for leaves
  bool is_leaf() const { return children.empty(); }
};

inline bool operator==(const Node& a, const Node& b) {
  return a.span == b.span && a.label == b.label && a.children == b.children;
}
inline bool operator!=(const Node& a, const Node& b) { return !(a == b); }

struct Tree {
  std::vector<Token> tokens;
  Node root;
  int size() const { return static_cast<int>(tokens.size()); }
};

inline bool operator==(const Tree& a, const Tree& b) {
  return a.tokens == b.tokens && a.root == b.root;
}
inline bool operator!=(const Tree& a, const Tree& b) { return !(a == b); }

// A set of constituent spans, with labels kept on the spans that carry one.
struct SpanSet {
  std::set<Span> spans;
  std::map<Span, std::string> labels;
  bool contains(Span s) const { return spans.count(s) != 0; }
  std::size_t size() const { return spans.size(); }
  bool empty() const { return spans.empty(); }
};

inline bool same_token_surfaces(const Tree& a, const Tree& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i)
    if (a.tokens[i].surface != b.tokens[i].surface) return false;
  return true;
}

namespace detail {

inline std::size_t intersection_size(const std::set<Span>& a,
                                     const std::set<Span>& b) {
  std::size_t hits = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib)
      ++ia;
    else if (*ib < *ia)
      ++ib;
    else {
      ++hits;
      ++ia;
      ++ib;
    }
  }
  return hits;
}

inline void collect_spans(const Node& node, int n, bool include_trivial,
                          SpanSet& out) {
  const bool trivial =
      node.span.width() == 1 || (node.span.begin == 1 && node.span.end == n + 1);
  if (include_trivial || !trivial) {
    out.spans.insert(node.span);
    if (!node.label.empty()) out.labels.emplace(node.span, node.label);
  }
  for (const Node& child : node.children) collect_spans(child, n, include_trivial, out);
}

// Merging a unary chain keeps the topmost non-empty label, so a bare
// wrapper around a labeled subtree does not erase the label.
inline Node collapse_unary(Node node) {
  for (Node& child : node.children) child = collapse_unary(std::move(child));
  if (node.children.size() == 1) {
    Node child = std::move(node.children.front());
    if (!node.label.empty()) child.label = node.label;
    return child;
  }
  return node;
}

inline void validate_node(const Node& node, int n) {
  if (node.span.begin < 1 || node.span.end > n + 1 || node.span.width() < 1)
    throw ValidationError("node span out of range");
  if (node.is_leaf()) {
    if (node.span.width() != 1)
      throw ValidationError("leaf node must cover exactly one token");
    return;
  }
  if (node.children.size() == 1)
    throw ValidationError("unary chain not collapsed");
  int at = node.span.begin;
  for (const Node& child : node.children) {
    if (child.span.begin != at)
      throw ValidationError("children do not tile the parent span");
    at = child.span.end;
    validate_node(child, n);
  }
  if (at != node.span.end)
    throw ValidationError("children do not cover the parent span");
}

}  // namespace detail

// All node spans of the tree. With include_trivial, single-token spans and
// the whole-sentence span are kept; otherwise both are dropped.
inline SpanSet constituents(const Tree& tree, bool include_trivial) {
  SpanSet out;
  detail::collect_spans(tree.root, tree.size(), include_trivial, out);
  return out;
}

inline bool is_binary_node(const Node& node) {
  if (node.is_leaf()) return true;
  if (node.children.size() != 2) return false;
  return is_binary_node(node.children[0]) && is_binary_node(node.children[1]);
}

inline bool is_binary(const Tree& tree) { return is_binary_node(tree.root); }

// Checks every structural invariant; throws ValidationError on the first
// violation. Trees built by this library satisfy these by construction.
inline void validate(const Tree& tree) {
  const int n = tree.size();
  if (n == 0) throw ValidationError("tree has no tokens");
  for (int i = 0; i < n; ++i) {
    const Token& tok = tree.tokens[i];
    if (tok.index != i + 1) throw ValidationError("token indices must be 1..n");
    if (tok.surface.empty()) throw ValidationError("empty token surface");
    for (char c : tok.surface)
      if (c == ' ' || c == '\t' || c == '(' || c == ')')
        throw ValidationError("token surface contains whitespace or parentheses");
  }
  if (tree.root.span != Span{1, n + 1})
    throw ValidationError("root span must cover the whole sentence");
  detail::validate_node(tree.root, n);
}

enum class Direction { left, right };

namespace detail {

inline Node branching_node(int b, int e, Direction d) {
  if (e - b == 1) return Node{{b, e}, "", {}};
  if (d == Direction::right)
    return Node{{b, e}, "", {Node{{b, b + 1}, "", {}}, branching_node(b + 1, e, d)}};
  return Node{{b, e}, "", {branching_node(b, e - 1, d), Node{{e - 1, e}, "", {}}}};
}

}  // namespace detail

inline Tree branching_tree(std::vector<std::string> words, Direction d) {
  if (words.empty()) throw std::invalid_argument("branching_tree: zero tokens");
  Tree tree;
  tree.tokens.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i)
    tree.tokens.push_back({std::move(words[i]), static_cast<int>(i) + 1});
  tree.root = detail::branching_node(1, static_cast<int>(tree.tokens.size()) + 1, d);
  return tree;
}

// Placeholder surfaces w1..wn.
inline Tree branching_tree(int n, Direction d) {
  if (n < 1) throw std::invalid_argument("branching_tree: zero tokens");
  std::vector<std::string> words;
  words.reserve(n);
  for (int i = 1; i <= n; ++i) words.push_back("w" + std::to_string(i));
  return branching_tree(std::move(words), d);
}

namespace detail {

// new_index[i] maps an old 1-based token index to its 1-based position
// among the survivors, or 0 if dropped.
template <typename Rebuild>
inline std::vector<Node> rebuild_children(const Node& node, Rebuild&& rebuild) {
  std::vector<Node> kept;
  for (const Node& child : node.children)
    if (auto r = rebuild(child)) kept.push_back(std::move(*r));
  return kept;
}

}  // namespace detail

// Drops every token matching `drop`, deletes emptied nodes, collapses the
// resulting unary chains, and re-indexes the survivors 1..m.
template <typename Pred>
inline Tree strip_tokens(const Tree& tree, Pred&& drop) {
  const int n = tree.size();
  std::vector<int> new_index(n + 1, 0);
  Tree out;
  for (int i = 1; i <= n; ++i) {
    const Token& tok = tree.tokens[i - 1];
    if (drop(tok)) continue;
    new_index[i] = static_cast<int>(out.tokens.size()) + 1;
    out.tokens.push_back({tok.surface, new_index[i]});
  }
  if (out.tokens.empty())
    throw ValidationError("strip_tokens: all tokens dropped");

  struct Rebuilder {
    const std::vector<int>& new_index;
    std::optional<Node> operator()(const Node& node) const {
      if (node.is_leaf()) {
        const int m = new_index[node.span.begin];
        if (m == 0) return std::nullopt;
        return Node{{m, m + 1}, node.label, {}};
      }
      std::vector<Node> kept = detail::rebuild_children(node, *this);
      if (kept.empty()) return std::nullopt;
      if (kept.size() == 1) {
        Node child = std::move(kept.front());
        if (!node.label.empty()) child.label = node.label;
        return child;
      }
      Node rebuilt;
      rebuilt.span = {kept.front().span.begin, kept.back().span.end};
      rebuilt.label = node.label;
      rebuilt.children = std::move(kept);
      return rebuilt;
    }
  };
  auto rebuilt = Rebuilder{new_index}(tree.root);
  out.root = std::move(*rebuilt);  // non-empty: at least one token survived
  return out;
}

}  // namespace treeavg
