#pragma once

// Reading and writing trees in the one-tree-per-line bracketed format.
//
// Two dialects exist in the wild and cannot always be told apart from a
// single line. In the unlabeled dialect every atom is a token:
//     ((w1 w2) w3)
// In the labeled dialect the first atom of a multi-element list is the
// constituent label, and leaves are bare tokens or (POS token) pairs:
//     (S (NP (DT the) (NN dog)) (VP (VBZ barks)))
// auto_detect picks labeled when the root list starts with an atom and
// unlabeled otherwise; files whose dialect is known should pass it
// explicitly (a line like "(w1 (w2 w3))" is valid in both dialects and
// auto_detect will read it as labeled).

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "treeavg/tree.hpp"

namespace treeavg {

enum class TreeDialect { auto_detect, labeled, unlabeled };

struct ParseError : std::runtime_error {
  std::size_t offset;  // 0-based character offset into the line
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " (at character " + std::to_string(off) + ")"),
        offset(off) {}
};

namespace detail {

struct SExpr {
  bool atom = false;
  std::string text;        // atom text
  std::size_t offset = 0;  // offset of the atom or of the opening '('
  std::vector<SExpr> items;
};

inline SExpr read_sexpr(std::string_view line) {
  std::vector<SExpr> stack;
  std::optional<SExpr> root;
  auto place = [&](SExpr&& e) {
    if (!stack.empty()) {
      stack.back().items.push_back(std::move(e));
    } else if (!root) {
      root = std::move(e);
    } else {
      throw ParseError("trailing content after tree", e.offset);
    }
  };
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    const char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
    } else if (c == '(') {
      if (stack.empty() && root)
        throw ParseError("trailing content after tree", i);
      SExpr open;
      open.offset = i;
      stack.push_back(std::move(open));
      ++i;
    } else if (c == ')') {
      if (stack.empty()) throw ParseError("unbalanced ')'", i);
      SExpr top = std::move(stack.back());
      stack.pop_back();
      if (top.items.empty()) throw ParseError("empty constituent", top.offset);
      place(std::move(top));
      ++i;
    } else {
      const std::size_t start = i;
      while (i < n && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
             line[i] != '\n' && line[i] != '(' && line[i] != ')')
        ++i;
      SExpr a;
      a.atom = true;
      a.text = std::string(line.substr(start, i - start));
      a.offset = start;
      place(std::move(a));
    }
  }
  if (!stack.empty())
    throw ParseError("unbalanced '('", stack.back().offset);
  if (!root) throw ParseError("zero tokens", 0);
  return std::move(*root);
}

struct SExprToTree {
  bool labeled = false;
  std::vector<Token> tokens;

  Node leaf(const std::string& surface) {
    const int idx = static_cast<int>(tokens.size()) + 1;
    tokens.push_back({surface, idx});
    return Node{{idx, idx + 1}, "", {}};
  }

  Node convert(const SExpr& e) {
    if (e.atom) return leaf(e.text);
    std::size_t first = 0;
    std::string label;
    if (labeled && e.items.size() >= 2 && e.items[0].atom) {
      label = e.items[0].text;
      first = 1;
    }
    Node node;
    node.label = std::move(label);
    node.children.reserve(e.items.size() - first);
    for (std::size_t i = first; i < e.items.size(); ++i)
      node.children.push_back(convert(e.items[i]));
    node.span = {node.children.front().span.begin,
                 node.children.back().span.end};
    return node;
  }
};

}  // namespace detail

// Parses one bracketed line into a Tree. Unary chains are collapsed,
// keeping the topmost label; a (POS token) pair therefore becomes a leaf
// labeled with its tag (or with the label of a unary parent above it).
inline Tree parse_bracketed(std::string_view line,
                            TreeDialect dialect = TreeDialect::auto_detect) {
  detail::SExpr root = detail::read_sexpr(line);
  bool labeled = dialect == TreeDialect::labeled;
  if (dialect == TreeDialect::auto_detect)
    labeled = !root.atom && !root.items.empty() && root.items[0].atom &&
              root.items.size() >= 2;
  detail::SExprToTree conv;
  conv.labeled = labeled;
  Node raw = conv.convert(root);
  Tree tree;
  tree.tokens = std::move(conv.tokens);
  tree.root = detail::collapse_unary(std::move(raw));
  return tree;
}

namespace detail {

inline void render_node(const Node& node, const std::vector<Token>& tokens,
                        std::string& out) {
  if (node.is_leaf()) {
    const std::string& w = tokens[node.span.begin - 1].surface;
    if (node.label.empty()) {
      out += w;
    } else {
      out += '(';
      out += node.label;
      out += ' ';
      out += w;
      out += ')';
    }
    return;
  }
  out += '(';
  if (!node.label.empty()) {
    out += node.label;
    out += ' ';
  }
  bool sep = false;
  for (const Node& child : node.children) {
    if (sep) out += ' ';
    render_node(child, tokens, out);
    sep = true;
  }
  out += ')';
}

}  // namespace detail

// Inverse of parse_bracketed up to unary collapse; unlabeled nodes are
// rendered without a label. A single-leaf tree renders as "(w1)" so the
// line stays a parenthesized s-expression.
inline std::string render_bracketed(const Tree& tree) {
  std::string out;
  if (tree.root.is_leaf() && tree.root.label.empty()) {
    out += '(';
    out += tree.tokens[tree.root.span.begin - 1].surface;
    out += ')';
    return out;
  }
  detail::render_node(tree.root, tree.tokens, out);
  return out;
}

}  // namespace treeavg
