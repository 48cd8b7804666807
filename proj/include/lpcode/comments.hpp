#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "lpcode/parser.hpp"
#include "lpcode/syntax_tree.hpp"
#include "lpcode/types.hpp"

namespace lpcode {

struct CommentMap {
  std::uint32_t total_lines = 0;
  std::uint32_t comment_lines = 0;
  std::vector<bool> per_line;  // index 0 is line 1
};

/// Number of physical lines: newline-terminated lines plus a final
/// unterminated one. The empty string has no lines.
inline std::uint32_t physical_line_count(std::string_view text) {
  std::uint32_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  if (!text.empty() && text.back() != '\n') ++n;
  return n;
}

namespace detail {

inline bool is_docstring(const SyntaxTree& tree, std::uint32_t n) {
  const auto& node = tree.node(n);
  if (node.kind != "expression_statement" || node.children.size() != 1) return false;
  auto only = tree.node(node.children.front()).kind;
  if (only != "string" && only != "concatenated_string") return false;
  if (n == SyntaxTree::kRoot) return false;
  const auto& parent = tree.node(node.parent);
  if (parent.kind == "module") return true;
  if (parent.kind != "block" || node.parent == SyntaxTree::kRoot) return false;
  auto owner = tree.node(parent.parent).kind;
  return owner == "function_definition" || owner == "class_definition";
}

}  // namespace detail

/// Marks every line that carries comment text: line comments, each line a
/// block comment spans, and (Python) each line of a docstring, i.e. a bare
/// string statement directly inside a module, class or function body.
inline CommentMap detect_comment_lines(const SyntaxTree& tree, Language lang) {
  CommentMap map;
  map.total_lines = physical_line_count(tree.source());
  map.per_line.assign(map.total_lines, false);

  auto mark = [&](const Span& s) {
    for (std::uint32_t l = s.start_line; l <= s.end_line && l <= map.total_lines; ++l)
      map.per_line[l - 1] = true;
  };

  for (std::uint32_t i = 0; i < tree.size(); ++i) {
    const auto& node = tree.node(i);
    if (detail::is_comment_kind(node.kind)) {
      mark(node.span);
    } else if (lang == Language::Python && detail::is_docstring(tree, i)) {
      mark(node.span);
    }
  }
  for (bool b : map.per_line)
    if (b) ++map.comment_lines;
  return map;
}

/// Never fails: unparseable text is read through the error-recovering tree.
inline CommentMap detect_comment_lines(const SourceUnit& unit) {
  if (unit.text.empty()) return {};
  return detect_comment_lines(parse_lenient(unit), unit.language);
}

}  // namespace lpcode
