#pragma once

#include <tree_sitter/api.h>

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lpcode/errors.hpp"
#include "lpcode/syntax_tree.hpp"
#include "lpcode/types.hpp"
#include "lpcode/utf8.hpp"

extern "C" {
const TSLanguage* tree_sitter_c();
const TSLanguage* tree_sitter_cpp();
const TSLanguage* tree_sitter_java();
const TSLanguage* tree_sitter_python();
}

namespace lpcode {

namespace detail {

inline const TSLanguage* grammar(Language lang) {
  switch (lang) {
    case Language::C: return tree_sitter_c();
    case Language::Cpp: return tree_sitter_cpp();
    case Language::Java: return tree_sitter_java();
    case Language::Python: return tree_sitter_python();
  }
  return nullptr;
}

struct ParserDeleter {
  void operator()(TSParser* p) const { ts_parser_delete(p); }
};
struct TreeDeleter {
  void operator()(TSTree* t) const { ts_tree_delete(t); }
};
using ParserPtr = std::unique_ptr<TSParser, ParserDeleter>;
using TreePtr = std::unique_ptr<TSTree, TreeDeleter>;

/// A parsed buffer: the sanitized source plus the raw tree-sitter tree.
struct RawParse {
  std::string source;
  TreePtr tree;

  TSNode root() const { return ts_tree_root_node(tree.get()); }
};

/// Parser objects are not thread-safe, so each thread keeps its own.
inline TSParser* thread_parser(Language lang) {
  thread_local ParserPtr parsers[4];
  auto& p = parsers[static_cast<int>(lang)];
  if (!p) {
    p.reset(ts_parser_new());
    ts_parser_set_language(p.get(), grammar(lang));
  }
  return p.get();
}

inline RawParse raw_parse(Language lang, std::string_view text) {
  RawParse out;
  out.source = sanitize_utf8(text);
  TSParser* parser = thread_parser(lang);
  out.tree.reset(ts_parser_parse_string(parser, nullptr, out.source.data(),
                                        static_cast<std::uint32_t>(out.source.size())));
  if (!out.tree) throw ParseError("parser produced no tree");
  return out;
}

inline std::vector<std::uint32_t> line_lengths(std::string_view src) {
  std::vector<std::uint32_t> lens;
  std::uint32_t cur = 0;
  for (char ch : src) {
    if (ch == '\n') {
      lens.push_back(cur);
      cur = 0;
    } else {
      ++cur;
    }
  }
  lens.push_back(cur);
  return lens;
}

/// Converts the named nodes of a tree-sitter tree into a SyntaxTree.
inline SyntaxTree convert(RawParse&& raw) {
  const auto lens = line_lengths(raw.source);
  std::vector<SyntaxNode> nodes;

  auto make_span = [&](TSNode n) {
    TSPoint s = ts_node_start_point(n);
    TSPoint e = ts_node_end_point(n);
    // A node that ends at column 0 of a later row stops at the end of the
    // previous line.
    if (e.column == 0 && e.row > s.row) {
      e.row -= 1;
      e.column = lens[e.row];
    }
    return Span{s.row + 1, e.row + 1, s.column, e.column};
  };

  struct Frame {
    TSNode node;
    std::uint32_t parent;
    const char* field;
  };
  std::vector<Frame> stack;
  stack.push_back({raw.root(), 0, nullptr});
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const auto index = static_cast<std::uint32_t>(nodes.size());
    SyntaxNode sn;
    sn.kind = ts_node_type(f.node);
    sn.field = f.field ? std::string_view(f.field) : std::string_view();
    sn.span = make_span(f.node);
    sn.start_byte = ts_node_start_byte(f.node);
    sn.end_byte = ts_node_end_byte(f.node);
    sn.parent = f.parent;
    nodes.push_back(sn);
    if (index != 0) nodes[f.parent].children.push_back(index);

    // Push named children in reverse so they pop in source order.
    const std::uint32_t count = ts_node_child_count(f.node);
    for (std::uint32_t i = count; i-- > 0;) {
      TSNode child = ts_node_child(f.node, i);
      if (!ts_node_is_named(child)) continue;
      stack.push_back({child, index, ts_node_field_name_for_child(f.node, i)});
    }
  }
  // Children were appended in pre-order, which is source order per parent.

  // The root covers the whole file.
  auto& root = nodes[0];
  root.span = Span{1, static_cast<std::uint32_t>(lens.size()), 0, lens.back()};
  if (lens.size() > 1 && lens.back() == 0) {
    // Trailing newline: the last physical line is the one before it.
    root.span.end_line = static_cast<std::uint32_t>(lens.size() - 1);
    root.span.end_col = lens[lens.size() - 2];
  }
  root.start_byte = 0;
  root.end_byte = static_cast<std::uint32_t>(raw.source.size());
  return SyntaxTree(std::move(raw.source), std::move(nodes));
}

}  // namespace detail

/// Tree for `unit` even when the grammar reports errors (error-recovered
/// nodes stay in the tree). Used where a best-effort view is acceptable.
inline SyntaxTree parse_lenient(const SourceUnit& unit) {
  return detail::convert(detail::raw_parse(unit.language, unit.text));
}

/// Parses `unit` into a language-neutral syntax tree.
/// Throws ParseError if the text is empty or the grammar needs error
/// recovery anywhere in the file.
inline SyntaxTree parse(const SourceUnit& unit) {
  if (unit.text.empty()) throw ParseError("empty source text");
  auto raw = detail::raw_parse(unit.language, unit.text);
  TSNode root = raw.root();
  if (ts_node_has_error(root)) {
    throw ParseError("unit '" + unit.id + "' does not parse as " +
                     std::string(to_string(unit.language)));
  }
  return detail::convert(std::move(raw));
}

inline bool is_parseable(const SourceUnit& unit) {
  try {
    parse(unit);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

namespace detail {

inline bool is_comment_kind(std::string_view kind) {
  return kind == "comment" || kind == "line_comment" || kind == "block_comment";
}

inline bool is_string_kind(std::string_view kind) {
  return kind == "string" || kind == "string_literal" || kind == "char_literal" ||
         kind == "raw_string_literal" || kind == "concatenated_string" ||
         kind == "character_literal" || kind == "text_block" || kind == "system_lib_string";
}

inline bool is_blank(std::string_view s) {
  for (char c : s)
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '\f' && c != '\v') return false;
  return true;
}

}  // namespace detail

/// Lexical tokens of `unit` in source order: every leaf spelling of the
/// grammar (keywords, identifiers, literals, operators) with comments
/// dropped. String and character literals are single tokens.
inline std::vector<std::string> tokenize(const SourceUnit& unit) {
  auto raw = detail::raw_parse(unit.language, unit.text);
  std::vector<std::string> tokens;
  std::string_view src = raw.source;

  TSTreeCursor cursor = ts_tree_cursor_new(raw.root());
  bool descend = true;
  for (;;) {
    TSNode n = ts_tree_cursor_current_node(&cursor);
    std::string_view kind = ts_node_type(n);
    bool leaf = false;
    if (descend) {
      if (detail::is_comment_kind(kind)) {
        leaf = true;  // skipped
      } else if (detail::is_string_kind(kind) || ts_node_child_count(n) == 0) {
        leaf = true;
        auto text = src.substr(ts_node_start_byte(n), ts_node_end_byte(n) - ts_node_start_byte(n));
        if (!detail::is_blank(text)) tokens.emplace_back(text);
      }
      if (!leaf && ts_tree_cursor_goto_first_child(&cursor)) continue;
    }
    if (ts_tree_cursor_goto_next_sibling(&cursor)) {
      descend = true;
      continue;
    }
    if (!ts_tree_cursor_goto_parent(&cursor)) break;
    descend = false;
  }
  ts_tree_cursor_delete(&cursor);
  return tokens;
}

}  // namespace lpcode
