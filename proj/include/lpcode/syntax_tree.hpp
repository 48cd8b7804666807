#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lpcode {

/// Source region of a node. Lines are 1-based and inclusive; columns are
/// 0-based byte offsets within their line.
struct Span {
  std::uint32_t start_line = 1;
  std::uint32_t end_line = 1;
  std::uint32_t start_col = 0;
  std::uint32_t end_col = 0;

  bool contains(const Span& o) const {
    auto before = [](std::uint32_t l1, std::uint32_t c1, std::uint32_t l2, std::uint32_t c2) {
      return l1 < l2 || (l1 == l2 && c1 <= c2);
    };
    return before(start_line, start_col, o.start_line, o.start_col) &&
           before(o.end_line, o.end_col, end_line, end_col);
  }

  std::uint32_t line_count() const { return end_line - start_line + 1; }
};

struct SyntaxNode {
  /// Grammar symbol name, e.g. "function_definition". Points into static
  /// grammar tables, so views stay valid for the whole program.
  std::string_view kind;
  /// Field name under which the parent holds this node ("" when none).
  std::string_view field;
  Span span;
  std::uint32_t start_byte = 0;
  std::uint32_t end_byte = 0;
  std::uint32_t parent = 0;
  std::vector<std::uint32_t> children;
};

/// Named-node syntax tree. Node 0 is the root; the tree owns the (UTF-8
/// sanitized) source it was built from so node text can be sliced.
class SyntaxTree {
 public:
  static constexpr std::uint32_t kRoot = 0;

  SyntaxTree() = default;
  SyntaxTree(std::string source, std::vector<SyntaxNode> nodes)
      : source_(std::move(source)), nodes_(std::move(nodes)) {}

  std::size_t size() const { return nodes_.size(); }
  const SyntaxNode& root() const { return nodes_[kRoot]; }
  const SyntaxNode& node(std::uint32_t i) const { return nodes_[i]; }
  const std::vector<SyntaxNode>& nodes() const { return nodes_; }
  const std::string& source() const { return source_; }

  std::string_view text(std::uint32_t i) const {
    const auto& n = nodes_[i];
    return std::string_view(source_).substr(n.start_byte, n.end_byte - n.start_byte);
  }

  /// First child held under `field`, or -1.
  std::int64_t child_by_field(std::uint32_t i, std::string_view field) const {
    for (auto c : nodes_[i].children)
      if (nodes_[c].field == field) return c;
    return -1;
  }

  std::vector<std::uint32_t> children_by_field(std::uint32_t i, std::string_view field) const {
    std::vector<std::uint32_t> out;
    for (auto c : nodes_[i].children)
      if (nodes_[c].field == field) out.push_back(c);
    return out;
  }

  bool is_root(std::uint32_t i) const { return i == kRoot; }

  /// Structural equality: same shape, kinds and spans.
  friend bool operator==(const SyntaxTree& a, const SyntaxTree& b) {
    if (a.nodes_.size() != b.nodes_.size()) return false;
    for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
      const auto& x = a.nodes_[i];
      const auto& y = b.nodes_[i];
      if (x.kind != y.kind || x.field != y.field || x.children != y.children ||
          x.span.start_line != y.span.start_line || x.span.end_line != y.span.end_line ||
          x.span.start_col != y.span.start_col || x.span.end_col != y.span.end_col)
        return false;
    }
    return true;
  }

 private:
  std::string source_;
  std::vector<SyntaxNode> nodes_;
};

}  // namespace lpcode
