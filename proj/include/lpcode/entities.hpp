#pragma once

#include <cctype>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lpcode/syntax_tree.hpp"
#include "lpcode/types.hpp"

namespace lpcode {

struct FunctionEntity {
  std::string name;
  std::uint32_t start_line = 0;
  std::uint32_t end_line = 0;

  std::uint32_t length() const { return end_line - start_line + 1; }
};

struct BlockNode {
  std::string kind;
  int depth = 1;  // outermost block of a file has depth 1
};

/// Declared entities of one file, in source order.
struct EntityTables {
  std::vector<FunctionEntity> functions;
  std::vector<std::string> variables;
  std::vector<std::string> classes;
  std::vector<std::string> constants;
  std::vector<BlockNode> block_nodes;

  std::vector<std::string> function_names() const {
    std::vector<std::string> out;
    out.reserve(functions.size());
    for (const auto& f : functions) out.push_back(f.name);
    return out;
  }
};

namespace detail {

class EntityExtractor {
 public:
  EntityExtractor(const SyntaxTree& tree, Language lang) : tree_(tree), lang_(lang) {}

  EntityTables run() {
    visit(SyntaxTree::kRoot, 0, Scope{SyntaxTree::kRoot, true});
    // Variables never repeat a name already classified as a function,
    // class or constant.
    std::unordered_set<std::string> taken;
    for (const auto& f : out_.functions) taken.insert(f.name);
    for (const auto& c : out_.classes) taken.insert(c);
    for (const auto& c : out_.constants) taken.insert(c);
    std::vector<std::string> vars;
    for (auto& v : out_.variables)
      if (!taken.contains(v)) vars.push_back(std::move(v));
    out_.variables = std::move(vars);
    return std::move(out_);
  }

 private:
  struct Scope {
    std::uint32_t id;   // node owning the scope (root, function or class)
    bool file_level;    // no enclosing function or class body
  };

  std::string_view kind(std::uint32_t n) const { return tree_.node(n).kind; }
  std::string_view text(std::uint32_t n) const { return tree_.text(n); }
  std::uint32_t parent(std::uint32_t n) const { return tree_.node(n).parent; }

  void add_name(std::vector<std::string>& list, std::string_view name) {
    if (!name.empty()) list.emplace_back(name);
  }

  // ---- block nesting ---------------------------------------------------

  bool is_block(std::uint32_t n) const {
    auto k = kind(n);
    if (k == "function_definition" || k == "method_declaration" ||
        k == "constructor_declaration" || k == "compact_constructor_declaration")
      return tree_.child_by_field(n, "body") >= 0;
    return k == "for_statement" || k == "for_range_loop" || k == "enhanced_for_statement" ||
           k == "while_statement" || k == "do_statement" || k == "if_statement" ||
           k == "elif_clause" || k == "switch_statement" || k == "switch_expression" ||
           k == "try_statement" || k == "try_with_resources_statement" ||
           k == "match_statement";
  }

  /// `else if` / `elif` continue the chain of the enclosing conditional
  /// rather than nesting inside it.
  bool is_chained_conditional(std::uint32_t n) const {
    if (n == SyntaxTree::kRoot) return false;
    auto k = kind(n);
    std::uint32_t p = parent(n);
    if (k == "elif_clause") return true;
    if (k != "if_statement") return false;
    if (kind(p) == "if_statement" && tree_.node(n).field == "alternative") return true;
    if (kind(p) == "else_clause" && p != SyntaxTree::kRoot && kind(parent(p)) == "if_statement")
      return true;
    return false;
  }

  // ---- traversal -------------------------------------------------------

  void visit(std::uint32_t n, int depth, Scope scope) {
    const auto k = kind(n);
    int child_depth = depth;
    if (is_block(n)) {
      if (is_chained_conditional(n)) {
        out_.block_nodes.push_back({std::string(k), depth});
      } else {
        child_depth = depth + 1;
        out_.block_nodes.push_back({std::string(k), child_depth});
      }
    }

    Scope child_scope = scope;
    switch (lang_) {
      case Language::C:
      case Language::Cpp: child_scope = visit_c_family(n, scope); break;
      case Language::Java: child_scope = visit_java(n, scope); break;
      case Language::Python: child_scope = visit_python(n, scope); break;
    }

    for (auto c : tree_.node(n).children) visit(c, child_depth, child_scope);
  }

  void add_function(std::uint32_t n, std::string_view name) {
    if (name.empty()) return;
    const auto& span = tree_.node(n).span;
    out_.functions.push_back({std::string(name), span.start_line, span.end_line});
  }

  // ---- C / C++ -----------------------------------------------------------

  /// Innermost declared name of a declarator chain; empty if there is none.
  /// Sets `is_function` when the chain declares a function.
  std::string_view declarator_name(std::uint32_t n, bool* is_function = nullptr) const {
    for (int guard = 0; guard < 64; ++guard) {
      auto k = kind(n);
      if (k == "identifier" || k == "field_identifier" || k == "type_identifier" ||
          k == "destructor_name" || k == "operator_name" || k == "operator_cast")
        return text(n);
      if (k == "qualified_identifier" || k == "template_function" || k == "template_method") {
        auto name = tree_.child_by_field(n, "name");
        if (name < 0) return {};
        n = static_cast<std::uint32_t>(name);
        continue;
      }
      if (k == "function_declarator" && is_function) *is_function = true;
      auto d = tree_.child_by_field(n, "declarator");
      if (d < 0) {
        // reference_declarator / parenthesized_declarator hold the inner
        // declarator as a plain named child.
        const auto& ch = tree_.node(n).children;
        if (ch.empty()) return {};
        if (k != "reference_declarator" && k != "parenthesized_declarator" &&
            k != "attributed_declarator" && k != "structured_binding_declarator")
          return {};
        n = ch.front();
        continue;
      }
      n = static_cast<std::uint32_t>(d);
    }
    return {};
  }

  bool has_const_qualifier(std::uint32_t decl) const {
    for (auto c : tree_.node(decl).children) {
      if (kind(c) == "type_qualifier") {
        auto t = text(c);
        if (t == "const" || t == "constexpr") return true;
      }
    }
    return false;
  }

  Scope visit_c_family(std::uint32_t n, Scope scope) {
    const auto k = kind(n);
    if (k == "function_definition") {
      auto d = tree_.child_by_field(n, "declarator");
      if (d >= 0) add_function(n, declarator_name(static_cast<std::uint32_t>(d)));
      return Scope{n, false};
    }
    if ((k == "class_specifier" || k == "struct_specifier") && tree_.child_by_field(n, "body") >= 0) {
      auto name = tree_.child_by_field(n, "name");
      if (name >= 0) add_name(out_.classes, declarator_name(static_cast<std::uint32_t>(name)));
      return Scope{n, false};
    }
    if (k == "preproc_def") {
      auto name = tree_.child_by_field(n, "name");
      if (name >= 0) add_name(out_.constants, text(static_cast<std::uint32_t>(name)));
      return scope;
    }
    if (k == "declaration") {
      const bool constant = scope.file_level && has_const_qualifier(n);
      for (auto d : tree_.children_by_field(n, "declarator")) {
        bool is_function = false;
        auto name = declarator_name(d, &is_function);
        if (is_function) continue;  // prototype
        add_name(constant ? out_.constants : out_.variables, name);
      }
      return scope;
    }
    if (k == "field_declaration") {
      for (auto d : tree_.children_by_field(n, "declarator")) {
        bool is_function = false;
        auto name = declarator_name(d, &is_function);
        if (!is_function) add_name(out_.variables, name);
      }
      return scope;
    }
    if (k == "parameter_declaration" || k == "optional_parameter_declaration" ||
        k == "variadic_parameter_declaration") {
      auto d = tree_.child_by_field(n, "declarator");
      if (d >= 0) {
        bool is_function = false;
        auto name = declarator_name(static_cast<std::uint32_t>(d), &is_function);
        add_name(out_.variables, name);
      }
      return scope;
    }
    if (k == "for_range_loop") {
      auto d = tree_.child_by_field(n, "declarator");
      if (d >= 0) add_name(out_.variables, declarator_name(static_cast<std::uint32_t>(d)));
      return scope;
    }
    return scope;
  }

  // ---- Java --------------------------------------------------------------

  bool has_modifiers(std::uint32_t n, std::initializer_list<std::string_view> wanted) const {
    for (auto c : tree_.node(n).children) {
      if (kind(c) != "modifiers") continue;
      auto t = text(c);
      for (auto w : wanted) {
        bool found = false;
        for (std::size_t pos = t.find(w); pos != std::string_view::npos; pos = t.find(w, pos + 1)) {
          auto is_word = [](char ch) {
            return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '$';
          };
          bool left = pos == 0 || !is_word(t[pos - 1]);
          bool right = pos + w.size() >= t.size() || !is_word(t[pos + w.size()]);
          if (left && right) {
            found = true;
            break;
          }
        }
        if (!found) return false;
      }
      return true;
    }
    return false;
  }

  void add_declarators(std::uint32_t n, std::vector<std::string>& list) {
    for (auto d : tree_.children_by_field(n, "declarator")) {
      auto name = tree_.child_by_field(d, "name");
      if (name >= 0) add_name(list, text(static_cast<std::uint32_t>(name)));
    }
  }

  Scope visit_java(std::uint32_t n, Scope scope) {
    const auto k = kind(n);
    if (k == "class_declaration" || k == "interface_declaration" || k == "enum_declaration" ||
        k == "record_declaration" || k == "annotation_type_declaration") {
      auto name = tree_.child_by_field(n, "name");
      if (name >= 0) add_name(out_.classes, text(static_cast<std::uint32_t>(name)));
      return Scope{n, false};
    }
    if (k == "method_declaration" || k == "constructor_declaration" ||
        k == "compact_constructor_declaration") {
      if (tree_.child_by_field(n, "body") >= 0) {
        auto name = tree_.child_by_field(n, "name");
        if (name >= 0) add_function(n, text(static_cast<std::uint32_t>(name)));
      }
      return Scope{n, false};
    }
    if (k == "field_declaration") {
      add_declarators(n, has_modifiers(n, {"static", "final"}) ? out_.constants : out_.variables);
      return scope;
    }
    if (k == "constant_declaration") {  // interface fields are implicitly static final
      add_declarators(n, out_.constants);
      return scope;
    }
    if (k == "local_variable_declaration") {
      add_declarators(n, out_.variables);
      return scope;
    }
    if (k == "formal_parameter" || k == "catch_formal_parameter" || k == "resource" ||
        k == "enhanced_for_statement") {
      auto name = tree_.child_by_field(n, "name");
      if (name >= 0) add_name(out_.variables, text(static_cast<std::uint32_t>(name)));
      return scope;
    }
    if (k == "spread_parameter") {
      for (auto c : tree_.node(n).children) {
        if (kind(c) != "variable_declarator") continue;
        auto name = tree_.child_by_field(c, "name");
        if (name >= 0) add_name(out_.variables, text(static_cast<std::uint32_t>(name)));
      }
      return scope;
    }
    return scope;
  }

  // ---- Python ------------------------------------------------------------

  bool is_literal(std::uint32_t n) const {
    auto k = kind(n);
    if (k == "integer" || k == "float" || k == "string" || k == "concatenated_string" ||
        k == "true" || k == "false" || k == "none")
      return true;
    if (k == "unary_operator") {
      auto arg = tree_.child_by_field(n, "argument");
      return arg >= 0 && (kind(static_cast<std::uint32_t>(arg)) == "integer" ||
                          kind(static_cast<std::uint32_t>(arg)) == "float");
    }
    return false;
  }

  void declare_python(Scope scope, std::string_view name) {
    if (name.empty()) return;
    if (seen_.insert({scope.id, std::string(name)}).second) add_name(out_.variables, name);
  }

  /// Names bound by an assignment / loop target.
  void bind_targets(std::uint32_t n, Scope scope) {
    auto k = kind(n);
    if (k == "identifier") {
      declare_python(scope, text(n));
    } else if (k == "attribute") {
      auto attr = tree_.child_by_field(n, "attribute");
      if (attr >= 0) declare_python(scope, text(static_cast<std::uint32_t>(attr)));
    } else if (k == "pattern_list" || k == "tuple_pattern" || k == "list_pattern" ||
               k == "list_splat_pattern" || k == "parenthesized_expression" ||
               k == "expression_list" || k == "tuple" || k == "list") {
      for (auto c : tree_.node(n).children) bind_targets(c, scope);
    }
  }

  void bind_parameter(std::uint32_t p, Scope scope) {
    auto k = kind(p);
    if (k == "identifier") {
      declare_python(scope, text(p));
    } else if (k == "default_parameter" || k == "typed_default_parameter") {
      auto name = tree_.child_by_field(p, "name");
      if (name >= 0) declare_python(scope, text(static_cast<std::uint32_t>(name)));
    } else if (k == "typed_parameter" || k == "list_splat_pattern" ||
               k == "dictionary_splat_pattern") {
      for (auto c : tree_.node(p).children) {
        if (kind(c) == "identifier") {
          declare_python(scope, text(c));
          break;
        }
        if (kind(c) == "list_splat_pattern" || kind(c) == "dictionary_splat_pattern") {
          bind_parameter(c, scope);
          break;
        }
      }
    }
  }

  Scope visit_python(std::uint32_t n, Scope scope) {
    const auto k = kind(n);
    if (k == "function_definition") {
      auto name = tree_.child_by_field(n, "name");
      if (name >= 0) add_function(n, text(static_cast<std::uint32_t>(name)));
      Scope inner{n, false};
      auto params = tree_.child_by_field(n, "parameters");
      if (params >= 0)
        for (auto p : tree_.node(static_cast<std::uint32_t>(params)).children) bind_parameter(p, inner);
      return inner;
    }
    if (k == "class_definition") {
      auto name = tree_.child_by_field(n, "name");
      if (name >= 0) add_name(out_.classes, text(static_cast<std::uint32_t>(name)));
      return Scope{n, false};
    }
    if (k == "assignment") {
      auto left = tree_.child_by_field(n, "left");
      auto right = tree_.child_by_field(n, "right");
      if (left < 0) return scope;
      auto l = static_cast<std::uint32_t>(left);
      if (scope.file_level && kind(l) == "identifier" && right >= 0 &&
          is_literal(static_cast<std::uint32_t>(right))) {
        std::string name(text(l));
        if (seen_.insert({scope.id, name}).second) out_.constants.push_back(std::move(name));
        return scope;
      }
      bind_targets(l, scope);
      return scope;
    }
    if (k == "for_statement" || k == "for_in_clause") {
      auto left = tree_.child_by_field(n, "left");
      if (left >= 0) bind_targets(static_cast<std::uint32_t>(left), scope);
      return scope;
    }
    if (k == "as_pattern") {
      auto alias = tree_.child_by_field(n, "alias");
      if (alias >= 0) {
        auto a = static_cast<std::uint32_t>(alias);
        // as_pattern_target wraps the bound expression.
        if (kind(a) == "as_pattern_target" && !tree_.node(a).children.empty())
          bind_targets(tree_.node(a).children.front(), scope);
        else
          bind_targets(a, scope);
      }
      return scope;
    }
    if (k == "named_expression") {
      auto name = tree_.child_by_field(n, "name");
      if (name >= 0) declare_python(scope, text(static_cast<std::uint32_t>(name)));
      return scope;
    }
    return scope;
  }

  const SyntaxTree& tree_;
  Language lang_;
  EntityTables out_;
  std::set<std::pair<std::uint32_t, std::string>> seen_;
};

}  // namespace detail

/// Functions, variables, classes, constants and nested blocks of a parsed
/// file.
///
/// Constants are syntactic: `#define` object-like macros and `const` /
/// `constexpr` file-scope declarations in C and C++, `static final` fields
/// in Java, module-level names bound to a literal in Python. Variables are
/// counted per declaration (Python: once per name and scope) and exclude
/// names already classified as functions, classes or constants.
inline EntityTables extract_entities(const SyntaxTree& tree, Language lang) {
  return detail::EntityExtractor(tree, lang).run();
}

inline EntityTables extract_entities(const SyntaxTree& tree, const SourceUnit& unit) {
  return extract_entities(tree, unit.language);
}

}  // namespace lpcode
