#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lpcode/comments.hpp"
#include "lpcode/entities.hpp"
#include "lpcode/errors.hpp"
#include "lpcode/parser.hpp"
#include "lpcode/types.hpp"

namespace lpcode {

enum class NamingPattern { CamelCase, SnakeCase, PascalCase, UpperSnakeCase, Other };

inline std::string_view to_string(NamingPattern p) {
  switch (p) {
    case NamingPattern::CamelCase: return "camelCase";
    case NamingPattern::SnakeCase: return "snake_case";
    case NamingPattern::PascalCase: return "PascalCase";
    case NamingPattern::UpperSnakeCase: return "UPPER_SNAKE_CASE";
    case NamingPattern::Other: return "Other";
  }
  return "?";
}

/// Rules are tried in order: UPPER_SNAKE, Pascal, camel, snake. ASCII only;
/// a lone lowercase word ("parse") is snake_case.
inline NamingPattern classify_naming_pattern(std::string_view name) {
  if (name.empty()) return NamingPattern::Other;
  auto upper = [](char c) { return c >= 'A' && c <= 'Z'; };
  auto lower = [](char c) { return c >= 'a' && c <= 'z'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };

  bool has_lower = false, has_upper = false, has_underscore = false, alnum_only = true;
  for (char c : name) {
    if (lower(c)) has_lower = true;
    else if (upper(c)) has_upper = true;
    else if (c == '_') has_underscore = true;
    else if (!digit(c)) alnum_only = false;
  }
  if (!alnum_only) return NamingPattern::Other;
  const char first = name.front();

  if (upper(first) && !has_lower) return NamingPattern::UpperSnakeCase;
  if (upper(first) && !has_underscore && has_lower) return NamingPattern::PascalCase;
  if (lower(first) && !has_underscore && has_upper) return NamingPattern::CamelCase;
  if (lower(first) && !has_upper) return NamingPattern::SnakeCase;
  return NamingPattern::Other;
}

namespace detail {

/// Count of the most frequent key; ties go to the key seen first.
template <typename Key>
std::size_t modal_count(std::span<const Key> keys) {
  std::map<Key, std::pair<std::size_t, std::size_t>> counts;  // key -> (count, first index)
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto [it, inserted] = counts.try_emplace(keys[i], 0, i);
    ++it->second.first;
  }
  std::size_t best = 0, best_first = SIZE_MAX;
  for (const auto& [key, cf] : counts) {
    if (cf.first > best || (cf.first == best && cf.second < best_first)) {
      best = cf.first;
      best_first = cf.second;
    }
  }
  return best;
}

}  // namespace detail

/// Share of names that follow the most common naming pattern; 1.0 when
/// there are no names.
inline double naming_consistency(std::span<const std::string> names) {
  if (names.empty()) return 1.0;
  std::vector<NamingPattern> patterns;
  patterns.reserve(names.size());
  for (const auto& n : names) patterns.push_back(classify_naming_pattern(n));
  return static_cast<double>(detail::modal_count<NamingPattern>(patterns)) /
         static_cast<double>(names.size());
}

enum class IndentKind { Space, Tab, Mixed };

struct IndentPattern {
  IndentKind kind;
  std::size_t width;
  auto operator<=>(const IndentPattern&) const = default;
};

/// Leading-whitespace pattern of every non-blank indented line.
inline std::vector<IndentPattern> indentation_patterns(std::string_view text) {
  std::vector<IndentPattern> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;

    std::size_t w = 0;
    bool spaces = false, tabs = false;
    while (w < line.size() && (line[w] == ' ' || line[w] == '\t')) {
      (line[w] == ' ' ? spaces : tabs) = true;
      ++w;
    }
    if (w == 0) continue;
    std::string_view rest = line.substr(w);
    if (rest.empty() || rest == "\r") continue;  // whitespace-only line
    IndentKind kind = spaces && tabs ? IndentKind::Mixed : (tabs ? IndentKind::Tab : IndentKind::Space);
    out.push_back({kind, w});
  }
  return out;
}

/// Share of indented lines using the most common (kind, width) pattern;
/// 1.0 when nothing is indented.
inline double indentation_consistency(std::string_view text) {
  auto patterns = indentation_patterns(text);
  if (patterns.empty()) return 1.0;
  return static_cast<double>(detail::modal_count<IndentPattern>(patterns)) /
         static_cast<double>(patterns.size());
}

inline double avg_function_length(const EntityTables& entities) {
  if (entities.functions.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& f : entities.functions) sum += f.length();
  return sum / static_cast<double>(entities.functions.size());
}

inline double avg_nesting_depth(const EntityTables& entities) {
  if (entities.block_nodes.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& b : entities.block_nodes) sum += b.depth;
  return sum / static_cast<double>(entities.block_nodes.size());
}

inline double comment_ratio(const CommentMap& map) {
  if (map.total_lines == 0) throw DegenerateInput("comment ratio of a file with no lines");
  return static_cast<double>(map.comment_lines) / static_cast<double>(map.total_lines);
}

inline double avg_name_length(std::span<const std::string> names) {
  if (names.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& n : names) sum += static_cast<double>(n.size());
  return sum / static_cast<double>(names.size());
}

// ---------------------------------------------------------------------------
// Style vectors
// ---------------------------------------------------------------------------

inline constexpr std::size_t kStyleDims = 10;
inline constexpr std::size_t kPairDims = 2 * kStyleDims;

/// Feature names in vector order. This order is part of the feature CSV and
/// model file formats.
inline constexpr std::array<std::string_view, kStyleDims> kFeatureNames = {
    "function_naming_consistency",
    "variable_naming_consistency",
    "class_naming_consistency",
    "constant_naming_consistency",
    "indentation_consistency",
    "avg_function_length",
    "avg_nesting_depth",
    "comment_ratio",
    "avg_function_name_length",
    "avg_variable_name_length",
};

inline std::optional<std::size_t> feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i)
    if (kFeatureNames[i] == name) return i;
  return std::nullopt;
}

struct StyleVector {
  double function_naming_consistency = 0.0;
  double variable_naming_consistency = 0.0;
  double class_naming_consistency = 0.0;
  double constant_naming_consistency = 0.0;
  double indentation_consistency = 0.0;
  double avg_function_length = 0.0;
  double avg_nesting_depth = 0.0;
  double comment_ratio = 0.0;
  double avg_function_name_length = 0.0;
  double avg_variable_name_length = 0.0;

  std::array<double, kStyleDims> values() const {
    return {function_naming_consistency, variable_naming_consistency, class_naming_consistency,
            constant_naming_consistency, indentation_consistency,     avg_function_length,
            avg_nesting_depth,           comment_ratio,               avg_function_name_length,
            avg_variable_name_length};
  }

  static StyleVector from_values(std::span<const double> v) {
    if (v.size() != kStyleDims) throw DimensionMismatch("style vector needs 10 values");
    return StyleVector{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
  }

  bool operator==(const StyleVector&) const = default;
};

/// All ten features of an already parsed file.
inline StyleVector style_vector(const SyntaxTree& tree, Language lang) {
  const EntityTables entities = extract_entities(tree, lang);
  const CommentMap comments = detect_comment_lines(tree, lang);
  const auto function_names = entities.function_names();

  StyleVector v;
  v.function_naming_consistency = naming_consistency(function_names);
  v.variable_naming_consistency = naming_consistency(entities.variables);
  v.class_naming_consistency = naming_consistency(entities.classes);
  v.constant_naming_consistency = naming_consistency(entities.constants);
  v.indentation_consistency = indentation_consistency(tree.source());
  v.avg_function_length = avg_function_length(entities);
  v.avg_nesting_depth = avg_nesting_depth(entities);
  v.comment_ratio = comment_ratio(comments);
  v.avg_function_name_length = avg_name_length(function_names);
  v.avg_variable_name_length = avg_name_length(entities.variables);
  return v;
}

/// Throws ParseError for text the grammar rejects.
inline StyleVector extract_style_vector(const SourceUnit& unit) {
  return style_vector(parse(unit), unit.language);
}

struct PairVector {
  StyleVector human_features;
  StyleVector candidate_features;
  std::array<double, kPairDims> flattened{};
};

/// Human features first, then the candidate's, each in kFeatureNames order.
inline PairVector pair_feature_vector(const StyleVector& human, const StyleVector& candidate) {
  PairVector p{human, candidate, {}};
  auto h = human.values();
  auto c = candidate.values();
  for (std::size_t i = 0; i < kStyleDims; ++i) {
    p.flattened[i] = h[i];
    p.flattened[i + kStyleDims] = c[i];
  }
  return p;
}

// ---------------------------------------------------------------------------
// Feature groups
// ---------------------------------------------------------------------------

enum class FeatureGroup { Naming, Structure, Readability };

inline std::string_view to_string(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::Naming: return "naming";
    case FeatureGroup::Structure: return "structure";
    case FeatureGroup::Readability: return "readability";
  }
  return "?";
}

inline std::optional<FeatureGroup> feature_group_from_string(std::string_view s) {
  for (auto g : {FeatureGroup::Naming, FeatureGroup::Structure, FeatureGroup::Readability})
    if (to_string(g) == s) return g;
  return std::nullopt;
}

/// Style-vector indices of a group: naming 0-3, structure 4-6, readability 7-9.
inline std::vector<std::size_t> feature_group_indices(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::Naming: return {0, 1, 2, 3};
    case FeatureGroup::Structure: return {4, 5, 6};
    case FeatureGroup::Readability: return {7, 8, 9};
  }
  return {};
}

}  // namespace lpcode
