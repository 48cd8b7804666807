#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "lpcode/random.hpp"
#include "lpcode/style_features.hpp"
#include "support/synth.hpp"

namespace lpcode {
namespace {

SourceUnit unit(Language lang, std::string text) {
  SourceUnit u;
  u.id = "u";
  u.language = lang;
  u.text = std::move(text);
  return u;
}

TEST(NamingPattern, Definitions) {
  EXPECT_EQ(classify_naming_pattern("getUserName"), NamingPattern::CamelCase);
  EXPECT_EQ(classify_naming_pattern("MAX_SIZE"), NamingPattern::UpperSnakeCase);
  EXPECT_EQ(classify_naming_pattern("_tmp"), NamingPattern::Other);
  EXPECT_EQ(classify_naming_pattern("UserName"), NamingPattern::PascalCase);
  EXPECT_EQ(classify_naming_pattern("parse_input"), NamingPattern::SnakeCase);
  EXPECT_EQ(classify_naming_pattern("parse"), NamingPattern::SnakeCase);
  EXPECT_EQ(classify_naming_pattern("X"), NamingPattern::UpperSnakeCase);
  EXPECT_EQ(classify_naming_pattern("Get_Name"), NamingPattern::Other);
  EXPECT_EQ(classify_naming_pattern("get_Name"), NamingPattern::Other);
  EXPECT_EQ(classify_naming_pattern("~Shape"), NamingPattern::Other);
  EXPECT_EQ(classify_naming_pattern("$x"), NamingPattern::Other);
}

TEST(NamingPattern, TotalOnRandomIdentifiers) {
  Rng rng(7);
  const std::string alphabet = "abcXYZ_09$";
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    auto len = 1 + rng.below(8);
    for (std::size_t k = 0; k < len; ++k) s.push_back(alphabet[rng.below(alphabet.size())]);
    auto p = classify_naming_pattern(s);
    EXPECT_EQ(p, classify_naming_pattern(s));
    // A name matching a rule must satisfy that rule's character classes.
    if (p == NamingPattern::UpperSnakeCase) {
      EXPECT_TRUE(s[0] >= 'A' && s[0] <= 'Z');
    }
    if (p == NamingPattern::CamelCase || p == NamingPattern::SnakeCase) {
      EXPECT_TRUE(s[0] >= 'a' && s[0] <= 'z');
    }
    if (p == NamingPattern::PascalCase || p == NamingPattern::CamelCase) {
      EXPECT_EQ(s.find('_'), std::string::npos);
    }
  }
}

TEST(NamingConsistency, Examples) {
  std::vector<std::string> mixed = {"getName", "setName", "parse_input"};
  EXPECT_NEAR(naming_consistency(mixed), 2.0 / 3.0, 1e-12);
  std::vector<std::string> snake = {"a_b", "c_d"};
  EXPECT_DOUBLE_EQ(naming_consistency(snake), 1.0);
  EXPECT_DOUBLE_EQ(naming_consistency(std::vector<std::string>{}), 1.0);
}

TEST(NamingConsistency, LowerBoundOnRandomLists) {
  Rng rng(11);
  const std::vector<std::string> pool = {"camelCase", "snake_case", "PascalCase", "UPPER_X", "_o"};
  for (int t = 0; t < 2000; ++t) {
    std::vector<std::string> names(1 + rng.below(40));
    for (auto& n : names) n = pool[rng.below(pool.size())];
    EXPECT_GE(naming_consistency(names), 0.2);
    EXPECT_LE(naming_consistency(names), 1.0);
  }
}

TEST(Indentation, Examples) {
  EXPECT_DOUBLE_EQ(indentation_consistency("a\n    b\n    c\n        d\n    e\n"), 0.75);
  EXPECT_DOUBLE_EQ(indentation_consistency("a\nb\nc\n"), 1.0);
  EXPECT_DOUBLE_EQ(indentation_consistency("a\n\tb\n    c\n"), 0.5);
}

TEST(Indentation, TabsNeverMergeWithSpaces) {
  // one tab vs one space, mixed run
  EXPECT_DOUBLE_EQ(indentation_consistency("\ta\n b\n \tc\n\td\n"), 0.5);
  // whitespace-only lines are ignored
  EXPECT_DOUBLE_EQ(indentation_consistency("a\n    \n  b\n"), 1.0);
}

TEST(Indentation, TieBreaksTowardFirstPattern) {
  auto pats = indentation_patterns("\tb\n    c\n");
  ASSERT_EQ(pats.size(), 2u);
  EXPECT_EQ(pats[0].kind, IndentKind::Tab);
  EXPECT_EQ(pats[1].width, 4u);
}

TEST(FunctionLength, Examples) {
  EntityTables e;
  e.functions = {{"f", 1, 5}};
  EXPECT_DOUBLE_EQ(avg_function_length(e), 5.0);
  e.functions = {{"f", 1, 3}, {"g", 10, 16}};
  EXPECT_DOUBLE_EQ(avg_function_length(e), 5.0);
  e.functions.clear();
  EXPECT_DOUBLE_EQ(avg_function_length(e), 0.0);
}

TEST(NestingDepth, Examples) {
  EntityTables e;
  e.block_nodes = {{"function_definition", 1}};
  EXPECT_DOUBLE_EQ(avg_nesting_depth(e), 1.0);
  e.block_nodes = {{"function_definition", 1}, {"for_statement", 2}, {"if_statement", 3}};
  EXPECT_DOUBLE_EQ(avg_nesting_depth(e), 2.0);
  e.block_nodes.clear();
  EXPECT_DOUBLE_EQ(avg_nesting_depth(e), 0.0);
}

TEST(CommentRatio, Examples) {
  EXPECT_DOUBLE_EQ(comment_ratio(CommentMap{10, 2, {}}), 0.2);
  EXPECT_DOUBLE_EQ(comment_ratio(CommentMap{7, 0, {}}), 0.0);
  EXPECT_DOUBLE_EQ(comment_ratio(CommentMap{4, 4, {}}), 1.0);
  EXPECT_THROW(comment_ratio(CommentMap{0, 0, {}}), DegenerateInput);
}

TEST(NameLength, Examples) {
  EXPECT_DOUBLE_EQ(avg_name_length(std::vector<std::string>{"go", "parse"}), 3.5);
  EXPECT_DOUBLE_EQ(avg_name_length(std::vector<std::string>{"x"}), 1.0);
  EXPECT_DOUBLE_EQ(avg_name_length(std::vector<std::string>{}), 0.0);
}

TEST(StyleVector, ComposedCase) {
  auto v = extract_style_vector(unit(Language::C,
                                     "int f(int a)\n"
                                     "{\n"
                                     "int b = a;\n"
                                     "return b;\n"
                                     "}\n"));
  EXPECT_DOUBLE_EQ(v.comment_ratio, 0.0);
  EXPECT_DOUBLE_EQ(v.avg_function_length, 5.0);
  EXPECT_DOUBLE_EQ(v.indentation_consistency, 1.0);
  EXPECT_DOUBLE_EQ(v.avg_nesting_depth, 1.0);
  EXPECT_DOUBLE_EQ(v.avg_function_name_length, 1.0);
  EXPECT_DOUBLE_EQ(v.variable_naming_consistency, 1.0);
}

TEST(StyleVector, DeterministicForIdenticalText) {
  const std::string src = "class A:\n    \"\"\"Doc.\"\"\"\n    def run(self, x):\n        return x\n";
  EXPECT_EQ(extract_style_vector(unit(Language::Python, src)),
            extract_style_vector(unit(Language::Python, src)));
}

TEST(StyleVector, ParseErrorPropagates) {
  EXPECT_THROW(extract_style_vector(unit(Language::Python, "def f(:")), ParseError);
}

TEST(StyleVector, RenamingToOnePatternMaxesConsistency) {
  const std::string mixed =
      "int getValue(int some_arg) { int OtherVar = some_arg; return OtherVar; }\n"
      "int compute_it(int x) { return x; }\n";
  const std::string renamed =
      "int get_value(int some_arg) { int other_var = some_arg; return other_var; }\n"
      "int compute_it(int x) { return x; }\n";
  auto a = extract_style_vector(unit(Language::C, mixed));
  auto b = extract_style_vector(unit(Language::C, renamed));
  EXPECT_LT(a.function_naming_consistency, 1.0);
  EXPECT_LT(a.variable_naming_consistency, 1.0);
  EXPECT_DOUBLE_EQ(b.function_naming_consistency, 1.0);
  EXPECT_DOUBLE_EQ(b.variable_naming_consistency, 1.0);
  EXPECT_DOUBLE_EQ(a.avg_function_length, b.avg_function_length);
  EXPECT_DOUBLE_EQ(a.avg_nesting_depth, b.avg_nesting_depth);
  EXPECT_DOUBLE_EQ(a.indentation_consistency, b.indentation_consistency);
}

TEST(StyleVector, AppendingCommentLinesRaisesRatio) {
  SourceUnit u = unit(Language::Java, "class A {\n  int count;\n  void run() { }\n}\n");
  auto before = extract_style_vector(u);
  u.text += "// trailing note\n";
  auto after = extract_style_vector(u);
  EXPECT_GT(after.comment_ratio, before.comment_ratio);
  EXPECT_EQ(after.function_naming_consistency, before.function_naming_consistency);
  EXPECT_EQ(after.variable_naming_consistency, before.variable_naming_consistency);
  EXPECT_EQ(after.class_naming_consistency, before.class_naming_consistency);
  EXPECT_EQ(after.constant_naming_consistency, before.constant_naming_consistency);
}

TEST(PairVector, IndexContract) {
  StyleVector h, c;
  h.comment_ratio = 0.1;
  c.comment_ratio = 0.4;
  auto p = pair_feature_vector(h, c);
  EXPECT_EQ(p.flattened.size(), 20u);
  EXPECT_DOUBLE_EQ(p.flattened[7], 0.1);
  EXPECT_DOUBLE_EQ(p.flattened[17], 0.4);
  EXPECT_EQ(kFeatureNames[7], "comment_ratio");
}

TEST(PairVector, SymmetryAndZeros) {
  StyleVector v = StyleVector::from_values(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  auto p = pair_feature_vector(v, v);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(p.flattened[i], p.flattened[i + 10]);
  auto z = pair_feature_vector(StyleVector{}, StyleVector{});
  for (double x : z.flattened) EXPECT_EQ(x, 0.0);
}

TEST(FeatureGroups, PartitionTheTenFeatures) {
  std::vector<int> seen(10, 0);
  for (auto g : {FeatureGroup::Naming, FeatureGroup::Structure, FeatureGroup::Readability})
    for (auto i : feature_group_indices(g)) ++seen[i];
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_EQ(feature_group_indices(FeatureGroup::Naming).size(), 4u);
}

void expect_matches(const synth::Rendered& r, const StyleVector& v, const std::string& where) {
  const auto& e = r.expected;
  EXPECT_NEAR(v.comment_ratio, e.comment_ratio, 1e-12) << where;
  EXPECT_NEAR(v.avg_function_length, e.avg_function_length, 1e-12) << where;
  EXPECT_NEAR(v.avg_nesting_depth, e.avg_nesting_depth, 1e-12) << where;
  EXPECT_NEAR(v.indentation_consistency, e.indentation_consistency, 1e-12) << where;
  EXPECT_NEAR(v.function_naming_consistency, e.function_naming_consistency, 1e-12) << where;
  EXPECT_NEAR(v.class_naming_consistency, e.class_naming_consistency, 1e-12) << where;
  EXPECT_NEAR(v.constant_naming_consistency, e.constant_naming_consistency, 1e-12) << where;
  EXPECT_NEAR(v.avg_function_name_length, e.avg_function_name_length, 1e-12) << where;
  for (double x : v.values()) EXPECT_TRUE(std::isfinite(x)) << where;
  EXPECT_GE(v.variable_naming_consistency, 0.2) << where;
  EXPECT_LE(v.variable_naming_consistency, 1.0) << where;
}

TEST(StyleVector, GeneratedProgramsMatchBookkeeping) {
  for (Language lang : kLanguages) {
    Rng rng(100 + static_cast<int>(lang));
    for (int i = 0; i < 150; ++i) {
      auto prog = synth::random_program(rng, lang);
      synth::RenderOptions ro{rng.uniform() * 0.3, static_cast<int>(rng.below(3)), static_cast<int>(rng.below(2))};
      auto r = synth::render(prog, rng, ro);
      auto where = std::string(to_string(lang)) + " #" + std::to_string(i) + "\n" + r.text;
      StyleVector v;
      ASSERT_NO_THROW(v = extract_style_vector(unit(lang, r.text))) << where;
      expect_matches(r, v, where);
      if (HasFailure()) return;
    }
  }
}

}  // namespace
}  // namespace lpcode
