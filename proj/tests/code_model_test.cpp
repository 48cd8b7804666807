#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "lpcode/comments.hpp"
#include "lpcode/entities.hpp"
#include "lpcode/parser.hpp"

namespace lpcode {
namespace {

SourceUnit unit(Language lang, std::string text) {
  SourceUnit u;
  u.id = "u";
  u.language = lang;
  u.text = std::move(text);
  return u;
}

int count_kind(const SyntaxTree& t, std::string_view kind) {
  int n = 0;
  for (const auto& node : t.nodes())
    if (node.kind == kind) ++n;
  return n;
}

void expect_spans_nested(const SyntaxTree& t) {
  for (std::uint32_t i = 0; i < t.size(); ++i) {
    for (auto c : t.node(i).children) {
      EXPECT_TRUE(t.node(i).span.contains(t.node(c).span))
          << t.node(i).kind << " does not contain " << t.node(c).kind;
      EXPECT_EQ(t.node(c).parent, i);
    }
    const auto& ch = t.node(i).children;
    for (std::size_t k = 1; k < ch.size(); ++k)
      EXPECT_LE(t.node(ch[k - 1]).start_byte, t.node(ch[k]).start_byte);
  }
}

TEST(Parse, PythonAssignment) {
  auto t = parse(unit(Language::Python, "x = 1\n"));
  EXPECT_EQ(t.root().kind, "module");
  ASSERT_EQ(t.root().children.size(), 1u);
  EXPECT_EQ(count_kind(t, "assignment"), 1);
  EXPECT_EQ(t.root().span.start_line, 1u);
  EXPECT_EQ(t.root().span.end_line, 1u);
}

TEST(Parse, CFunction) {
  auto t = parse(unit(Language::C, "int f(){return 0;}"));
  EXPECT_EQ(count_kind(t, "function_definition"), 1);
}

TEST(Parse, MalformedPythonThrows) {
  EXPECT_THROW(parse(unit(Language::Python, "def f(:")), ParseError);
  EXPECT_FALSE(is_parseable(unit(Language::Python, "def f(:")));
  EXPECT_TRUE(is_parseable(unit(Language::Python, "x = 1\n")));
}

TEST(Parse, EmptyTextIsNotParseable) {
  for (auto lang : kLanguages) EXPECT_FALSE(is_parseable(unit(lang, "")));
}

TEST(Parse, MalformedInEveryLanguage) {
  EXPECT_FALSE(is_parseable(unit(Language::C, "int f( { return; }")));
  EXPECT_FALSE(is_parseable(unit(Language::Cpp, "class A { void f( };")));
  EXPECT_FALSE(is_parseable(unit(Language::Java, "class A { void f() { int x = ; } }")));
}

TEST(Parse, DeterministicAndNested) {
  const std::string src =
      "#include <stdio.h>\n"
      "/* header\n   comment */\n"
      "int main(int argc, char **argv) {\n"
      "  for (int i = 0; i < argc; i++) {\n"
      "    if (i) printf(\"%d\\n\", i);\n"
      "  }\n"
      "  return 0;\n"
      "}\n";
  auto a = parse(unit(Language::C, src));
  auto b = parse(unit(Language::C, src));
  EXPECT_TRUE(a == b);
  expect_spans_nested(a);
  EXPECT_EQ(a.root().span.end_line, 9u);
}

TEST(Parse, InvalidUtf8IsReplaced) {
  std::string src = "x = \"caf\xE9\"\n";  // latin-1 byte
  auto t = parse(unit(Language::Python, src));
  EXPECT_NE(t.source().find("\xEF\xBF\xBD"), std::string::npos);
}

TEST(Entities, JavaOneOfEach) {
  auto u = unit(Language::Java, "class A { static final int MAX=1; void go(int k){} }");
  auto e = extract_entities(parse(u), u);
  EXPECT_EQ(e.classes, std::vector<std::string>{"A"});
  ASSERT_EQ(e.functions.size(), 1u);
  EXPECT_EQ(e.functions[0].name, "go");
  EXPECT_EQ(e.variables, std::vector<std::string>{"k"});
  EXPECT_EQ(e.constants, std::vector<std::string>{"MAX"});
}

TEST(Entities, PythonFunction) {
  auto u = unit(Language::Python, "def f(a):\n  b=1\n");
  auto e = extract_entities(parse(u), u);
  ASSERT_EQ(e.functions.size(), 1u);
  EXPECT_EQ(e.functions[0].name, "f");
  EXPECT_EQ(e.functions[0].start_line, 1u);
  EXPECT_EQ(e.functions[0].end_line, 2u);
  EXPECT_EQ(e.variables, (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(e.classes.empty());
  EXPECT_TRUE(e.constants.empty());
}

TEST(Entities, CMacroConstant) {
  auto u = unit(Language::C, "#define LIMIT 10\nint g(void){int x=0; return x;}");
  auto e = extract_entities(parse(u), u);
  EXPECT_EQ(e.constants, std::vector<std::string>{"LIMIT"});
  ASSERT_EQ(e.functions.size(), 1u);
  EXPECT_EQ(e.functions[0].name, "g");
  EXPECT_EQ(e.variables, std::vector<std::string>{"x"});
}

TEST(Entities, CConstAtFileScopeOnly) {
  auto u = unit(Language::C,
                "#define SQ(x) ((x)*(x))\n"
                "const int K = 3;\n"
                "int proto(int);\n"
                "struct Point { int px; int py; };\n"
                "int h(const int n) { const int local = n; return local; }\n");
  auto e = extract_entities(parse(u), u);
  EXPECT_EQ(e.constants, std::vector<std::string>{"K"});  // function-like macro excluded
  EXPECT_EQ(e.classes, std::vector<std::string>{"Point"});
  EXPECT_EQ(e.variables, (std::vector<std::string>{"px", "py", "n", "local"}));
  ASSERT_EQ(e.functions.size(), 1u);
  EXPECT_EQ(e.functions[0].name, "h");
}

TEST(Entities, CppMethodsAndQualifiedNames) {
  auto u = unit(Language::Cpp,
                "namespace ns { constexpr int kMax = 4; }\n"
                "class Shape {\n"
                " public:\n"
                "  Shape(int w) : w_(w) {}\n"
                "  int area() const { return w_; }\n"
                "  void draw();\n"
                " private:\n"
                "  int w_;\n"
                "};\n"
                "void Shape::draw() { for (auto& v : items) { } }\n");
  auto e = extract_entities(parse(u), u);
  EXPECT_EQ(e.classes, std::vector<std::string>{"Shape"});
  EXPECT_EQ(e.constants, std::vector<std::string>{"kMax"});
  std::vector<std::string> fn;
  for (auto& f : e.functions) fn.push_back(f.name);
  EXPECT_EQ(fn, (std::vector<std::string>{"Shape", "area", "draw"}));
  EXPECT_EQ(e.variables, (std::vector<std::string>{"w", "w_", "v"}));
}

TEST(Entities, PythonConstantsAndMembers) {
  auto u = unit(Language::Python,
                "MAX_SIZE = 10\n"
                "NEG = -1\n"
                "table = dict()\n"
                "class Box:\n"
                "    def __init__(self, width):\n"
                "        self.width = width\n"
                "        self.width = 2\n"
                "        for i, j in pairs:\n"
                "            pass\n");
  auto e = extract_entities(parse(u), u);
  EXPECT_EQ(e.constants, (std::vector<std::string>{"MAX_SIZE", "NEG"}));
  EXPECT_EQ(e.classes, std::vector<std::string>{"Box"});
  EXPECT_EQ(e.variables, (std::vector<std::string>{"table", "self", "width", "i", "j"}));
}

TEST(Entities, NestingDepth) {
  auto u = unit(Language::C,
                "int f(int n) {\n"
                "  while (n) {\n"
                "    if (n > 2) { n--; } else if (n > 1) { n -= 2; } else { n = 0; }\n"
                "  }\n"
                "  { int scoped = 0; }\n"
                "  return n;\n"
                "}\n");
  auto e = extract_entities(parse(u), u);
  std::vector<int> depths;
  for (auto& b : e.block_nodes) depths.push_back(b.depth);
  // function body, loop, if, chained else-if at the same level
  EXPECT_EQ(depths, (std::vector<int>{1, 2, 3, 3}));
}

TEST(Entities, PythonElifIsChained) {
  auto u = unit(Language::Python,
                "def f(a):\n"
                "    for x in a:\n"
                "        if x:\n"
                "            pass\n"
                "        elif a:\n"
                "            pass\n");
  auto e = extract_entities(parse(u), u);
  std::vector<int> depths;
  for (auto& b : e.block_nodes) depths.push_back(b.depth);
  EXPECT_EQ(depths, (std::vector<int>{1, 2, 3, 3}));
}

TEST(Entities, JavaDetails) {
  auto u = unit(Language::Java,
                "public class Main {\n"
                "  private final String label = \"x\";\n"
                "  public static final double RATE_LIMIT = 2.0;\n"
                "  interface Op { int ZERO = 0; void run(); }\n"
                "  Main(int seed) { }\n"
                "  void go(String... rest) {\n"
                "    for (String s : rest) { try { } catch (Exception err) { } }\n"
                "  }\n"
                "}\n");
  auto e = extract_entities(parse(u), u);
  EXPECT_EQ(e.classes, (std::vector<std::string>{"Main", "Op"}));
  EXPECT_EQ(e.constants, (std::vector<std::string>{"RATE_LIMIT", "ZERO"}));
  std::vector<std::string> fn;
  for (auto& f : e.functions) fn.push_back(f.name);
  EXPECT_EQ(fn, (std::vector<std::string>{"Main", "go"}));  // abstract run() excluded
  EXPECT_EQ(e.variables, (std::vector<std::string>{"label", "seed", "rest", "s", "err"}));
}

TEST(Comments, LineComment) {
  auto m = detect_comment_lines(unit(Language::C, "// a\nint x;\n"));
  EXPECT_EQ(m.comment_lines, 1u);
  EXPECT_EQ(m.total_lines, 2u);
}

TEST(Comments, BlockCommentSpansLines) {
  auto m = detect_comment_lines(unit(Language::C, "/*a\nb*/\nint x;\n"));
  EXPECT_EQ(m.comment_lines, 2u);
  EXPECT_EQ(m.total_lines, 3u);
}

TEST(Comments, PythonDocstringCounts) {
  auto m = detect_comment_lines(unit(Language::Python, "def f():\n  \"\"\"doc\"\"\"\n  return 1\n"));
  EXPECT_EQ(m.comment_lines, 1u);
  EXPECT_EQ(m.total_lines, 3u);
}

TEST(Comments, HashInCIsNotComment) {
  auto m = detect_comment_lines(unit(Language::C, "#include <a.h>\nint x; // t\n"));
  EXPECT_EQ(m.comment_lines, 1u);
  EXPECT_TRUE(m.per_line[1]);
}

TEST(Comments, StringContentIsNotComment) {
  auto m = detect_comment_lines(unit(Language::Python, "s = '# not a comment'\nt = s\n"));
  EXPECT_EQ(m.comment_lines, 0u);
}

TEST(Comments, JavaKinds) {
  auto m = detect_comment_lines(
      unit(Language::Java, "/** Doc\n * more */\nclass A { // x\n}\n"));
  EXPECT_EQ(m.comment_lines, 3u);
  EXPECT_EQ(m.total_lines, 4u);
}

TEST(Comments, BlankLineProperty) {
  const std::vector<SourceUnit> cases = {
      unit(Language::C, "/* a */\nint x;\n"),
      unit(Language::Python, "# c\n\"\"\"doc\"\"\"\nx = 1\n"),
      unit(Language::Java, "// a\nclass A {}\n"),
      unit(Language::Cpp, "int y; /* tail\n */\n"),
  };
  for (auto u : cases) {
    auto before = detect_comment_lines(u);
    u.text += "\n";
    auto after = detect_comment_lines(u);
    EXPECT_EQ(after.total_lines, before.total_lines + 1);
    EXPECT_EQ(after.comment_lines, before.comment_lines);
    EXPECT_LE(after.comment_lines, after.total_lines);
  }
}

TEST(Tokenize, DropsCommentsKeepsStrings) {
  auto toks = tokenize(unit(Language::C, "int x = 1; // hi\nchar *s = \"a b\";\n"));
  std::vector<std::string> expected = {"int", "x", "=", "1", ";", "char", "*", "s", "=", "\"a b\"", ";"};
  EXPECT_EQ(toks, expected);
}

TEST(Tokenize, PythonHasNoLayoutTokens) {
  auto toks = tokenize(unit(Language::Python, "def f(a):\n    return a  # c\n"));
  std::vector<std::string> expected = {"def", "f", "(", "a", ")", ":", "return", "a"};
  EXPECT_EQ(toks, expected);
}

}  // namespace
}  // namespace lpcode
