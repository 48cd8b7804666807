#pragma once

// Random program generator for the four corpus languages. Every rendered
// program carries the feature values it must produce, computed from the
// generator's own bookkeeping rather than from the text.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lpcode/random.hpp"
#include "lpcode/style_features.hpp"
#include "lpcode/types.hpp"

namespace lpcode::synth {

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {
      "count", "value",  "item",   "total", "buffer", "result", "node",   "limit",  "size",
      "offset", "score", "label",  "token", "state",  "entry",  "record", "path",   "width",
      "height", "weight", "flag",  "cursor", "delta", "amount", "price",  "level",  "queue",
      "stack",  "graph", "matrix", "sample", "window", "prefix", "suffix", "parent", "child",
      "key",    "bucket", "target", "source", "step",  "scale",  "factor", "margin", "span"};
  return words;
}

struct Name {
  std::vector<std::string> words;  // at least two
  NamingPattern pattern = NamingPattern::SnakeCase;

  std::string render() const {
    std::string out;
    auto cap = [](std::string w) {
      w[0] = static_cast<char>(w[0] - 'a' + 'A');
      return w;
    };
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto& w = words[i];
      switch (pattern) {
        case NamingPattern::CamelCase: out += i == 0 ? w : cap(w); break;
        case NamingPattern::PascalCase: out += cap(w); break;
        case NamingPattern::SnakeCase:
        case NamingPattern::Other:
          if (i) out += '_';
          out += w;
          break;
        case NamingPattern::UpperSnakeCase: {
          if (i) out += '_';
          for (char c : w) out += static_cast<char>(c - 'a' + 'A');
          break;
        }
      }
    }
    return pattern == NamingPattern::Other ? "_" + out : out;
  }
};

enum class StmtKind { Decl, Assign, If, For, While, Comment, BlockComment };

struct Stmt {
  StmtKind kind = StmtKind::Assign;
  int target = -1;  // index into the function's names (params then locals)
  int operand = -1;
  int literal = 0;
  int loop_var = -1;
  bool has_else = false;
  std::vector<Stmt> body, orelse;
  std::string text;
};

struct Function {
  Name name;
  std::vector<Name> params;
  std::vector<Name> locals;  // declared first, then loop variables
  std::vector<Stmt> body;
  int doc_lines = 0;  // 0 none, 1 single line, 3 multi-line
  std::string doc;
  int owner = -1;  // Python: index of the class holding the method
};

struct Record {
  Name name;
  std::vector<Name> fields;
  bool keyword_struct = true;  // C++: struct vs class
};

enum class ConstForm { Define, Const, Constexpr };

struct Program {
  Language language = Language::C;
  std::vector<Name> constants;
  std::vector<ConstForm> const_forms;
  std::vector<Record> classes;
  std::vector<Function> functions;
  Name main_class;  // Java
  std::string indent = "    ";
  bool allman = false;
  bool sloppy = false;  // brace languages: jitter indentation widths
};

/// Expected feature values of one rendering.
struct Expected {
  double comment_ratio = 0;
  double avg_function_length = 0;
  double avg_nesting_depth = 0;
  double indentation_consistency = 1;
  double function_naming_consistency = 1;
  double class_naming_consistency = 1;
  double constant_naming_consistency = 1;
  double avg_function_name_length = 0;
  std::size_t functions = 0;
  std::size_t blocks = 0;
};

struct Rendered {
  std::string text;
  Expected expected;
};

struct GenOptions {
  double naming_mix = 0.4;       // chance a name leaves the file's dominant pattern
  double inner_comment = 0.08;   // chance per statement slot of a comment statement
  double doc_chance = 0.3;
  double empty_chance = 0.05;    // file without functions
  int max_depth = 4;
  int max_statements = 8;
};

struct RenderOptions {
  double eol_comment = 0.0;  // chance per eligible line of a trailing comment
  int header_lines = 0;
  int between_lines = 0;     // comment lines before each function
};

namespace detail {

inline std::string sentence(Rng& rng, std::size_t words) {
  const auto& v = vocabulary();
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) s += ' ';
    s += v[rng.below(v.size())];
  }
  return s;
}

inline NamingPattern pick_pattern(Rng& rng, NamingPattern dominant, double mix) {
  if (rng.uniform() >= mix) return dominant;
  static constexpr std::array<NamingPattern, 5> all = {NamingPattern::CamelCase, NamingPattern::SnakeCase,
                                                       NamingPattern::PascalCase, NamingPattern::UpperSnakeCase,
                                                       NamingPattern::Other};
  return all[rng.below(all.size())];
}

class Namer {
 public:
  explicit Namer(Rng& rng) : rng_(rng) {}

  Name make(NamingPattern p) {
    const auto& v = vocabulary();
    for (;;) {
      Name n;
      std::size_t len = 2 + rng_.below(2);
      for (std::size_t i = 0; i < len; ++i) n.words.push_back(v[rng_.below(v.size())]);
      std::string key;
      for (const auto& w : n.words) key += w + "|";
      if (!used_.insert(key).second) continue;
      n.pattern = p;
      return n;
    }
  }

 private:
  Rng& rng_;
  std::set<std::string> used_;
};

}  // namespace detail

inline Program random_program(Rng& rng, Language lang, const GenOptions& opt = {}) {
  Program p;
  p.language = lang;
  detail::Namer namer(rng);
  auto dominant = [&] { return detail::pick_pattern(rng, NamingPattern::SnakeCase, 1.0); };
  const NamingPattern fn_dom = dominant(), var_dom = dominant(), cls_dom = dominant(), const_dom = dominant();
  auto name = [&](NamingPattern dom) { return namer.make(detail::pick_pattern(rng, dom, opt.naming_mix)); };

  static const std::array<std::string, 4> indents = {"    ", "  ", "\t", "        "};
  p.indent = lang == Language::Python ? indents[rng.below(3)] : indents[rng.below(indents.size())];
  p.allman = lang != Language::Python && rng.uniform() < 0.3;
  p.sloppy = lang != Language::Python && rng.uniform() < 0.2;
  p.main_class = namer.make(detail::pick_pattern(rng, NamingPattern::PascalCase, opt.naming_mix));

  for (std::size_t i = 0, n = rng.below(4); i < n; ++i) {
    p.constants.push_back(name(const_dom));
    p.const_forms.push_back(static_cast<ConstForm>(rng.below(3)));
  }
  for (std::size_t i = 0, n = rng.below(3); i < n; ++i) {
    Record r;
    r.name = name(cls_dom);
    r.keyword_struct = rng.uniform() < 0.5;
    for (std::size_t k = 0, m = lang == Language::Python ? 0 : 1 + rng.below(3); k < m; ++k)
      r.fields.push_back(name(var_dom));
    p.classes.push_back(std::move(r));
  }

  const std::size_t nfun = rng.uniform() < opt.empty_chance ? 0 : 1 + rng.below(6);
  for (std::size_t i = 0; i < nfun; ++i) {
    Function f;
    f.name = name(fn_dom);
    for (std::size_t k = 0, n = rng.below(4); k < n; ++k) f.params.push_back(name(var_dom));
    for (std::size_t k = 0, n = 1 + rng.below(3); k < n; ++k) f.locals.push_back(name(var_dom));
    if (lang == Language::Python && !p.classes.empty() && rng.uniform() < 0.4)
      f.owner = static_cast<int>(rng.below(p.classes.size()));
    if (rng.uniform() < opt.doc_chance) {
      f.doc_lines = rng.uniform() < 0.5 ? 1 : 3;
      f.doc = detail::sentence(rng, 3);
    }

    const int declared = static_cast<int>(f.params.size() + f.locals.size());
    auto operand = [&](int limit) { return limit > 0 && rng.uniform() < 0.7 ? static_cast<int>(rng.below(limit)) : -1; };

    for (std::size_t k = 0; k < f.locals.size(); ++k) {
      Stmt s;
      s.kind = StmtKind::Decl;
      s.target = static_cast<int>(f.params.size() + k);
      s.operand = operand(s.target);
      s.literal = static_cast<int>(rng.below(100));
      f.body.push_back(s);
    }

    auto gen_block = [&](auto& self, int depth, std::size_t count) -> std::vector<Stmt> {
      std::vector<Stmt> out;
      for (std::size_t k = 0; k < count; ++k) {
        Stmt s;
        s.literal = static_cast<int>(1 + rng.below(50));
        s.operand = operand(declared);
        double r = rng.uniform();
        if (r < opt.inner_comment) {
          s.kind = rng.uniform() < 0.7 ? StmtKind::Comment : StmtKind::BlockComment;
          s.text = detail::sentence(rng, 2 + rng.below(4));
        } else if (depth < opt.max_depth && r < 0.45) {
          s.kind = r < 0.25 ? StmtKind::If : (r < 0.37 ? StmtKind::For : StmtKind::While);
          if (s.kind == StmtKind::For) {
            s.loop_var = static_cast<int>(f.params.size() + f.locals.size());
            f.locals.push_back(name(var_dom));
          }
          s.body = self(self, depth + 1, 1 + rng.below(3));
          s.has_else = s.kind == StmtKind::If && rng.uniform() < 0.4;
          if (s.has_else) s.orelse = self(self, depth + 1, 1 + rng.below(3));
        } else {
          s.kind = StmtKind::Assign;
          s.target = static_cast<int>(f.params.size() + rng.below(declared - f.params.size()));
        }
        out.push_back(std::move(s));
      }
      // Blocks end on code so that Python spans end where the block does.
      if (out.empty() || out.back().kind == StmtKind::Comment || out.back().kind == StmtKind::BlockComment) {
        Stmt s;
        s.kind = StmtKind::Assign;
        s.target = static_cast<int>(f.params.size());
        s.operand = operand(declared);
        s.literal = 1;
        out.push_back(s);
      }
      return out;
    };
    auto rest = gen_block(gen_block, 1, 1 + rng.below(static_cast<std::uint64_t>(opt.max_statements)));
    for (auto& s : rest) f.body.push_back(std::move(s));
    p.functions.push_back(std::move(f));
  }
  return p;
}

/// Same program with every name switched to one pattern per entity kind.
inline Program normalize_naming(Program p, NamingPattern functions, NamingPattern variables, NamingPattern classes,
                                NamingPattern constants) {
  for (auto& c : p.constants) c.pattern = constants;
  for (auto& r : p.classes) {
    r.name.pattern = classes;
    for (auto& f : r.fields) f.pattern = variables;
  }
  p.main_class.pattern = classes;
  for (auto& f : p.functions) {
    f.name.pattern = functions;
    for (auto& n : f.params) n.pattern = variables;
    for (auto& n : f.locals) n.pattern = variables;
  }
  return p;
}

namespace detail {

struct Line {
  std::string indent;
  std::string content;
  bool comment = false;
  bool eol_ok = false;
};

class Renderer {
 public:
  Renderer(const Program& p, const RenderOptions& ro, Rng& rng) : p_(p), ro_(ro), rng_(rng) {
    python_ = p.language == Language::Python;
    cmark_ = python_ ? "#" : "//";
  }

  Rendered run() {
    for (int i = 0; i < ro_.header_lines; ++i) comment_line(0, sentence(rng_, 4));
    switch (p_.language) {
      case Language::C:
      case Language::Cpp: c_family(); break;
      case Language::Java: java(); break;
      case Language::Python: python(); break;
    }
    for (auto& l : lines_)
      if (l.eol_ok && ro_.eol_comment > 0 && rng_.uniform() < ro_.eol_comment) {
        l.content += "  " + cmark_ + " " + sentence(rng_, 3);
        l.comment = true;
      }
    return finish();
  }

 private:
  std::string indent(int level) {
    std::string s;
    for (int i = 0; i < level; ++i) s += p_.indent;
    if (p_.sloppy && level > 0 && rng_.uniform() < 0.25) s += rng_.uniform() < 0.5 ? " " : "\t";
    return s;
  }

  std::size_t add(int level, std::string content, bool comment = false, bool eol_ok = true) {
    lines_.push_back({level > 0 ? indent(level) : "", std::move(content), comment, eol_ok});
    return lines_.size();
  }
  std::size_t raw(std::string ind, std::string content, bool comment) {
    lines_.push_back({std::move(ind), std::move(content), comment, false});
    return lines_.size();
  }
  void blank() { lines_.push_back({"", "", false, false}); }
  void comment_line(int level, const std::string& text) { add(level, cmark_ + " " + text, true, false); }

  void block_comment(int level, const std::string& text, bool multi) {
    if (python_) {
      comment_line(level, text);
      comment_line(level, text);
      return;
    }
    if (!multi) {
      add(level, "/* " + text + " */", true, false);
      return;
    }
    std::string ind = level > 0 ? indent(level) : "";
    raw(ind, "/*", true);
    raw(ind + " ", "* " + text, true);
    raw(ind + " ", "*/", true);
  }

  std::string var(const Function& f, int i) const {
    auto n = static_cast<std::size_t>(i);
    return n < f.params.size() ? f.params[n].render() : f.locals[n - f.params.size()].render();
  }
  std::string expr(const Function& f, const Stmt& s) const {
    if (s.operand < 0) return std::to_string(s.literal);
    return var(f, s.operand) + " + " + std::to_string(s.literal);
  }

  void open(int level, const std::string& head) {
    if (p_.allman) {
      add(level, head);
      add(level, "{");
    } else {
      add(level, head + " {");
    }
  }

  void stmts(const Function& f, const std::vector<Stmt>& body, int level, int depth) {
    for (const auto& s : body) stmt(f, s, level, depth);
  }

  void stmt(const Function& f, const Stmt& s, int level, int depth) {
    const std::string semi = python_ ? "" : ";";
    const std::string type = p_.language == Language::Python ? "" : "int ";
    switch (s.kind) {
      case StmtKind::Comment: comment_line(level, s.text); return;
      case StmtKind::BlockComment: block_comment(level, s.text, s.text.size() % 2 == 0); return;
      case StmtKind::Decl: add(level, type + var(f, s.target) + " = " + expr(f, s) + semi); return;
      case StmtKind::Assign: add(level, var(f, s.target) + " = " + expr(f, s) + semi); return;
      default: break;
    }
    blocks_.push_back(depth + 1);
    std::string lit = std::to_string(s.literal);
    if (python_) {
      std::string head;
      if (s.kind == StmtKind::If) head = "if " + expr(f, s) + " > " + lit + ":";
      if (s.kind == StmtKind::While) head = "while " + expr(f, s) + " < " + lit + ":";
      if (s.kind == StmtKind::For) head = "for " + var(f, s.loop_var) + " in range(" + lit + "):";
      add(level, head);
      stmts(f, s.body, level + 1, depth + 1);
      if (s.has_else) {
        add(level, "else:");
        stmts(f, s.orelse, level + 1, depth + 1);
      }
      return;
    }
    std::string head;
    if (s.kind == StmtKind::If) head = "if (" + expr(f, s) + " > " + lit + ")";
    if (s.kind == StmtKind::While) head = "while (" + expr(f, s) + " < " + lit + ")";
    if (s.kind == StmtKind::For) {
      auto v = var(f, s.loop_var);
      head = "for (int " + v + " = 0; " + v + " < " + lit + "; " + v + "++)";
    }
    open(level, head);
    stmts(f, s.body, level + 1, depth + 1);
    if (s.has_else) {
      if (p_.allman) {
        add(level, "}");
        add(level, "else");
        add(level, "{");
      } else {
        add(level, "} else {");
      }
      stmts(f, s.orelse, level + 1, depth + 1);
    }
    add(level, "}");
  }

  void function(const Function& f, int level, const std::string& prefix) {
    for (int i = 0; i < ro_.between_lines; ++i) comment_line(level, sentence(rng_, 4));
    if (!python_ && f.doc_lines) block_comment(level, f.doc, f.doc_lines == 3);
    std::string params;
    if (python_ && f.owner >= 0) params = "self";
    for (const auto& n : f.params) {
      if (!params.empty()) params += ", ";
      params += (python_ ? "" : "int ") + n.render();
    }
    if (params.empty() && p_.language == Language::C) params = "void";
    std::size_t start;
    blocks_.push_back(1);
    if (python_) {
      start = add(level, "def " + f.name.render() + "(" + params + "):");
      if (f.doc_lines == 1) {
        add(level + 1, "\"\"\"" + f.doc + ".\"\"\"", true, false);
      } else if (f.doc_lines == 3) {
        add(level + 1, "\"\"\"" + f.doc + ".", true, false);
        add(level + 1, f.doc + ".", true, false);
        add(level + 1, "\"\"\"", true, false);
      }
      stmts(f, f.body, level + 1, 1);
      auto end = add(level + 1, "return " + var(f, static_cast<int>(f.params.size())));
      spans_.push_back(end - start + 1);
    } else {
      start = lines_.size() + 1;
      open(level, prefix + "int " + f.name.render() + "(" + params + ")");
      stmts(f, f.body, level + 1, 1);
      add(level + 1, "return " + var(f, static_cast<int>(f.params.size())) + ";");
      auto end = add(level, "}");
      spans_.push_back(end - start + 1);
    }
    names_.push_back(f.name);
  }

  void c_family() {
    const bool cpp = p_.language == Language::Cpp;
    for (std::size_t i = 0; i < p_.constants.size(); ++i) {
      auto n = p_.constants[i].render();
      auto form = cpp ? p_.const_forms[i] : ConstForm::Define;
      if (form == ConstForm::Define) add(0, "#define " + n + " " + std::to_string(10 + i), false, false);
      if (form == ConstForm::Const) add(0, "const int " + n + " = " + std::to_string(10 + i) + ";");
      if (form == ConstForm::Constexpr) add(0, "constexpr int " + n + " = " + std::to_string(10 + i) + ";");
      consts_.push_back(p_.constants[i]);
    }
    if (!p_.constants.empty()) blank();
    for (const auto& r : p_.classes) {
      const bool as_struct = !cpp || r.keyword_struct;
      open(0, (as_struct ? "struct " : "class ") + r.name.render());
      if (!as_struct) add(0, "public:");
      for (const auto& fl : r.fields) add(1, "int " + fl.render() + ";");
      add(0, "};");
      blank();
      classes_.push_back(r.name);
    }
    for (const auto& f : p_.functions) {
      function(f, 0, "");
      blank();
    }
    if (lines_.empty()) add(0, "int " + std::string("unused_value") + " = 0;");
  }

  void java() {
    open(0, "public class " + p_.main_class.render());
    classes_.push_back(p_.main_class);
    for (std::size_t i = 0; i < p_.constants.size(); ++i) {
      add(1, "static final int " + p_.constants[i].render() + " = " + std::to_string(10 + i) + ";");
      consts_.push_back(p_.constants[i]);
    }
    for (const auto& f : p_.functions) {
      blank();
      function(f, 1, "static ");
    }
    add(0, "}");
    for (const auto& r : p_.classes) {
      blank();
      open(0, "class " + r.name.render());
      for (const auto& fl : r.fields) add(1, "int " + fl.render() + ";");
      add(0, "}");
      classes_.push_back(r.name);
    }
  }

  void python() {
    for (std::size_t i = 0; i < p_.constants.size(); ++i) {
      add(0, p_.constants[i].render() + " = " + std::to_string(10 + i));
      consts_.push_back(p_.constants[i]);
    }
    for (const auto& f : p_.functions) {
      if (f.owner >= 0) continue;
      blank();
      function(f, 0, "");
    }
    for (std::size_t c = 0; c < p_.classes.size(); ++c) {
      blank();
      add(0, "class " + p_.classes[c].name.render() + ":");
      classes_.push_back(p_.classes[c].name);
      bool any = false;
      for (const auto& f : p_.functions)
        if (f.owner == static_cast<int>(c)) {
          function(f, 1, "");
          any = true;
        }
      if (!any) add(1, "pass");
    }
    if (lines_.empty()) add(0, "pass");
  }

  static double consistency(const std::vector<Name>& names) {
    if (names.empty()) return 1.0;
    std::map<NamingPattern, std::size_t> counts;
    std::size_t best = 0;
    for (const auto& n : names) best = std::max(best, ++counts[n.pattern]);
    return static_cast<double>(best) / static_cast<double>(names.size());
  }

  Rendered finish() {
    Rendered r;
    std::size_t comments = 0;
    std::map<std::string, std::size_t> indents;
    std::size_t indented = 0, modal = 0;
    for (const auto& l : lines_) {
      r.text += l.indent + l.content + "\n";
      if (l.comment) ++comments;
      if (!l.indent.empty() && !l.content.empty()) {
        ++indented;
        modal = std::max(modal, ++indents[l.indent]);
      }
    }
    auto& e = r.expected;
    e.comment_ratio = static_cast<double>(comments) / static_cast<double>(lines_.size());
    e.indentation_consistency = indented ? static_cast<double>(modal) / static_cast<double>(indented) : 1.0;
    e.functions = spans_.size();
    e.blocks = blocks_.size();
    double len = 0, depth = 0, name_len = 0;
    for (auto s : spans_) len += static_cast<double>(s);
    for (auto d : blocks_) depth += d;
    for (const auto& n : names_) name_len += static_cast<double>(n.render().size());
    e.avg_function_length = spans_.empty() ? 0 : len / static_cast<double>(spans_.size());
    e.avg_nesting_depth = blocks_.empty() ? 0 : depth / static_cast<double>(blocks_.size());
    e.avg_function_name_length = names_.empty() ? 0 : name_len / static_cast<double>(names_.size());
    e.function_naming_consistency = consistency(names_);
    e.class_naming_consistency = consistency(classes_);
    e.constant_naming_consistency = consistency(consts_);
    return r;
  }

  const Program& p_;
  const RenderOptions& ro_;
  Rng& rng_;
  bool python_ = false;
  std::string cmark_;
  std::vector<Line> lines_;
  std::vector<std::size_t> spans_;
  std::vector<int> blocks_;
  std::vector<Name> names_, classes_, consts_;
};

}  // namespace detail

inline Rendered render(const Program& p, Rng& rng, const RenderOptions& ro = {}) {
  return detail::Renderer(p, ro, rng).run();
}

// ---------------------------------------------------------------------------
// Synthetic corpus

struct CorpusOptions {
  std::vector<Language> languages{kLanguages.begin(), kLanguages.end()};
  std::size_t humans = 250;  // per language; each gets one paraphrase per model
  std::uint64_t seed = 7;
};

/// Human files have mixed naming and few comments. Each model's paraphrase
/// keeps the program's structure, normalizes naming and adds comment lines
/// outside function bodies plus trailing comments.
inline std::vector<SourceUnit> synthetic_corpus(const CorpusOptions& opt) {
  std::vector<SourceUnit> units;
  GenOptions human;
  human.naming_mix = 0.15;
  human.inner_comment = 0.03;
  human.doc_chance = 0.1;
  human.empty_chance = 0;
  for (Language lang : opt.languages) {
    auto rng = Rng::derive(opt.seed, static_cast<std::uint64_t>(lang));
    for (std::size_t h = 0; h < opt.humans; ++h) {
      auto prog = random_program(rng, lang, human);
      char id[64];
      std::snprintf(id, sizeof id, "%s-h%04zu", std::string(to_string(lang)).c_str(), h);
      SourceUnit u;
      u.id = id;
      u.language = lang;
      u.generator = Generator::Human;
      u.text = render(prog, rng, RenderOptions{0.02, 0, 0}).text;
      units.push_back(u);
      for (std::size_t g = 0; g < kLlmGenerators.size(); ++g) {
        auto fn = g % 2 ? NamingPattern::SnakeCase : NamingPattern::CamelCase;
        auto para = normalize_naming(prog, fn, fn, NamingPattern::PascalCase, NamingPattern::UpperSnakeCase);
        RenderOptions ro{0.35 + 0.05 * static_cast<double>(g), 2 + static_cast<int>(g % 3), 1};
        SourceUnit c;
        c.id = u.id + "-" + std::string(to_string(kLlmGenerators[g]));
        c.language = lang;
        c.generator = kLlmGenerators[g];
        c.origin_id = u.id;
        c.text = render(para, rng, ro).text;
        units.push_back(std::move(c));
      }
    }
  }
  return units;
}

}  // namespace lpcode::synth
