#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lpcode/corpus_io.hpp"
#include "lpcode/dataset.hpp"

namespace lpcode {
namespace {

SourceUnit make(std::string id, Language lang, Generator gen, std::string origin, std::string text = "x\n") {
  SourceUnit u;
  u.id = std::move(id);
  u.language = lang;
  u.generator = gen;
  u.origin_id = std::move(origin);
  u.text = std::move(text);
  return u;
}

// humans x 4 paraphrases each, ids zero-padded so sorting is stable.
std::vector<SourceUnit> grid_corpus(Language lang, int humans) {
  std::vector<SourceUnit> units;
  std::string prefix(to_string(lang));
  for (int h = 0; h < humans; ++h) {
    auto hid = prefix + "_h" + std::to_string(h);
    units.push_back(make(hid, lang, Generator::Human, ""));
    for (auto g : kLlmGenerators)
      units.push_back(make(hid + "_" + std::string(to_string(g)), lang, g, hid));
  }
  return units;
}

std::string lines_text(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

// Full-matrix LCS over lines, independent of the library.
double lcs_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<std::vector<int>> t(a.size() + 1, std::vector<int>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  return static_cast<double>(t[a.size()][b.size()]) / static_cast<double>(std::max(a.size(), b.size()));
}

TEST(Lcs, Examples) {
  EXPECT_DOUBLE_EQ(lcs_similarity("a\nb\n", "a\nb\n"), 1.0);
  EXPECT_DOUBLE_EQ(lcs_similarity("a\nb\n", "c\nd\ne\n"), 0.0);
  EXPECT_NEAR(lcs_similarity("x\ny\nz\n", "x\nq\nz\n"), 2.0 / 3.0, 1e-15);
}

TEST(Lcs, TrailingWhitespaceIgnored) {
  EXPECT_DOUBLE_EQ(lcs_similarity("a  \nb\t\r\n", "a\nb\n"), 1.0);
  EXPECT_LT(lcs_similarity("  a\n", "a\n"), 1.0);
}

TEST(Lcs, MatchesFullMatrixOracleAndIsSymmetric) {
  Rng rng(3);
  const std::vector<std::string> vocab = {"a", "b", "c", "{", "}", "return x;"};
  for (int t = 0; t < 500; ++t) {
    std::vector<std::string> a(rng.below(12)), b(rng.below(12));
    for (auto& l : a) l = vocab[rng.below(vocab.size())];
    for (auto& l : b) l = vocab[rng.below(vocab.size())];
    double s = lcs_similarity(lines_text(a), lines_text(b));
    EXPECT_DOUBLE_EQ(s, lcs_oracle(a, b));
    EXPECT_DOUBLE_EQ(s, lcs_similarity(lines_text(b), lines_text(a)));
    EXPECT_EQ(s == 1.0, a == b);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(Percentile, Examples) {
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 75), 3.25);
  EXPECT_DOUBLE_EQ(percentile({9, -1, 4}, 0), -1.0);
  EXPECT_DOUBLE_EQ(percentile({5}, 50), 5.0);
  EXPECT_THROW(percentile({}, 50), EmptyInput);
}

TEST(Percentile, MatchesNumpyLinearMethod) {
  // Reference values from numpy.percentile (default linear method).
  struct Case {
    std::vector<double> v;
    std::vector<double> expect;
  };
  const std::vector<double> qs = {0, 10, 33.3, 50, 75, 90, 100};
  const std::vector<Case> cases = {
      {{3.079, 0.153}, {0.153, 0.4456, 1.127358, 1.616, 2.3475, 2.7864, 3.079}},
      {{-2.142, -4.461, -1.166}, {-4.461, -3.9972, -2.916546, -2.142, -1.654, -1.3612, -1.166}},
      {{-0.915, -4.547, -4.512, 4.992, 1.524, -2.655, -0.651},
       {-4.547, -4.526, -2.658714, -0.915, 0.4365, 2.9112, 4.992}},
      {{4.742, 3.977, 3.442, -1.076, -0.07, 1.767, -4.392, 0.556, -2.285, 3.797},
       {-4.392, -2.4957, -0.073018, 1.1615, 3.70825, 4.0535, 4.742}},
  };
  for (const auto& c : cases)
    for (std::size_t i = 0; i < qs.size(); ++i) EXPECT_NEAR(percentile(c.v, qs[i]), c.expect[i], 1e-12);
}

TEST(NearIdentical, QuartileExample) {
  // Human of ten lines; paraphrases share 1, 2, 3 and 9 of them.
  std::vector<std::string> base;
  for (int i = 0; i < 10; ++i) base.push_back("line" + std::to_string(i));
  std::vector<SourceUnit> units = {make("h", Language::C, Generator::Human, "", lines_text(base))};
  for (int shared : {1, 2, 3, 9}) {
    auto l = base;
    for (int i = shared; i < 10; ++i) l[i] = "other" + std::to_string(i);
    units.push_back(make("p" + std::to_string(shared), Language::C, Generator::ChatGPT, "h", lines_text(l)));
  }
  std::vector<UnitPair> pairs;
  for (std::size_t i = 1; i < units.size(); ++i) pairs.push_back({&units[0], &units[i]});
  auto r = near_identical_report(pairs);
  EXPECT_NEAR(r.threshold.at(Language::C), 0.45, 1e-12);
  EXPECT_EQ(r.removed, (std::vector<bool>{false, false, false, true}));
  auto kept = filter_near_identical(pairs);
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept.back().paraphrase->id, "p3");
}

TEST(NearIdentical, EqualSimilaritiesAllRemovedAndEmptyInput) {
  std::vector<SourceUnit> units = {make("h", Language::Java, Generator::Human, "", "a\n")};
  for (int i = 0; i < 5; ++i) units.push_back(make("p" + std::to_string(i), Language::Java, Generator::GeminiPro, "h", "a\n"));
  std::vector<UnitPair> pairs;
  for (std::size_t i = 1; i < units.size(); ++i) pairs.push_back({&units[0], &units[i]});
  EXPECT_TRUE(filter_near_identical(pairs).empty());
  EXPECT_TRUE(filter_near_identical({}).empty());
}

TEST(NearIdentical, RetainedFractionBoundPerLanguage) {
  Rng rng(19);
  for (int t = 0; t < 40; ++t) {
    std::vector<SourceUnit> units;
    units.reserve(200);
    std::vector<std::pair<std::size_t, std::size_t>> idx;
    for (Language lang : {Language::C, Language::Python}) {
      units.push_back(make(std::string(to_string(lang)) + "h", lang, Generator::Human, "", "a\nb\nc\nd\n"));
      std::size_t h = units.size() - 1;
      auto n = 1 + rng.below(30);
      for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        for (const char* l : {"a\n", "b\n", "c\n", "d\n"}) text += rng.below(2) ? l : "z\n";
        units.push_back(make(units[h].id + std::to_string(i), lang, Generator::ChatGPT, units[h].id, text));
        idx.emplace_back(h, units.size() - 1);
      }
    }
    std::vector<UnitPair> pairs;
    for (auto [h, p] : idx) pairs.push_back({&units[h], &units[p]});
    auto kept = filter_near_identical(pairs, 2);
    for (Language lang : {Language::C, Language::Python}) {
      double n = 0, k = 0;
      for (const auto& p : pairs) n += p.human->language == lang;
      for (const auto& p : kept) k += p.human->language == lang;
      EXPECT_LE(k / n, 0.75 + 1.0 / n);
    }
  }
}

TEST(Anonymize, Examples) {
  EXPECT_EQ(anonymize("// contact a@b.com"), "// contact <EMAIL>");
  EXPECT_EQ(anonymize("see https://x.y/z"), "see <URL>");
  EXPECT_EQ(anonymize("int main() { return 0; }"), "int main() { return 0; }");
}

TEST(Anonymize, UrlAndPhoneForms) {
  EXPECT_EQ(anonymize("# docs: www.example.org/page."), "# docs: <URL>.");
  EXPECT_EQ(anonymize("ftp://files.host/a.tar"), "<URL>");
  EXPECT_EQ(anonymize("\"http://a.b/c?d=1\""), "\"<URL>\"");
  EXPECT_EQ(anonymize("call 555-1234 now"), "call <PHONE> now");
  EXPECT_EQ(anonymize("tel (555) 123-4567"), "tel <PHONE>");
  EXPECT_EQ(anonymize("+82 10-1234-5678"), "<PHONE>");
  EXPECT_EQ(anonymize("+1 555 123 4567"), "<PHONE>");
  EXPECT_EQ(anonymize("02-123-4567"), "<PHONE>");
  EXPECT_EQ(anonymize("mail first.last+tag@sub.example.co.kr."), "mail <EMAIL>.");
}

TEST(Anonymize, LeavesOrdinaryCodeAlone) {
  for (const char* code : {"MOD = 1000000007", "x = 3.14159265", "@Override\npublic void run()",
                           "c = a @ b.T", "int d = 2024-12-31;", "v = 0x7fffffff;", "arr[100-20]",
                           "print(\"%d-%d\" % (a, b))", "version = \"1.2.3\""}) {
    EXPECT_EQ(anonymize(code), code);
  }
}

TEST(Anonymize, IdempotentOnRandomText) {
  Rng rng(23);
  const std::vector<std::string> frags = {"a", "b.", "@", "x.com", "www.", "http://", "https://", "ftp://",
                                          "555", "-", "1234", "(", ")", "+", "82", " ", ".", "<", ">",
                                          "0", "7", "\n", "_", "org", "%", "\"", "co.kr", "PHONE", "URL"};
  for (int t = 0; t < 20000; ++t) {
    std::string s;
    auto n = rng.below(16);
    for (std::size_t i = 0; i < n; ++i) s += frags[rng.below(frags.size())];
    auto once = anonymize(s);
    ASSERT_EQ(anonymize(once), once) << "input: " << s;
  }
}

TEST(Task1Pairs, FullScaleCountsForC) {
  auto corpus = grid_corpus(Language::C, 457);
  auto pairs = build_task1_pairs(corpus, 42);
  EXPECT_EQ(pairs.size(), 3656u);
  auto pos = std::count_if(pairs.begin(), pairs.end(), [](const CodePair& p) { return p.task1_label == Task1Label::Paraphrase; });
  EXPECT_EQ(pos, 1828);
}

TEST(Task1Pairs, InsufficientNegatives) {
  std::vector<SourceUnit> corpus = {make("h", Language::C, Generator::Human, ""),
                                    make("p", Language::C, Generator::ChatGPT, "h")};
  EXPECT_THROW(build_task1_pairs(corpus, 1), InsufficientNegatives);
}

TEST(Task1Pairs, DeterministicAndSeedSensitive) {
  auto corpus = grid_corpus(Language::Java, 40);
  EXPECT_EQ(build_task1_pairs(corpus, 7), build_task1_pairs(corpus, 7));
  EXPECT_NE(build_task1_pairs(corpus, 7), build_task1_pairs(corpus, 8));
}

TEST(Task1Pairs, IndependentOfInputOrder) {
  auto corpus = grid_corpus(Language::Cpp, 30);
  auto shuffled = corpus;
  Rng rng(5);
  rng.shuffle(std::span<SourceUnit>(shuffled));
  EXPECT_EQ(build_task1_pairs(corpus, 3), build_task1_pairs(shuffled, 3));
}

TEST(Task1Pairs, InvariantsOnMixedCorpora) {
  Rng rng(29);
  for (int t = 0; t < 30; ++t) {
    std::vector<SourceUnit> corpus;
    for (Language lang : kLanguages) {
      auto part = grid_corpus(lang, 2 + static_cast<int>(rng.below(12)));
      // Drop some paraphrases so models are unbalanced.
      for (auto& u : part)
        if (u.is_human() || rng.below(4) != 0) corpus.push_back(u);
    }
    std::vector<CodePair> pairs;
    try {
      pairs = build_task1_pairs(corpus, t);
    } catch (const InsufficientNegatives&) {
      continue;
    }
    std::map<std::string, const SourceUnit*> by_id;
    for (const auto& u : corpus) by_id[u.id] = &u;
    std::set<std::pair<std::string, std::string>> seen;
    std::map<Language, int> balance;
    for (const auto& p : pairs) {
      EXPECT_TRUE(seen.emplace(p.human_id, p.candidate_id).second);
      const auto* h = by_id.at(p.human_id);
      const auto* c = by_id.at(p.candidate_id);
      EXPECT_TRUE(h->is_human());
      EXPECT_FALSE(c->is_human());
      EXPECT_EQ(h->language, c->language);
      EXPECT_EQ(p.language, h->language);
      EXPECT_EQ(p.task1_label == Task1Label::Paraphrase, c->origin_id == h->id);
      balance[p.language] += p.task1_label == Task1Label::Paraphrase ? 1 : -1;
    }
    for (auto [lang, b] : balance) EXPECT_EQ(b, 0);
  }
}

TEST(Task1Pairs, SmallPoolEnumerationIsUniform) {
  // 2 humans, one paraphrase each: positives 2, unrelated pool 2. Both must be chosen.
  std::vector<SourceUnit> corpus = {make("h1", Language::C, Generator::Human, ""),
                                    make("h2", Language::C, Generator::Human, ""),
                                    make("p1", Language::C, Generator::ChatGPT, "h1"),
                                    make("p2", Language::C, Generator::ChatGPT, "h2")};
  auto pairs = build_task1_pairs(corpus, 0);
  ASSERT_EQ(pairs.size(), 4u);
  std::set<std::pair<std::string, std::string>> neg;
  for (const auto& p : pairs)
    if (p.task1_label == Task1Label::Unrelated) neg.emplace(p.human_id, p.candidate_id);
  EXPECT_EQ(neg, (std::set<std::pair<std::string, std::string>>{{"h1", "p2"}, {"h2", "p1"}}));
}

TEST(Task2Instances, Counts) {
  EXPECT_EQ(build_task2_instances(grid_corpus(Language::C, 457)).size(), 1828u);
  EXPECT_EQ(build_task2_instances(grid_corpus(Language::Python, 1935)).size(), 7740u);
  std::vector<SourceUnit> humans = {make("a", Language::C, Generator::Human, "")};
  EXPECT_TRUE(build_task2_instances(humans).empty());
  for (const auto& p : build_task2_instances(grid_corpus(Language::Java, 3))) {
    ASSERT_TRUE(p.task2_label.has_value());
    EXPECT_NE(p.candidate_id.find(std::string(to_string(*p.task2_label))), std::string::npos);
  }
}

std::vector<CodePair> labelled(int pos, int neg, Language lang = Language::C) {
  std::vector<CodePair> out;
  for (int i = 0; i < pos; ++i)
    out.push_back({"h" + std::to_string(i), "p" + std::to_string(i), lang, Task1Label::Paraphrase, std::nullopt});
  for (int i = 0; i < neg; ++i)
    out.push_back({"h" + std::to_string(i), "n" + std::to_string(i), lang, Task1Label::Unrelated, std::nullopt});
  return out;
}

TEST(KFold, PerfectStratification) {
  auto pairs = labelled(5, 5);
  auto split = kfold_split(pairs, 5, 42);
  for (int f = 0; f < 5; ++f) {
    int pos = 0, neg = 0;
    for (auto i : split.test_indices(f)) (pairs[i].task1_label == Task1Label::Paraphrase ? pos : neg)++;
    EXPECT_EQ(pos, 1);
    EXPECT_EQ(neg, 1);
  }
}

TEST(KFold, Errors) {
  EXPECT_THROW(kfold_split(labelled(2, 2), 5, 1), TooFewInstances);
  EXPECT_THROW(kfold_split(labelled(5, 5), 1, 1), TooFewInstances);
}

TEST(KFold, Deterministic) {
  auto pairs = labelled(23, 31);
  EXPECT_EQ(kfold_split(pairs, 5, 9).fold, kfold_split(pairs, 5, 9).fold);
  EXPECT_NE(kfold_split(pairs, 5, 9).fold, kfold_split(pairs, 5, 10).fold);
}

TEST(KFold, StrataBalancedAndPartition) {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    std::vector<CodePair> pairs;
    for (Language lang : kLanguages) {
      auto part = labelled(static_cast<int>(rng.below(20)), static_cast<int>(rng.below(20)), lang);
      for (auto& p : part)
        if (p.task1_label == Task1Label::Paraphrase) p.task2_label = kLlmGenerators[rng.below(4)];
      pairs.insert(pairs.end(), part.begin(), part.end());
    }
    int k = 2 + static_cast<int>(rng.below(6));
    if (pairs.size() < static_cast<std::size_t>(k)) continue;
    auto split = kfold_split(pairs, k, t);
    std::map<std::tuple<Language, Task1Label>, std::vector<int>> coarse;
    std::map<std::tuple<Language, Task1Label, int>, std::vector<int>> fine;
    std::vector<int> total(k, 0);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      int f = split.fold[i];
      ASSERT_GE(f, 0);
      ASSERT_LT(f, k);
      auto& c = coarse[{pairs[i].language, pairs[i].task1_label}];
      c.resize(k);
      ++c[f];
      auto& fi = fine[{pairs[i].language, pairs[i].task1_label, pairs[i].task2_label ? llm_index(*pairs[i].task2_label) : -1}];
      fi.resize(k);
      ++fi[f];
      ++total[f];
    }
    for (int f = 0; f < k; ++f) covered += split.test_indices(f).size();
    EXPECT_EQ(covered, pairs.size());
    auto spread = [](const std::vector<int>& v) { return *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()); };
    for (auto& [key, v] : coarse) EXPECT_LE(spread(v), 1);
    for (auto& [key, v] : fine) EXPECT_LE(spread(v), 1);
    EXPECT_LE(spread(total), 1);
  }
}

TEST(CleanCorpus, DropsUnparseableAndOrphans) {
  std::vector<SourceUnit> units = {
      make("h1", Language::Python, Generator::Human, "", "def f(x):\n    return x\n\n\n# tail\n"),
      make("h2", Language::Python, Generator::Human, "", "def g(:\n"),
      make("p1", Language::Python, Generator::ChatGPT, "h1", "def f(x):\n    return x + 1\n"),
      make("p2", Language::Python, Generator::ChatGPT, "h2", "def g():\n    pass\n"),
      make("p3", Language::Python, Generator::ChatGPT, "missing", "x = 1\n"),
  };
  CleanOptions opt;
  opt.percentile = 100.0;  // only exact maxima go
  auto r = clean_corpus(units, opt);
  std::map<std::string, DropReason> why;
  for (const auto& d : r.drops) why[d.id] = d.reason;
  EXPECT_EQ(why.at("p3"), DropReason::Orphan);
  EXPECT_EQ(why.at("h2"), DropReason::Parse);
  EXPECT_EQ(why.at("p2"), DropReason::Orphan);
  EXPECT_EQ(why.at("p1"), DropReason::NearIdentical);  // 0.2 is the maximum, p2 scores 0
  ASSERT_EQ(r.units.size(), 1u);
  EXPECT_EQ(r.units[0].id, "h1");
}

TEST(CleanCorpus, ExactDuplicatesAllRemovedAndTextAnonymized) {
  std::vector<SourceUnit> units = {make("h", Language::C, Generator::Human, "", "// a@b.com\nint x;\n")};
  for (auto g : kLlmGenerators) units.push_back(make(std::string(to_string(g)), Language::C, g, "h", units[0].text));
  auto r = clean_corpus(units);
  ASSERT_EQ(r.units.size(), 1u);
  EXPECT_EQ(r.units[0].text, "// <EMAIL>\nint x;\n");
  EXPECT_EQ(r.drops.size(), 4u);
}

TEST(CleanCorpus, BalancedModeKeepsCompleteGroupsOnly) {
  std::vector<SourceUnit> units;
  for (int h = 0; h < 2; ++h) {
    auto hid = "h" + std::to_string(h);
    units.push_back(make(hid, Language::Java, Generator::Human, "", "class A" + std::to_string(h) + " {}\n"));
    for (auto g : kLlmGenerators) {
      if (h == 1 && g == Generator::WizardCoder) continue;
      units.push_back(make(hid + std::string(to_string(g)), Language::Java, g, hid,
                           "class B" + std::string(to_string(g)) + std::to_string(h) + " {}\n"));
    }
  }
  // A verbatim copy takes the top similarity, so only it crosses the 100th percentile.
  units.push_back(make("h9", Language::Java, Generator::Human, "", "class C {}\n"));
  units.push_back(make("copy", Language::Java, Generator::ChatGPT, "h9", "class C {}\n"));
  CleanOptions opt;
  opt.percentile = 100.0;
  auto loose = clean_corpus(units, opt);
  EXPECT_EQ(loose.units.size(), units.size() - 1);
  opt.balanced = true;
  auto strict = clean_corpus(units, opt);
  std::set<std::string> kept;
  for (const auto& u : strict.units) kept.insert(u.id);
  EXPECT_EQ(kept.size(), 5u);
  EXPECT_TRUE(kept.count("h0"));
  std::map<std::string, DropReason> why;
  for (const auto& d : strict.drops) why[d.id] = d.reason;
  EXPECT_EQ(why.at("h1"), DropReason::Unbalanced);
  EXPECT_EQ(why.at("h1chatgpt"), DropReason::Orphan);
  EXPECT_EQ(why.at("h9"), DropReason::Unbalanced);
}

TEST(CorpusIo, RoundTripAndErrors) {
  std::vector<SourceUnit> units = {make("a", Language::Cpp, Generator::Human, "", "int main() {}\n"),
                                   make("b", Language::Cpp, Generator::DeepSeekCoder, "a", "int main(){return 0;}\n\"q\"\n")};
  std::stringstream ss;
  write_corpus(ss, units);
  auto back = read_corpus(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].text, units[1].text);
  EXPECT_EQ(back[1].generator, Generator::DeepSeekCoder);
  EXPECT_EQ(back[1].origin_id, "a");

  auto fails = [](const std::string& s) {
    std::istringstream in(s);
    EXPECT_THROW(read_corpus(in), FormatError) << s;
  };
  fails("{not json}\n");
  fails(R"({"id":"a","language":"rust","generator":"human","origin_id":"","text":"x"})");
  fails(R"({"id":"a","language":"c","generator":"gpt","origin_id":"","text":"x"})");
  fails(R"({"id":"a","language":"c","generator":"human","origin_id":"z","text":"x"})");
  fails(R"({"id":"a","language":"c","generator":"human","origin_id":"","text":""})");
  fails(R"({"id":"a","language":"c","generator":"human","text":"x"})" "\n"
        R"({"id":"a","language":"c","generator":"human","text":"y"})");
  std::istringstream empty("\n\n");
  EXPECT_TRUE(read_corpus(empty).empty());
}

TEST(PairIo, RoundTrip) {
  auto corpus = grid_corpus(Language::Python, 6);
  auto pairs = build_task1_pairs(corpus, 42);
  auto split = kfold_split(pairs, 3, 42);
  std::stringstream ss;
  write_pairs(ss, pairs, &split);
  auto first = ss.str().substr(0, ss.str().find('\n'));
  EXPECT_EQ(first.find("{\"human_id\":"), 0u);
  auto back = read_pairs(ss, corpus);
  EXPECT_EQ(back.pairs, pairs);
  for (std::size_t i = 0; i < pairs.size(); ++i) EXPECT_EQ(back.fold[i], split.fold[i]);
}

}  // namespace
}  // namespace lpcode
