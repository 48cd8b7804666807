#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <unistd.h>

#include "lpcode/pipeline.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

namespace fs = std::filesystem;
using namespace lpcode;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// 1 -------------------------------------------------------------------------

Outcome levenshtein_oracle() {
  Rng rng(1);
  const std::string alphabet = "abcd \n{}";
  auto t0 = std::chrono::steady_clock::now();
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    auto gen = [&] {
      std::string s(rng.below(101), ' ');
      for (auto& c : s) c = alphabet[rng.below(alphabet.size())];
      return s;
    };
    auto a = gen(), b = gen();
    if (levenshtein_distance(a, b) != oracle::levenshtein_full(a, b)) ++mismatches;
  }
  double t = seconds_since(t0);
  return {mismatches == 0 && t < 10 ? Verdict::Pass : Verdict::Fail,
          "1000 pairs, " + std::to_string(mismatches) + " mismatches, " + fmt("%.3f", t) + " s (limit 10 s)"};
}

// 2 -------------------------------------------------------------------------

Outcome tree_edit_oracle() {
  Rng rng(2);
  std::size_t mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    auto a = oracle::random_tree(rng, 1 + rng.below(6), "abc");
    auto b = oracle::random_tree(rng, 1 + rng.below(6), "abc");
    if (tree_edit_distance(a, b) != oracle::edit_script_distance(oracle::to_forest(a), oracle::to_forest(b)))
      ++mismatches;
  }
  return {mismatches == 0 ? Verdict::Pass : Verdict::Fail,
          "200 tree pairs of <= 6 nodes, " + std::to_string(mismatches) + " mismatches"};
}

// 3 -------------------------------------------------------------------------

Outcome anova_checks() {
  std::vector<std::string> problems;
  auto same = one_way_anova({{2, 2, 2}, {2, 2, 2}});
  if (same.f_statistic != 0 || same.p_value != 1) problems.push_back("identical groups");
  auto eight = one_way_anova({{1, 2}, {3, 4}});
  if (std::fabs(eight.f_statistic - 8.0) > 1e-9) problems.push_back("[1,2]/[3,4] F=" + fmt("%.12g", eight.f_statistic));

  double worst = 0;
  for (double f : {1e-3, 0.1, 0.5, 1.0, 2.0, 4.0, 10.0, 50.0, 300.0})
    for (double d1 : {1.0, 2.0, 3.0, 5.0, 12.0, 60.0})
      for (double d2 : {1.0, 4.0, 10.0, 30.0, 200.0, 5000.0}) {
        double ref = boost::math::cdf(boost::math::complement(boost::math::fisher_f(d1, d2), f));
        worst = std::max(worst, std::fabs(f_upper_tail(f, d1, d2) - ref));
      }
  if (worst > 1e-8) problems.push_back("p-value error " + fmt("%.3g", worst));

  Rng rng(3);
  double worst_rel = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(2 + rng.below(40)), b(2 + rng.below(40));
    double shift = rng.uniform(-1, 1);
    for (auto& x : a) x = rng.uniform(0, 2);
    for (auto& x : b) x = rng.uniform(0, 2) + shift;
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
    double ss = 0;
    for (double x : a) ss += (x - ma) * (x - ma);
    for (double x : b) ss += (x - mb) * (x - mb);
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double tstat = (ma - mb) / std::sqrt(ss / (na + nb - 2) * (1 / na + 1 / nb));
    double f = one_way_anova({a, b}).f_statistic;
    worst_rel = std::max(worst_rel, std::fabs(f - tstat * tstat) / (tstat * tstat));
  }
  if (worst_rel > 1e-9) problems.push_back("F vs t^2 relative error " + fmt("%.3g", worst_rel));

  std::string detail = "identical, F=8, 324-point p grid (max err " + fmt("%.2g", worst) +
                       "), F=t^2 on 100 sets (max rel err " + fmt("%.2g", worst_rel) + ")";
  for (const auto& p : problems) detail += "; FAILED " + p;
  return {problems.empty() ? Verdict::Pass : Verdict::Fail, detail};
}

// 4 -------------------------------------------------------------------------

Outcome gradient_check() {
  Rng rng(4);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    std::size_t in = 2 + rng.below(19), hid = 1 + rng.below(10), out = 2 + rng.below(3);
    Mlp m(in, hid, out);
    for (auto& p : m.params()) p = rng.uniform(-1, 1);
    std::vector<DenseVector> rows(1 + rng.below(8), DenseVector(in));
    std::vector<int> labels;
    for (auto& r : rows) {
      for (auto& v : r) v = rng.uniform(-2, 2);
      labels.push_back(static_cast<int>(rng.below(out)));
    }
    const double l2 = t % 2 ? 1e-2 : 0.0;
    std::vector<std::size_t> batch(rows.size());
    std::iota(batch.begin(), batch.end(), 0);
    std::vector<double> grad, scratch;
    m.loss_and_gradient(rows, labels, batch, l2, grad);
    const double h = 1e-6;
    for (std::size_t k = 0; k < m.params().size(); ++k) {
      double keep = m.params()[k];
      m.params()[k] = keep + h;
      double up = m.loss_and_gradient(rows, labels, batch, l2, scratch);
      m.params()[k] = keep - h;
      double down = m.loss_and_gradient(rows, labels, batch, l2, scratch);
      m.params()[k] = keep;
      double numeric = (up - down) / (2 * h);
      double scale = std::max({std::fabs(numeric), std::fabs(grad[k]), 1e-6});
      worst = std::max(worst, std::fabs(numeric - grad[k]) / scale);
    }
  }
  return {worst <= 1e-4 ? Verdict::Pass : Verdict::Fail,
          "20 networks up to 20-10-4, max relative error " + fmt("%.2g", worst) + " (limit 1e-4)"};
}

// 5 -------------------------------------------------------------------------

Outcome feature_invariants() {
  std::size_t programs = 0;
  std::vector<std::string> problems;
  auto note = [&](const std::string& s) {
    if (problems.size() < 5) problems.push_back(s);
  };
  for (Language lang : kLanguages) {
    Rng rng(500 + static_cast<std::uint64_t>(lang));
    for (int i = 0; i < 1000; ++i, ++programs) {
      synth::GenOptions go;
      go.naming_mix = rng.uniform();
      go.inner_comment = rng.uniform(0, 0.3);
      go.doc_chance = rng.uniform();
      go.empty_chance = 0.05;
      auto prog = synth::random_program(rng, lang, go);
      synth::RenderOptions ro{rng.uniform(0, 0.5), static_cast<int>(rng.below(3)), static_cast<int>(rng.below(2))};
      auto r = synth::render(prog, rng, ro);
      const std::string where = std::string(to_string(lang)) + " program " + std::to_string(i) + ": ";
      StyleVector v;
      try {
        v = extract_style_vector(SourceUnit{"fuzz", lang, Generator::Human, "", r.text});
      } catch (const Error& e) {
        note(where + e.what());
        continue;
      }
      const auto& e = r.expected;
      auto near = [](double a, double b) { return std::fabs(a - b) <= 1e-12; };
      for (double x : v.values())
        if (!std::isfinite(x)) note(where + "non-finite feature");
      for (double c : {v.function_naming_consistency, v.variable_naming_consistency, v.class_naming_consistency,
                       v.constant_naming_consistency})
        if (c < 0.2 || c > 1) note(where + "naming consistency out of [0.2, 1]");
      if (!(v.indentation_consistency > 0 && v.indentation_consistency <= 1)) note(where + "indentation out of (0, 1]");
      if (v.comment_ratio < 0 || v.comment_ratio > 1) note(where + "comment ratio out of [0, 1]");
      if ((e.functions == 0) != (v.avg_function_length == 0) || (e.functions && v.avg_function_length < 1))
        note(where + "function length degenerate case");
      if ((e.blocks == 0) != (v.avg_nesting_depth == 0) || (e.blocks && v.avg_nesting_depth < 1))
        note(where + "nesting degenerate case");
      if ((e.functions == 0) != (v.avg_function_name_length == 0)) note(where + "function name length degenerate case");
      if (v.avg_variable_name_length < 0) note(where + "negative variable name length");
      if (!near(v.comment_ratio, e.comment_ratio) || !near(v.avg_function_length, e.avg_function_length) ||
          !near(v.avg_nesting_depth, e.avg_nesting_depth) ||
          !near(v.indentation_consistency, e.indentation_consistency) ||
          !near(v.function_naming_consistency, e.function_naming_consistency) ||
          !near(v.class_naming_consistency, e.class_naming_consistency) ||
          !near(v.constant_naming_consistency, e.constant_naming_consistency) ||
          !near(v.avg_function_name_length, e.avg_function_name_length))
        note(where + "feature differs from generator bookkeeping");
    }
  }
  try {
    comment_ratio(CommentMap{0, 0, {}});
    note("comment ratio of an empty file did not raise");
  } catch (const DegenerateInput&) {
  }

  Rng rng(55);
  const std::vector<std::string> pool = {"camelCase", "snake_case", "PascalCase", "UPPER_CASE", "_other", "x", "Y"};
  double lowest = 1;
  for (int t = 0; t < 10000; ++t) {
    std::vector<std::string> names(1 + rng.below(60));
    for (auto& n : names) n = pool[rng.below(pool.size())];
    lowest = std::min(lowest, naming_consistency(names));
  }
  if (lowest < 0.2) note("naming consistency " + fmt("%.3f", lowest) + " below 0.2 on a random list");

  std::string detail = std::to_string(programs) + " generated programs (1000 per language), 10000 identifier lists (min consistency " +
                       fmt("%.3f", lowest) + ")";
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty() ? Verdict::Pass : Verdict::Fail, detail};
}

// 6 -------------------------------------------------------------------------

Outcome synthetic_end_to_end() {
  synth::CorpusOptions co;
  co.humans = 250;
  auto corpus = synth::synthetic_corpus(co);
  bool ok = true;
  std::string detail;
  for (Language lang : kLanguages) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentOptions opt;
    opt.task = Task::Task1;
    opt.languages = {lang};
    opt.jobs = resolve_jobs(0);
    auto res = run_experiment(corpus, opt);
    double t = seconds_since(t0);
    if (res.reports.size() != 1) return {Verdict::Fail, std::string(to_string(lang)) + ": no report"};
    const auto& r = res.reports.front();

    std::vector<FeatureRow> rows;
    for (const auto& u : corpus)
      if (u.language == lang) rows.push_back({u.id, u.generator, u.language, extract_style_vector(u)});
    auto anova = anova_report(rows, lang);
    const std::string top = anova.front().feature;

    bool good = r.mean_f1 >= 90 && top == "comment_ratio" && t < 60 && r.pairs == 2000;
    ok = ok && good;
    if (!detail.empty()) detail += "; ";
    detail += std::string(to_string(lang)) + " " + std::to_string(r.pairs) + " pairs F1 " + fmt("%.2f", r.mean_f1) +
              " top " + top + " (F " + fmt("%.1f", anova.front().f_statistic) + ") " + fmt("%.1f", t) + " s";
  }
  return {ok ? Verdict::Pass : Verdict::Fail, detail + " (need F1 >= 90, top comment_ratio, < 60 s)"};
}

// 7 -------------------------------------------------------------------------

Outcome released_corpus_reproduction() {
  const char* path = std::getenv("LPCODE_DATASET");
  if (!path || !*path) return {Verdict::Skip, "LPCODE_DATASET not set; released corpus unavailable"};

  const std::map<Language, double> task1 = {
      {Language::C, 87.52}, {Language::Cpp, 88.39}, {Language::Java, 91.13}, {Language::Python, 93.16}};
  const std::map<Language, double> task2 = {
      {Language::C, 43.13}, {Language::Cpp, 39.36}, {Language::Java, 45.19}, {Language::Python, 42.41}};
  const std::map<Language, double> tfidf2 = {
      {Language::C, 37.30}, {Language::Cpp, 35.12}, {Language::Java, 37.44}, {Language::Python, 37.82}};
  // Single-group ranking per language, best first.
  const std::map<Language, std::vector<std::string>> ranking = {
      {Language::C, {"readability", "structure", "naming"}},
      {Language::Cpp, {"structure", "readability", "naming"}},
      {Language::Java, {"structure", "readability", "naming"}},
      {Language::Python, {"readability", "naming", "structure"}}};

  CleanOptions clean;
  clean.jobs = resolve_jobs(0);
  auto corpus = clean_corpus(read_corpus_file(path), clean).units;

  bool ok = true;
  std::string detail;
  auto add = [&](bool good, const std::string& s) {
    ok = ok && good;
    detail += (detail.empty() ? "" : "; ") + s + (good ? "" : " FAILED");
  };
  auto find = [](const std::vector<EvalReport>& reports, const std::string& method, Language l) -> const EvalReport* {
    for (const auto& r : reports)
      if (r.method == method && r.language == to_string(l)) return &r;
    return nullptr;
  };

  ExperimentOptions o1;
  o1.task = Task::Task1;
  o1.jobs = resolve_jobs(0);
  o1.single_thread_timing = true;
  o1.methods = {Method::Lpcodedec, Method::TreeEdit, Method::TfIdf};
  o1.groups = {std::nullopt, FeatureGroup::Naming, FeatureGroup::Structure, FeatureGroup::Readability};
  auto r1 = run_experiment(corpus, o1);

  ExperimentOptions o2 = o1;
  o2.task = Task::Task2;
  o2.methods = {Method::Lpcodedec, Method::TfIdf};
  o2.groups = {std::nullopt};
  auto r2 = run_experiment(corpus, o2);

  for (Language l : kLanguages) {
    const std::string ln(to_string(l));
    auto full = find(r1.reports, "lpcodedec", l);
    auto ted = find(r1.reports, "tree_edit", l);
    auto tf1 = find(r1.reports, "tfidf", l);
    auto full2 = find(r2.reports, "lpcodedec", l);
    auto tf2 = find(r2.reports, "tfidf", l);
    if (!full || !ted || !tf1 || !full2 || !tf2) {
      add(false, ln + " missing reports");
      continue;
    }
    add(std::fabs(full->mean_f1 - task1.at(l)) <= 3.0,
        ln + " task1 " + fmt("%.2f", full->mean_f1) + " vs " + fmt("%.2f", task1.at(l)));
    add(std::fabs(full2->mean_f1 - task2.at(l)) <= 4.0,
        ln + " task2 " + fmt("%.2f", full2->mean_f1) + " vs " + fmt("%.2f", task2.at(l)));
    add(std::fabs(tf2->mean_f1 - tfidf2.at(l)) <= 4.0,
        ln + " tfidf task2 " + fmt("%.2f", tf2->mean_f1) + " vs " + fmt("%.2f", tfidf2.at(l)));

    std::vector<double> group_f1;
    for (const auto& g : ranking.at(l)) {
      auto r = find(r1.reports, "lpcodedec-" + g, l);
      group_f1.push_back(r ? r->mean_f1 : -1);
    }
    bool order = full->mean_f1 >= group_f1[0] && group_f1[0] >= group_f1[1] && group_f1[1] >= group_f1[2];
    add(order, ln + " ablation " + fmt("%.2f", full->mean_f1) + " > " + fmt("%.2f", group_f1[0]) + " > " +
                   fmt("%.2f", group_f1[1]) + " > " + fmt("%.2f", group_f1[2]));

    double ours = full->timing.total();
    add(ours * 50 <= ted->timing.total(),
        ln + " time vs tree edit 1/" + fmt("%.0f", ted->timing.total() / std::max(ours, 1e-9)));
    add(ours * 20 <= tf1->timing.total(),
        ln + " time vs tfidf 1/" + fmt("%.0f", tf1->timing.total() / std::max(ours, 1e-9)));
  }
  return {ok ? Verdict::Pass : Verdict::Fail, detail};
}

// 8 -------------------------------------------------------------------------

nlohmann::ordered_json load_stripped(const fs::path& p) {
  std::ifstream in(p);
  auto j = nlohmann::ordered_json::parse(in);
  j["manifest"].erase("timing");
  j["manifest"].erase("started_at");
  return j;
}

Outcome cli_determinism() {
  auto dir = fs::temp_directory_path() / ("lpcode_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  synth::CorpusOptions co;
  co.humans = 6;
  co.seed = 99;
  write_corpus_file(dir / "corpus.jsonl", synth::synthetic_corpus(co));

  auto run = [&](const std::string& out) {
    std::string cmd = std::string("\"") + LPCODEDEC_BIN + "\" --seed 42 task1 --method all --corpus \"" +
                      (dir / "corpus.jsonl").string() + "\" --out \"" + (dir / out).string() + "\" 2>/dev/null";
    return std::system(cmd.c_str());
  };
  int rc1 = run("a.json"), rc2 = run("b.json");
  if (rc1 != 0 || rc2 != 0) {
    fs::remove_all(dir);
    return {Verdict::Fail, "lpcodedec exited with " + std::to_string(rc1) + "/" + std::to_string(rc2)};
  }
  auto a = load_stripped(dir / "a.json"), b = load_stripped(dir / "b.json");
  bool identical = a.dump() == b.dump();

  // Every method of a language reports the split digest recorded in the manifest.
  std::size_t reports = 0, digest_mismatch = 0;
  for (const auto& r : a["reports"]) {
    ++reports;
    const auto& lang = r["language"].get_ref<const std::string&>();
    if (r["details"]["split_digest"] != a["manifest"]["splits"][lang]["digest"]) ++digest_mismatch;
  }
  fs::remove_all(dir);
  bool ok = identical && digest_mismatch == 0 && reports == 20;
  return {ok ? Verdict::Pass : Verdict::Fail,
          std::string(identical ? "byte-identical" : "DIFFERENT") + " reports across two runs, " +
              std::to_string(reports) + " reports (5 methods x 4 languages), " + std::to_string(digest_mismatch) +
              " split digest mismatches"};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int number;
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "Levenshtein oracle equivalence", levenshtein_oracle},
      {2, "tree edit distance oracle equivalence", tree_edit_oracle},
      {3, "ANOVA correctness", anova_checks},
      {4, "MLP gradient check", gradient_check},
      {5, "feature invariant suite", feature_invariants},
      {6, "synthetic end-to-end", synthetic_end_to_end},
      {7, "released-corpus reproduction", released_corpus_reproduction},
      {8, "CLI determinism", cli_determinism},
  };
  int failed = 0, skipped = 0, ran = 0;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.number) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : (o.verdict == Verdict::Fail ? "FAIL" : "SKIP");
    std::cout << tag << " [" << c.number << "] " << c.name << ": " << o.detail << std::endl;
    ++ran;
    if (o.verdict == Verdict::Fail) ++failed;
    if (o.verdict == Verdict::Skip) ++skipped;
  }
  if (failed) return 1;
  return ran > 0 && skipped == ran ? 77 : 0;
}
