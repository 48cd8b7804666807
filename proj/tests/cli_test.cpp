#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lpcode/corpus_io.hpp"
#include "lpcode/pipeline.hpp"
#include "support/synth.hpp"

namespace lpcode {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("lpcode_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    synth::CorpusOptions co;
    co.languages = {Language::Python};
    co.humans = 20;
    co.seed = 3;
    write_corpus_file(dir_ / "corpus.jsonl", synth::synthetic_corpus(co));
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  struct Result {
    int code;
    std::string err;
  };

  static Result run(const std::string& args) {
    auto err = dir_ / "stderr.txt";
    std::string cmd = std::string("\"") + LPCODEDEC_BIN + "\" " + args + " >/dev/null 2>\"" + err.string() + "\"";
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::vector<std::string> lines(const fs::path& p) {
    std::vector<std::string> out;
    std::ifstream in(p);
    for (std::string l; std::getline(in, l);)
      if (!l.empty()) out.push_back(l);
    return out;
  }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }
  static std::string corpus() { return path("corpus.jsonl"); }

  static fs::path dir_;
};

fs::path Cli::dir_;

TEST_F(Cli, EmptyCorpusIsADataError) {
  std::ofstream(path("empty.jsonl")).close();
  auto r = run("ingest --corpus " + path("empty.jsonl") + " --out " + path("x.jsonl"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("empty corpus"), std::string::npos) << r.err;
}

TEST_F(Cli, MalformedJsonlFails) {
  std::ofstream(path("bad.jsonl")) << "{\"id\": \"a\"\n";
  EXPECT_EQ(run("ingest --corpus " + path("bad.jsonl") + " --out " + path("x.jsonl")).code, 3);
}

TEST_F(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--lang rust features --corpus " + corpus() + " --out " + path("f.csv")).code, 2);
  EXPECT_EQ(run("features --corpus " + corpus()).code, 2);
  EXPECT_EQ(run("ablate --group formatting --corpus " + corpus() + " --out " + path("a.json")).code, 2);
  EXPECT_EQ(run("task1 --method moss --corpus " + corpus() + " --out " + path("a.json")).code, 2);
}

TEST_F(Cli, IngestDropsAnUnparseableUnitWithReasonParse) {
  ASSERT_EQ(run("ingest --corpus " + corpus() + " --out " + path("clean_base.jsonl")).code, 0);

  auto units = read_corpus_file(corpus());
  SourceUnit bad;
  bad.id = "python-broken";
  bad.language = Language::Python;
  bad.text = "def f(:\n    return\n";
  units.push_back(bad);
  write_corpus_file(path("with_bad.jsonl"), units);
  ASSERT_EQ(run("ingest --corpus " + path("with_bad.jsonl") + " --out " + path("clean_bad.jsonl") +
                " --drop-log " + path("drops.jsonl"))
                .code,
            0);
  EXPECT_EQ(read_corpus_file(path("clean_bad.jsonl")).size(), read_corpus_file(path("clean_base.jsonl")).size());
  bool logged = false;
  for (const auto& l : lines(path("drops.jsonl"))) {
    auto j = nlohmann::json::parse(l);
    if (j["id"] == "python-broken") logged = j["reason"] == "parse";
  }
  EXPECT_TRUE(logged);
}

TEST_F(Cli, IngestRemovesVerbatimCopies) {
  auto units = read_corpus_file(corpus());
  std::map<std::string, std::string> human_text;
  for (const auto& u : units)
    if (u.is_human()) human_text[u.id] = u.text;
  std::size_t paraphrases = 0;
  for (auto& u : units)
    if (!u.is_human()) {
      u.text = human_text[u.origin_id];
      ++paraphrases;
    }
  write_corpus_file(path("copies.jsonl"), units);
  ASSERT_EQ(run("ingest --corpus " + path("copies.jsonl") + " --out " + path("copies_clean.jsonl") +
                " --drop-log " + path("copies_drops.jsonl"))
                .code,
            0);
  std::size_t near = 0;
  for (const auto& l : lines(path("copies_drops.jsonl")))
    if (nlohmann::json::parse(l)["reason"] == "near_identical") ++near;
  EXPECT_EQ(near, paraphrases);
  for (const auto& u : read_corpus_file(path("copies_clean.jsonl"))) EXPECT_TRUE(u.is_human());
}

TEST_F(Cli, FeaturesCsvIsCompleteAndReproducible) {
  ASSERT_EQ(run("features --corpus " + corpus() + " --out " + path("f1.csv")).code, 0);
  ASSERT_EQ(run("features --corpus " + corpus() + " --out " + path("f2.csv")).code, 0);
  EXPECT_EQ(lines(path("f1.csv")).size(), 101u);
  EXPECT_EQ(slurp(path("f1.csv")), slurp(path("f2.csv")));

  std::ifstream in(path("f1.csv"));
  auto rows = read_features_csv(in);
  auto units = read_corpus_file(corpus());
  ASSERT_EQ(rows.size(), units.size());
  EXPECT_EQ(rows[3].features, extract_style_vector(units[3]));
}

TEST_F(Cli, FeaturesSkipsUnparseableUnits) {
  auto units = read_corpus_file(corpus());
  units[0].text = "def broken(:\n";
  write_corpus_file(path("one_bad.jsonl"), units);
  auto r = run("features --corpus " + path("one_bad.jsonl") + " --out " + path("f3.csv"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find(units[0].id), std::string::npos);
  EXPECT_EQ(lines(path("f3.csv")).size(), 100u);
}

TEST_F(Cli, AnovaRanksFeatures) {
  ASSERT_EQ(run("features --corpus " + corpus() + " --out " + path("fa.csv")).code, 0);
  ASSERT_EQ(run("--lang python anova --features " + path("fa.csv") + " --out " + path("anova.csv")).code, 0);
  auto rows = lines(path("anova.csv"));
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_NE(rows[1].find("comment_ratio"), std::string::npos) << rows[1];
  EXPECT_EQ(run("--lang java anova --features " + path("fa.csv")).code, 3);
}

TEST_F(Cli, PairsCarryLabelsAndFolds) {
  ASSERT_EQ(run("pairs --task task1 --corpus " + corpus() + " --out " + path("pairs.jsonl")).code, 0);
  auto rows = lines(path("pairs.jsonl"));
  ASSERT_EQ(rows.size(), 160u);
  std::size_t positives = 0;
  for (const auto& l : rows) {
    auto j = nlohmann::json::parse(l);
    EXPECT_TRUE(j["fold"].is_number_integer());
    if (j["task1_label"] == "paraphrase") ++positives;
  }
  EXPECT_EQ(positives, 80u);
  std::ifstream in(path("pairs.jsonl"));
  auto file = read_pairs(in, read_corpus_file(corpus()));
  EXPECT_EQ(file.pairs.size(), 160u);
}

TEST_F(Cli, Task1ReportCarriesManifestAndScores) {
  ASSERT_EQ(run("--lang python task1 --method lpcodedec --corpus " + corpus() + " --out " + path("t1.json") +
                " --model-out " + path("model.json") + " --confusion-csv " + path("conf"))
                .code,
            0);
  auto j = nlohmann::json::parse(slurp(path("t1.json")));
  EXPECT_EQ(j["manifest"]["tool"], "lpcodedec");
  EXPECT_EQ(j["manifest"]["seed"], 42);
  EXPECT_EQ(j["manifest"]["corpus_digest"], file_digest(corpus()));
  EXPECT_TRUE(j["manifest"]["timing"].contains("lpcodedec/python"));
  ASSERT_EQ(j["reports"].size(), 1u);
  EXPECT_FALSE(j["reports"][0].contains("timing"));
  EXPECT_GT(j["reports"][0]["mean_f1"].get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(path("conf") + "/lpcodedec_python.csv"));

  auto models = nlohmann::json::parse(slurp(path("model.json")));
  auto d = Detector::from_json(models["python"]);
  EXPECT_EQ(d.task, Task::Task1);
}

TEST_F(Cli, Task2TfIdfIsMacroF1) {
  ASSERT_EQ(run("--lang python task2 --method tfidf --folds 2 --epochs 20 --corpus " + corpus() + " --out " +
                path("t2.json"))
                .code,
            0);
  auto j = nlohmann::json::parse(slurp(path("t2.json")));
  ASSERT_EQ(j["reports"].size(), 1u);
  EXPECT_EQ(j["reports"][0]["task"], "task2");
  EXPECT_EQ(j["reports"][0]["per_class"].size(), 4u);
  EXPECT_EQ(j["reports"][0]["confusion_matrix"]["labels"][0], "chatgpt");
}

TEST_F(Cli, AblationSharesTheTaskSchema) {
  ASSERT_EQ(run("--lang python ablate --group readability --corpus " + corpus() + " --out " + path("ab.json")).code,
            0);
  ASSERT_EQ(run("--lang python task1 --corpus " + corpus() + " --out " + path("t1b.json")).code, 0);
  auto a = nlohmann::json::parse(slurp(path("ab.json")));
  auto t = nlohmann::json::parse(slurp(path("t1b.json")));
  ASSERT_EQ(a["reports"].size(), 1u);
  EXPECT_EQ(a["reports"][0]["method"], "lpcodedec-readability");
  std::vector<std::string> ka, kt;
  for (auto& [k, v] : a["reports"][0].items()) ka.push_back(k);
  for (auto& [k, v] : t["reports"][0].items()) kt.push_back(k);
  EXPECT_EQ(ka, kt);
  EXPECT_EQ(a["manifest"]["splits"], t["manifest"]["splits"]);
}

TEST_F(Cli, SimilarityBaselinesShareTheSplit) {
  ASSERT_EQ(run("--lang python task1 --method jaccard --corpus " + corpus() + " --out " + path("jac.json") +
                " --scores-csv " + path("scores.csv"))
                .code,
            0);
  ASSERT_EQ(run("--lang python task1 --corpus " + corpus() + " --out " + path("mlp.json")).code, 0);
  auto a = nlohmann::json::parse(slurp(path("jac.json")));
  auto b = nlohmann::json::parse(slurp(path("mlp.json")));
  EXPECT_EQ(a["reports"][0]["details"]["split_digest"], b["reports"][0]["details"]["split_digest"]);
  EXPECT_EQ(lines(path("scores.csv")).size(), 161u);
}

TEST_F(Cli, HeatmapIsSymmetricWithUnitDiagonal) {
  ASSERT_EQ(run("--lang python heatmap --corpus " + corpus() + " --out " + path("heat.json") + " --csv " +
                path("heat"))
                .code,
            0);
  auto j = nlohmann::json::parse(slurp(path("heat.json")));
  auto m = j["heatmaps"][0]["similarity"];
  ASSERT_EQ(m.size(), 5u);
  for (std::size_t a = 0; a < 5; ++a) {
    EXPECT_NEAR(m[a][a].get<double>(), 1.0, 1e-9);
    for (std::size_t b = 0; b < 5; ++b) EXPECT_NEAR(m[a][b].get<double>(), m[b][a].get<double>(), 1e-12);
  }
  EXPECT_TRUE(fs::exists(path("heat") + "/heatmap_python.csv"));
}

TEST(Digest, Fnv1aKnownValues) {
  Fnv1a empty;
  EXPECT_EQ(empty.hex(), "cbf29ce484222325");
  Fnv1a a;
  a.update("a");
  EXPECT_EQ(a.hex(), "af63dc4c8601ec8c");
  Fnv1a foobar;
  foobar.update("foo");
  foobar.update("bar");
  EXPECT_EQ(foobar.hex(), "85944171f73967e8");
}

TEST_F(Cli, CorpusDigestFollowsEveryByte) {
  auto text = slurp(corpus());
  auto base = file_digest(corpus());
  text[text.size() / 2] ^= 1;
  std::ofstream(path("flipped.jsonl"), std::ios::binary) << text;
  EXPECT_NE(file_digest(path("flipped.jsonl")), base);
  text[text.size() / 2] ^= 1;
  std::ofstream(path("restored.jsonl"), std::ios::binary) << text;
  EXPECT_EQ(file_digest(path("restored.jsonl")), base);
}

}  // namespace
}  // namespace lpcode
