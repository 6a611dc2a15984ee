#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "framecrf/corpus.h"
#include "synth.h"
#include "test_support.h"

namespace {

using namespace framecrf;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "framecrf");
  std::ostringstream out, err;
  const int code = tools::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = support::temp_dir("cli");
    const auto r = cli({"synth", "--sentences", "120", "--seed", "3", "--out", dir_.string()});
    ASSERT_EQ(r.code, tools::kExitOk) << r.err;
  }
  static std::string path(const std::string& name) { return (dir_ / name).string(); }
  static inline std::filesystem::path dir_;
};

TEST_F(Cli, ValidateReportsCounts) {
  const auto r = cli({"validate", "--corpus", path("corpus.jsonl"), "--lexicon", path("lexicon.json")});
  EXPECT_EQ(r.code, tools::kExitOk) << r.err;
  EXPECT_NE(r.out.find("ok: 20 documents, 120 sentences"), std::string::npos) << r.out;
}

TEST_F(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(cli({"validate", "--corpus", path("corpus.jsonl"), "--bogus"}).code, tools::kExitUsage);
  EXPECT_EQ(cli({}).code, tools::kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, tools::kExitUsage);
  EXPECT_EQ(cli({"evaluate", "--gold", path("corpus.jsonl"), "--pred", path("corpus.jsonl"),
                 "--report", "xml"})
                .code,
            tools::kExitUsage);
  const auto features = cli({"train", "--corpus", path("corpus.jsonl"), "--lexicon",
                             path("lexicon.json"), "--out-dir", path("m-bad"), "--features",
                             "lemma,shape"});
  EXPECT_EQ(features.code, tools::kExitUsage);
  EXPECT_NE(features.err.find("shape"), std::string::npos);
}

TEST_F(Cli, HelpExitsZero) {
  const auto r = cli({"--help"});
  EXPECT_EQ(r.code, tools::kExitOk);
  EXPECT_NE(r.out.find("train"), std::string::npos);
}

TEST_F(Cli, InvalidDataExitsWithOne) {
  const auto bad = dir_ / "bad.jsonl";
  std::ofstream(bad) << "{\"doc_id\": \"x\"\n";
  const auto r = cli({"validate", "--corpus", bad.string()});
  EXPECT_EQ(r.code, tools::kExitFailure);
  EXPECT_NE(r.err.find("invalid input (malformed)"), std::string::npos) << r.err;
}

TEST_F(Cli, SelfEvaluationScoresOne) {
  const auto out = path("self.json");
  const auto r = cli({"evaluate", "--gold", path("corpus.jsonl"), "--pred", path("corpus.jsonl"),
                      "--questions", path("questions.tsv"), "--report", "json", "--out", out});
  ASSERT_EQ(r.code, tools::kExitOk) << r.err;
  const auto report = slurp(out);
  EXPECT_NE(report.find("\"fmeasure\": 1.0"), std::string::npos);
  EXPECT_EQ(report.find("\"fp\": 1"), std::string::npos);
}

TEST_F(Cli, TrainPredictEvaluate) {
  const auto models = path("models");
  auto r = cli({"train", "--corpus", path("corpus.jsonl"), "--lexicon", path("lexicon.json"),
                "--out-dir", models, "--max-iter", "50"});
  ASSERT_EQ(r.code, tools::kExitOk) << r.err;
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(models) / "registry.json"));
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(models) / "run_config.json"));

  r = cli({"predict", "--models", models, "--corpus", path("corpus.jsonl"), "--out",
           path("pred.jsonl"), "--jobs", "2"});
  ASSERT_EQ(r.code, tools::kExitOk) << r.err;
  EXPECT_NE(r.out.find("\"predicted_instances\""), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(path("pred.jsonl") + ".run.json"));
  EXPECT_NO_THROW(parse_corpus(path("pred.jsonl")));

  r = cli({"evaluate", "--gold", path("corpus.jsonl"), "--pred", path("pred.jsonl"), "--lexicon",
           path("lexicon.json")});
  ASSERT_EQ(r.code, tools::kExitOk) << r.err;
  EXPECT_NE(r.out.find("SR"), std::string::npos);
}

TEST_F(Cli, ModelDirectoryFromEnvironment) {
  const auto models = path("env-models");
  ::setenv(tools::kModelDirEnv, models.c_str(), 1);
  auto r = cli({"train", "--corpus", path("corpus.jsonl"), "--lexicon", path("lexicon.json"),
                "--max-iter", "5"});
  EXPECT_EQ(r.code, tools::kExitOk) << r.err;
  r = cli({"predict", "--corpus", path("corpus.jsonl"), "--out", path("env-pred.jsonl")});
  EXPECT_EQ(r.code, tools::kExitOk) << r.err;
  ::unsetenv(tools::kModelDirEnv);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(models) / "registry.json"));
}

TEST_F(Cli, FoldsAreReproducible) {
  const auto a = cli({"folds", "--corpus", path("corpus.jsonl"), "--k", "3", "--seed", "11"});
  const auto b = cli({"folds", "--corpus", path("corpus.jsonl"), "--k", "3", "--seed", "11"});
  ASSERT_EQ(a.code, tools::kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("\"assignment\""), std::string::npos);
}

TEST_F(Cli, AblateWritesRunDirectory) {
  const auto out = path("ablate");
  const auto r = cli({"ablate", "--corpus", path("corpus.jsonl"), "--lexicon", path("lexicon.json"),
                      "--k", "2", "--rows", "all,-dep_path", "--max-iter", "20", "--jobs", "4",
                      "--out-dir", out});
  ASSERT_EQ(r.code, tools::kExitOk) << r.err;
  for (const char* f : {"folds.json", "results.json", "results.txt", "run_config.json"}) {
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(out) / f)) << f;
  }
  EXPECT_NE(slurp(std::filesystem::path(out) / "results.txt").find("-dep_path"), std::string::npos);
}

TEST_F(Cli, ComposeRunsFromSpecFile) {
  const auto spec = dir_ / "spec.json";
  std::ofstream(spec) << R"({"test_source": "WGM", "k": 2,
    "rows": [{"name": "cross", "parts": [{"source": "CTGM", "fraction": 1.0}]}]})";
  const auto out = path("compose");
  const auto r = cli({"compose", "--corpus", path("corpus.jsonl"), "--lexicon", path("lexicon.json"),
                      "--spec", spec.string(), "--max-iter", "20", "--out-dir", out});
  ASSERT_EQ(r.code, tools::kExitOk) << r.err;
  EXPECT_NE(slurp(std::filesystem::path(out) / "results.json").find("cross"), std::string::npos);
}

}  // namespace
