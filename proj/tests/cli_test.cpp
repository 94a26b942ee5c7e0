#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "morphalign/metrics.hpp"
#include "morphalign/synthetic.hpp"

#ifndef MORPHALIGN_CLI
#error "MORPHALIGN_CLI must point at the morphalign executable"
#endif

namespace ma = morphalign;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr discarded and captures stdout.
Run run(const std::string& args) {
  const std::string cmd = std::string(MORPHALIGN_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string q(const std::string& path) { return "'" + path + "'"; }

const char* kFeatures =
    "rýžový\trýžový\tADJ;ACC;MASC;INAN;SG\n"
    "bázeň\tbázeň\tN;ACC;SG;FEM\n"
    "projet\tprojet\tV;NFIN\n";
const char* kSegmentations = "rýžový\trýž|ov|ý\nbázeň\tbáz|eň\nprojet\tpro|je|t\n";

}  // namespace

TEST(Cli, NoArgumentsIsUsageError) {
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("frobnicate").status, 1);
  EXPECT_EQ(run("--help").status, 0);
}

TEST(Cli, CurateKeepsRows) {
  fixtures::TempDir dir;
  write(dir.file("f.tsv"), kFeatures);
  write(dir.file("s.tsv"), kSegmentations);
  const auto r = run("curate --features " + q(dir.file("f.tsv")) + " --segmentations " + q(dir.file("s.tsv")) +
                     " -o " + q(dir.file("c.tsv")));
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("matched: 3"), std::string::npos);
  EXPECT_NE(r.out.find("dropped: 0"), std::string::npos);
  const auto curated = slurp(dir.file("c.tsv"));
  std::istringstream in(curated);
  EXPECT_EQ(ma::read_curated(in).entries, fixtures::table1_dataset().entries);
}

TEST(Cli, CurateReportsDropped) {
  fixtures::TempDir dir;
  write(dir.file("f.tsv"), kFeatures);
  write(dir.file("s.tsv"), "rýžový\trýž|ov|ý\nbázeň\tbáz|eň\n");
  const auto r = run("curate --features " + q(dir.file("f.tsv")) + " --segmentations " + q(dir.file("s.tsv")) +
                     " -o " + q(dir.file("c.tsv")));
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("matched: 2"), std::string::npos);
  EXPECT_NE(r.out.find("dropped: 1"), std::string::npos);
}

TEST(Cli, CurateEmptyFeatureFileFails) {
  fixtures::TempDir dir;
  write(dir.file("f.tsv"), "");
  write(dir.file("s.tsv"), kSegmentations);
  const auto r = run("curate --features " + q(dir.file("f.tsv")) + " --segmentations " + q(dir.file("s.tsv")) +
                     " -o " + q(dir.file("c.tsv")));
  EXPECT_EQ(r.status, 2);
  EXPECT_EQ(run("curate --features /nonexistent --segmentations " + q(dir.file("s.tsv")) + " -o " +
                q(dir.file("c.tsv")))
                .status,
            2);
}

TEST(Cli, TrainTokenizerBudgetAndDeterminism) {
  fixtures::TempDir dir;
  ma::SyntheticLanguageConfig lc;
  lc.sentences = 500;
  ma::write_synthetic_language(dir.file("lang"), ma::generate_synthetic_language(lc));
  const std::string corpus = q(dir.file("lang/corpus.txt"));
  for (const char* kind : {"bpe", "wordpiece", "unigram"}) {
    const std::string base = "train-tokenizer --corpus " + corpus + " --kind " + kind + " --vocab-size 300 -o ";
    ASSERT_EQ(run(base + q(dir.file("a.json"))).status, 0) << kind;
    ASSERT_EQ(run(base + q(dir.file("b.json"))).status, 0) << kind;
    EXPECT_EQ(slurp(dir.file("a.json")), slurp(dir.file("b.json"))) << kind;
    const auto model = nlohmann::json::parse(slurp(dir.file("a.json")));
    EXPECT_LE(model["vocab"].size(), 300u) << kind;
  }
  EXPECT_EQ(run("train-tokenizer --corpus " + corpus + " --kind bpe --vocab-size 3 -o " + q(dir.file("x.json")))
                .status,
            1);
  EXPECT_EQ(run("train-tokenizer --kind gold -o " + q(dir.file("x.json"))).status, 1);
  EXPECT_EQ(run("train-tokenizer --corpus " + corpus + " --kind nonsense --vocab-size 30 -o " +
                q(dir.file("x.json")))
                .status,
            1);
}

TEST(Cli, SegmentWords) {
  fixtures::TempDir dir;
  ASSERT_EQ(run("train-tokenizer --kind character -o " + q(dir.file("c.json"))).status, 0);
  const auto r = run("segment --model " + q(dir.file("c.json")) + " báz");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "báz\tb á z\n");
}

TEST(Cli, EvaluateGoldMatchesLibrary) {
  fixtures::TempDir dir;
  write(dir.file("f.tsv"), kFeatures);
  write(dir.file("s.tsv"), kSegmentations);
  ASSERT_EQ(run("curate --features " + q(dir.file("f.tsv")) + " --segmentations " + q(dir.file("s.tsv")) +
                " -o " + q(dir.file("c.tsv")))
                .status,
            0);
  ASSERT_EQ(run("train-tokenizer --kind gold --curated " + q(dir.file("c.tsv")) + " -o " + q(dir.file("g.json")))
                .status,
            0);
  const std::string base = "evaluate --curated " + q(dir.file("c.tsv")) + " --model " + q(dir.file("g.json"));
  ASSERT_EQ(run(base + " --thresholds 0.01,0.3 -o " + q(dir.file("rows.tsv")) + " --table-out " +
                q(dir.file("t10.json")))
                .status,
            0);
  std::istringstream in(slurp(dir.file("rows.tsv")));
  const auto rows = ma::read_score_rows(in);
  ASSERT_EQ(rows.size(), 10u);

  const auto d = fixtures::table1_dataset();
  std::vector<oracle::Pair> words;
  for (const auto& e : d.entries) words.push_back({e.gold_segments(), e.features()});
  const auto table = oracle::ibm1(words, 10);
  for (const auto& row : rows) {
    EXPECT_NEAR(row.alignment_score,
                oracle::eq1(table, words, static_cast<oracle::Agg>(static_cast<int>(row.aggregation)), row.threshold),
                1e-10);
    EXPECT_EQ(row.recall, 1.0);
  }

  ASSERT_EQ(run(base + " --epochs 1 -o " + q(dir.file("r1.tsv")) + " --table-out " + q(dir.file("t1.json"))).status, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir.file("t1.json")))["loglik"].size(), 1u);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir.file("t10.json")))["loglik"].size(), 10u);

  ASSERT_EQ(run(base + " --thresholds 0.99 -o " + q(dir.file("z.tsv"))).status, 0);
  std::istringstream zin(slurp(dir.file("z.tsv")));
  for (const auto& row : ma::read_score_rows(zin)) EXPECT_EQ(row.alignment_score, 0.0);

  EXPECT_EQ(run(base + " --aggregations median").status, 1);
  EXPECT_EQ(run(base + " --thresholds abc").status, 1);
}

TEST(Cli, EvaluateAllUnknownFails) {
  fixtures::TempDir dir;
  write(dir.file("c.tsv"), "xy\tx|y\tN\n");
  write(dir.file("corpus.txt"), "ab ab ba\n");
  ASSERT_EQ(run("train-tokenizer --corpus " + q(dir.file("corpus.txt")) + " --kind wordpiece --vocab-size 3 -o " +
                q(dir.file("wp.json")))
                .status,
            0);
  EXPECT_EQ(run("evaluate --curated " + q(dir.file("c.tsv")) + " --model " + q(dir.file("wp.json"))).status, 2);
}

TEST(Cli, SweepAndReport) {
  fixtures::TempDir dir;
  ma::SyntheticLanguageConfig lc;
  lc.sentences = 1500;
  ma::write_synthetic_language(dir.file("lang"), ma::generate_synthetic_language(lc));
  write(dir.file("sweep.json"), R"({
    "languages": [{"code": "toy", "features": "lang/features.tsv",
                   "segmentations": "lang/segmentations.tsv", "corpus": "lang/corpus.txt"}],
    "kinds": ["bpe", "unigram", "character", "gold"], "vocab_sizes": [300, 600],
    "modes": ["split"], "aggregations": ["mean"], "thresholds": [0.01], "epochs": 10,
    "output_dir": "out"})");
  const auto first = run("sweep --config " + q(dir.file("sweep.json")));
  ASSERT_EQ(first.status, 0);
  EXPECT_NE(first.out.find("grid points computed: 6"), std::string::npos);
  const auto correlations = slurp(dir.file("out/correlations.csv"));
  EXPECT_NE(correlations.find("toy,split,mean,0.01,all,recall,6,"), std::string::npos);

  std::filesystem::remove(dir.file("out/toy/models/bpe-600.json"));
  const auto second = run("sweep --config " + q(dir.file("sweep.json")));
  ASSERT_EQ(second.status, 0);
  EXPECT_NE(second.out.find("grid points computed: 1"), std::string::npos);
  EXPECT_NE(second.out.find("grid points reused: 5"), std::string::npos);
  EXPECT_EQ(slurp(dir.file("out/correlations.csv")), correlations);

  const auto report = run("report --scores " + q(dir.file("out/scores.tsv")));
  ASSERT_EQ(report.status, 0);
  // The standalone report equals the sweep's, minus the provenance comment.
  EXPECT_EQ(report.out, correlations.substr(correlations.find('\n') + 1));

  write(dir.file("bad.json"), R"({"languages": [], "unknown_key": 1})");
  EXPECT_EQ(run("sweep --config " + q(dir.file("bad.json"))).status, 1);
}
