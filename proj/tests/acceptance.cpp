// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "morphalign/error.hpp"
#include "morphalign/ibm1.hpp"
#include "morphalign/metrics.hpp"
#include "morphalign/stats.hpp"
#include "morphalign/sweep.hpp"
#include "morphalign/synthetic.hpp"
#include "morphalign/tokenizers.hpp"
#include "oracles.hpp"

namespace ma = morphalign;
using Strings = std::vector<std::string>;

namespace {

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void note(const std::string& text) { notes_.push_back(text); }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::string s;
    for (const auto& n : notes_) s += (s.empty() ? "" : "; ") + n;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + std::string("failed: ") + f;
    if (failed_ > failures_.size()) s += "; +" + std::to_string(failed_ - failures_.size()) + " more";
    return s;
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
  std::size_t failed_ = 0;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// 1. IBM1 equals the brute-force EM oracle; loglik never decreases.
void ibm1_oracle(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& corpus : fixtures::ibm1_corpora()) {
    for (const int epochs : {1, 2, 10}) {
      const auto expected = oracle::ibm1(corpus, epochs);
      ma::Ibm1Options options;
      options.epochs = static_cast<std::size_t>(epochs);
      const auto table = ma::train_ibm1(fixtures::to_pairs(corpus), options);
      std::size_t entries = 0;
      for (const auto& [s, row] : expected) {
        for (const auto& [f, p] : row) {
          worst = std::max(worst, std::abs(table.probability(s, f) - p));
          ++entries;
        }
      }
      c.require(table.size() == entries, "table support differs from oracle");
    }
  }
  c.require(worst <= 1e-10, "max |diff| " + fmt(worst) + " > 1e-10");
  std::mt19937_64 rng(1);
  std::size_t decreases = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ma::Ibm1Options options;
    options.epochs = 10;
    const auto table = ma::train_ibm1(fixtures::to_pairs(fixtures::random_corpus(rng)), options);
    for (std::size_t i = 1; i < table.loglik_trajectory.size(); ++i) {
      if (table.loglik_trajectory[i] < table.loglik_trajectory[i - 1] - 1e-12) ++decreases;
    }
  }
  c.require(decreases == 0, std::to_string(decreases) + " loglik decreases");
  const double elapsed = seconds_since(start);
  c.require(elapsed < 5.0, "runtime " + fmt(elapsed) + " s");
  c.note("max |diff| " + fmt(worst) + ", " + fmt(elapsed) + " s");
}

// 2. Every source row sums to one after every epoch.
void normalization(Check& c) {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto pairs = fixtures::to_pairs(fixtures::random_corpus(rng, 12, 6, 6));
    auto table = ma::uniform_table(pairs);
    for (int e = 0; e < 10; ++e) {
      table = ma::em_epoch(pairs, table).table;
      for (const auto& [s, row] : table.rows()) {
        double sum = 0.0;
        for (const auto& [f, p] : row) sum += p;
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
  }
  c.require(worst <= 1e-9, "row sum off by " + fmt(worst));
  c.note("max |row sum - 1| " + fmt(worst));
}

// 3. alignment_score equals the formula oracle on the hand-built fixture.
void eq1_oracle(Check& c) {
  const auto table = fixtures::eq1_table();
  const auto words = fixtures::eq1_words();
  const auto t = fixtures::to_table(table);
  const auto corpus = fixtures::to_corpus(words);
  double worst = 0.0;
  for (const auto agg : ma::kAllAggregations) {
    for (const double thr : {0.01, 0.3, 0.5}) {
      const double got = ma::alignment_score(t, corpus, agg, thr);
      const double want = oracle::eq1(table, words, static_cast<oracle::Agg>(static_cast<int>(agg)), thr);
      worst = std::max(worst, std::abs(got - want));
    }
  }
  c.require(worst <= 1e-12, "max |diff| " + fmt(worst));
  c.note("15 cells, max |diff| " + fmt(worst));
}

// 4. Boundary identities.
void boundary_identities(Check& c) {
  std::vector<ma::CuratedDataset> datasets{fixtures::table1_dataset()};
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) datasets.push_back(fixtures::random_dataset(rng, 1 + rng() % 50));
  for (const auto& d : datasets) {
    const auto gold = ma::boundary_prf(d, fixtures::gold_model(d));
    c.require(gold.precision == 1.0 && gold.recall == 1.0 && gold.f1 == 1.0, "gold P/R/F1 != 1");
    c.require(ma::boundary_prf(d, ma::TokenizerModel::character()).recall == 1.0, "character recall != 1");
  }
  ma::CuratedDataset d;
  d.entries.emplace_back("bázeň", Strings{"báz", "eň"}, Strings{"N"});
  const auto miss = ma::boundary_prf(d, ma::TokenizerModel::gold({{"bázeň", {"bá", "zeň"}}}));
  c.require(miss.precision == 0.0 && miss.recall == 0.0 && miss.f1 == 0.0, "báz|eň vs bá|zeň not 0/0/0");
  c.note(std::to_string(datasets.size()) + " datasets");
}

// 5. Tokenizer correctness.
void tokenizers(Check& c) {
  std::mt19937_64 rng(5);
  std::size_t bpe_runs = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto corpus = fixtures::random_word_counts(rng, 1 + rng() % 50);
    const std::size_t budget = ma::alphabet(corpus).size() + rng() % 60;
    ma::TrainConfig cfg;
    cfg.vocab_size = budget;
    const auto m = ma::train_bpe(corpus, cfg);
    const auto want = oracle::bpe(corpus, budget);
    c.require(m.merges() == want.merges && m.vocab() == want.vocab, "BPE merges differ from oracle");
    ++bpe_runs;
  }

  std::size_t viterbi_words = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto corpus = fixtures::random_word_counts(rng, 30, 8);
    ma::TrainConfig cfg;
    cfg.kind = ma::TokenizerKind::kUnigram;
    cfg.vocab_size = ma::alphabet(corpus).size() + 10 + rng() % 40;
    const auto m = ma::train_unigram(corpus, cfg);
    for (const auto& [w, n] : corpus) {
      double lp = 0.0;
      for (const auto& t : ma::segment(m, w)) lp += m.token_logprob().at(t);
      const double best = oracle::best_segmentation_logprob(w, m.token_logprob());
      c.require(std::abs(lp - best) <= 1e-9 * std::max(1.0, std::abs(best)), "Viterbi not optimal on " + w);
      ++viterbi_words;
    }
  }

  const auto corpus = fixtures::random_word_counts(rng, 300);
  std::vector<ma::TokenizerModel> models;
  for (const auto kind : {ma::TokenizerKind::kBpe, ma::TokenizerKind::kWordPiece, ma::TokenizerKind::kUnigram}) {
    ma::TrainConfig cfg;
    cfg.kind = kind;
    cfg.vocab_size = ma::alphabet(corpus).size() + 150;
    models.push_back(ma::train_tokenizer(corpus, cfg));
    c.require(ma::serialize_model(models.back()) == ma::serialize_model(ma::train_tokenizer(corpus, cfg)),
              std::string(ma::to_string(kind)) + " model not byte-identical on rerun");
  }
  models.push_back(ma::TokenizerModel::character());
  for (int i = 0; i < 10000; ++i) {
    const std::string w = fixtures::random_word(rng, 1, 14);
    for (const auto& m : models) {
      const auto canon = ma::canonical_subwords(m, ma::segment(m, w));
      std::string joined;
      if (canon) for (const auto& t : *canon) joined += t;
      c.require(canon && joined == w, std::string(ma::to_string(m.kind())) + " round trip fails on " + w);
    }
  }
  c.note(std::to_string(bpe_runs) + " BPE oracle runs, " + std::to_string(viterbi_words) +
         " Viterbi words, 10000 fuzz words x 4 models");
}

// 6. Spearman.
void spearman(Check& c) {
  using D = std::vector<double>;
  c.require(ma::spearman(D{1, 2, 3, 4}, D{1, 3, 2, 4}) == 0.8, "hand example != 0.8");
  c.require(ma::spearman(D{1, 2, 3}, D{2, 4, 6}) == 1.0, "monotone != 1");
  c.require(ma::spearman(D{1, 2, 3}, D{6, 4, 2}) == -1.0, "anti-monotone != -1");
  const D x{1, 2, 2, 3, 5, 5, 5, 8};
  const D y{2, 1, 4, 4, 3, 9, 9, 7};
  const double diff = std::abs(ma::spearman(x, y) - oracle::spearman(x, y));
  c.require(diff <= 1e-12, "tie fixture off by " + fmt(diff));
  c.note("tie fixture rho " + fmt(ma::spearman(x, y)));
}

// 7. Synthetic-language sweep.
void synthetic_end_to_end(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  fixtures::TempDir dir;
  ma::write_synthetic_language(dir.file("toy"), ma::generate_synthetic_language({}));
  ma::SweepConfig config;
  config.languages = {{"toy", dir.file("toy/features.tsv"), dir.file("toy/segmentations.tsv"),
                       dir.file("toy/corpus.txt")}};
  config.kinds = {ma::TokenizerKind::kBpe, ma::TokenizerKind::kUnigram, ma::TokenizerKind::kWordPiece,
                  ma::TokenizerKind::kCharacter, ma::TokenizerKind::kGoldLookup};
  config.vocab_sizes = {200, 400, 800};
  config.modes = {ma::FeatureMode::kSplit};
  config.aggregations = {ma::AggregationKind::kMean};
  config.thresholds = {0.01};
  config.output_dir = dir.file("out");
  const auto result = ma::run_sweep(config);
  const double elapsed = seconds_since(start);

  c.require(result.failures.empty(), "grid failures");
  c.require(result.rows.size() == 11, "expected 11 grid points, got " + std::to_string(result.rows.size()));
  const auto* cell = result.report.find("toy", ma::FeatureMode::kSplit, ma::AggregationKind::kMean, 0.01,
                                        ma::TargetMetric::kRecall);
  const bool have_rho = cell && cell->rho;
  c.require(have_rho, "no rho for the recall cell");
  if (have_rho) {
    c.require(*cell->rho >= 0.7, "rho(score, recall) = " + fmt(*cell->rho) + " < 0.7");
    c.note("rho(score, recall) " + fmt(*cell->rho));
  }
  double gold = NAN;
  double chars = NAN;
  for (const auto& row : result.rows) {
    if (row.kind == ma::TokenizerKind::kGoldLookup) gold = row.alignment_score;
    if (row.kind == ma::TokenizerKind::kCharacter) chars = row.alignment_score;
  }
  c.require(gold > chars, "gold " + fmt(gold) + " <= character " + fmt(chars));
  c.note("gold " + fmt(gold) + " > character " + fmt(chars) + ": " + (gold > chars ? "yes" : "no"));
  c.require(elapsed < 120.0, "runtime " + fmt(elapsed) + " s");
  c.note(fmt(elapsed) + " s");
}

// 8. Degenerate inputs produce the documented error or count.
void degenerate(Check& c) {
  {
    ma::SegmentationLexicon seg;
    seg.segments["a"] = {"a"};
    ma::FeatureLexicon feat;
    feat.rows.push_back({"b", "N"});
    bool ok = false;
    try {
      ma::curate(seg, feat);
    } catch (const ma::DataError& e) {
      ok = std::string(e.what()).find("empty join") != std::string::npos;
    }
    c.require(ok, "empty join did not raise the empty-join error");
  }
  {
    bool ok = false;
    try {
      ma::spearman(std::vector<double>{0.3, 0.3, 0.3}, std::vector<double>{1, 2, 3});
    } catch (const ma::NumericalError&) {
      ok = true;
    }
    c.require(ok, "constant series did not raise");
    std::vector<ma::ScoreRow> rows;
    for (const std::size_t size : {100, 200, 300}) {
      ma::ScoreRow r;
      r.language = "xx";
      r.vocab_size = size;
      r.alignment_score = 0.5;
      r.recall = static_cast<double>(size) / 1000.0;
      rows.push_back(r);
    }
    const auto report = ma::build_report(rows);
    const auto* cell = report.find("xx", ma::FeatureMode::kSplit, ma::AggregationKind::kMean, 0.0,
                                   ma::TargetMetric::kRecall);
    c.require(cell && !cell->rho && !cell->note.empty(), "constant series not reported as a missing cell");
  }
  {
    const auto d = fixtures::table1_dataset();
    ma::EvaluateOptions options;
    options.thresholds = {0.99};
    bool all_zero = true;
    for (const auto& model : {ma::TokenizerModel::character(), fixtures::gold_model(d)}) {
      for (const auto& row : ma::evaluate(d, model, options).rows) {
        all_zero = all_zero && row.alignment_score == 0.0 && !std::isnan(row.alignment_score);
      }
    }
    c.require(all_zero, "threshold 0.99 gave non-zero or NaN scores");
  }
  {
    ma::CuratedDataset d;
    d.entries.emplace_back("ab", Strings{"a", "b"}, Strings{"N"});
    d.entries.emplace_back("ax", Strings{"a", "x"}, Strings{"V"});
    d.entries.emplace_back("qq", Strings{"q", "q"}, Strings{"V"});
    const auto wp = ma::TokenizerModel::wordpiece({"a", "b"}, {});
    ma::EvaluateOptions options;
    options.thresholds = {0.01};
    const auto ev = ma::evaluate(d, wp, options);
    bool counted = !ev.rows.empty();
    for (const auto& row : ev.rows) counted = counted && row.excluded_count == 2 && !std::isnan(row.alignment_score);
    c.require(counted && ev.boundary.excluded == 2 && ev.boundary.scored_words == 1, "UNK exclusion miscounted");
    ma::CuratedDataset all_unk;
    all_unk.entries.emplace_back("qq", Strings{"q", "q"}, Strings{"V"});
    bool raised = false;
    try {
      ma::evaluate(all_unk, wp, options);
    } catch (const ma::DataError&) {
      raised = true;
    }
    c.require(raised, "all-UNK dataset did not raise");
  }
  c.note("4 degenerate cases");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"IBM1 oracle equivalence", ibm1_oracle},
      {"translation table normalization", normalization},
      {"alignment score oracle", eq1_oracle},
      {"boundary metric identities", boundary_identities},
      {"tokenizer correctness", tokenizers},
      {"Spearman correlation", spearman},
      {"synthetic-language end-to-end", synthetic_end_to_end},
      {"degenerate inputs", degenerate},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    try {
      criteria[i].second(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (check.ok() ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
              << check.summary() << ")" << std::endl;
    if (!check.ok()) ++failed;
  }
  return failed;
}
