#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "morphalign/corpus.hpp"
#include "morphalign/ibm1.hpp"
#include "morphalign/metrics.hpp"
#include "morphalign/stats.hpp"
#include "morphalign/tokenizers.hpp"

namespace morphalign {

/// 2k, 4k, 8k, 16k, 24k, ..., 80k.
std::vector<std::size_t> default_vocab_sizes();
/// 11 evenly spaced values from 0.01 to 0.5.
std::vector<double> default_thresholds();

struct EvaluateOptions {
  std::string language = "und";
  FeatureMode mode = FeatureMode::kSplit;
  std::vector<AggregationKind> aggregations{kAllAggregations.begin(), kAllAggregations.end()};
  std::vector<double> thresholds = default_thresholds();
  std::size_t epochs = 10;
  bool null_token = false;
  AlignDirection direction = AlignDirection::kSubwordToFeature;
};

struct Evaluation {
  TranslationTable table;
  BoundaryScores boundary;
  /// One row per (aggregation, threshold), in option order.
  std::vector<ScoreRow> rows;
};

/// Builds the parallel corpus, trains IBM Model 1 once and scores every
/// (aggregation, threshold) combination against the shared table.
Evaluation evaluate(const CuratedDataset& dataset, const TokenizerModel& model,
                    const EvaluateOptions& options);

struct LanguageInputs {
  std::string code;
  std::string feature_lexicon;
  std::string segmentation_lexicon;
  std::string corpus;
};

struct SweepConfig {
  std::vector<LanguageInputs> languages;
  /// Trainable kinds and baselines alike; baselines get one grid point each.
  std::vector<TokenizerKind> kinds{TokenizerKind::kBpe, TokenizerKind::kWordPiece,
                                   TokenizerKind::kUnigram, TokenizerKind::kCharacter,
                                   TokenizerKind::kGoldLookup};
  std::vector<std::size_t> vocab_sizes = default_vocab_sizes();
  std::vector<FeatureMode> modes{FeatureMode::kJoint, FeatureMode::kSplit};
  std::vector<AggregationKind> aggregations{kAllAggregations.begin(), kAllAggregations.end()};
  std::vector<double> thresholds = default_thresholds();
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  std::string output_dir = "sweep-out";
  std::size_t workers = 1;
  bool null_token = false;

  /// Throws ConfigError for empty lists, out-of-range values or missing paths.
  void validate(bool check_paths = true) const;
};

/// JSON document mirroring SweepConfig. Relative input paths resolve against
/// the config file's directory.
SweepConfig parse_sweep_config(std::string_view json_text, const std::string& base_dir = ".");
SweepConfig load_sweep_config(const std::string& path);

struct GridFailure {
  std::string language;
  GridPoint point;
  std::string message;
};

struct SweepResult {
  std::vector<ScoreRow> rows;
  CorrelationReport report;
  std::vector<GridFailure> failures;
  std::size_t computed_points = 0;
  std::size_t reused_points = 0;
};

/// Runs the whole grid. A grid point whose model and score files already
/// exist in the output directory is reused; anything else is recomputed.
/// Writes scores.tsv, scores.csv, correlations.csv and failures.tsv.
SweepResult run_sweep(const SweepConfig& config, std::ostream* log = nullptr);

/// Writes a file through a temporary sibling and a rename.
void write_file_atomic(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

}  // namespace morphalign
