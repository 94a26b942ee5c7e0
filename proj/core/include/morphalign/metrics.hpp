#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphalign/corpus.hpp"
#include "morphalign/ibm1.hpp"
#include "morphalign/tokenizers.hpp"

namespace morphalign {

/// Reduction over the thresholded probabilities of one subword.
enum class AggregationKind { kSum, kLog, kMean, kMin, kMax };

inline constexpr std::array<AggregationKind, 5> kAllAggregations = {
    AggregationKind::kSum, AggregationKind::kLog, AggregationKind::kMean,
    AggregationKind::kMin, AggregationKind::kMax};

std::string_view to_string(AggregationKind kind);
AggregationKind parse_aggregation(std::string_view text);

struct ScoreConfig {
  AggregationKind aggregation = AggregationKind::kMean;
  /// Only probabilities strictly above the threshold are aggregated.
  double threshold = 0.01;
  FeatureMode mode = FeatureMode::kSplit;
};

/// agg over { P(f|s) : f in features, P(f|s) > threshold }; 0 when nothing
/// survives (for every aggregation, Log included).
double subword_score(const TranslationTable& table, std::string_view subword,
                     std::span<const std::string> features, const ScoreConfig& config);

/// Mean over pairs of the mean subword score. The NULL token, when present in
/// a pair's source, is not scored. Throws DataError for an empty corpus.
double alignment_score(const TranslationTable& table, const ParallelCorpus& corpus,
                       AggregationKind aggregation, double threshold);

/// Segments the dataset with `model`, drops entries with the unknown token
/// and averages subword scores. Throws DataError when nothing is scorable.
double alignment_score(const TranslationTable& table, const CuratedDataset& dataset,
                       const TokenizerModel& model, const ScoreConfig& config);

/// Internal boundary offsets, counted in Unicode scalar values.
std::set<std::size_t> boundary_positions(std::span<const std::string> segments);

struct BoundaryCounts {
  std::uint64_t true_positive = 0;
  std::uint64_t predicted_total = 0;
  std::uint64_t gold_total = 0;

  BoundaryCounts& operator+=(const BoundaryCounts& other) noexcept;
};

struct BoundaryScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  BoundaryCounts counts;
  std::size_t scored_words = 0;
  std::size_t excluded = 0;  ///< words with the unknown token
};

/// Micro-averaged precision/recall/F1 from accumulated counts.
BoundaryScores boundary_scores(const BoundaryCounts& counts);

/// Throws DataError for an empty dataset or when every word is excluded.
BoundaryScores boundary_prf(const CuratedDataset& dataset, const TokenizerModel& model);

/// One cell of the evaluation grid.
struct ScoreRow {
  std::string language;
  TokenizerKind kind = TokenizerKind::kBpe;
  std::size_t vocab_size = 0;  ///< 0 for the baselines
  FeatureMode mode = FeatureMode::kSplit;
  AggregationKind aggregation = AggregationKind::kMean;
  double threshold = 0.0;
  double alignment_score = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t excluded_count = 0;

  friend bool operator==(const ScoreRow&, const ScoreRow&) = default;
};

/// Tab-separated, header line first. Reals use the shortest round-trip form.
/// A non-empty `comment` is written as a leading '#' line; readers skip it.
void write_score_rows(std::ostream& out, std::span<const ScoreRow> rows,
                      std::string_view comment = {}, char sep = '\t');
std::vector<ScoreRow> read_score_rows(std::istream& in, char sep = '\t');

/// Shortest decimal representation that parses back to the same double.
std::string format_real(double value);

}  // namespace morphalign
