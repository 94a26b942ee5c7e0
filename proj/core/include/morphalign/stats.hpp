#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphalign/corpus.hpp"
#include "morphalign/metrics.hpp"
#include "morphalign/tokenizers.hpp"

namespace morphalign {

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson product-moment correlation. Throws NumericalError if either side
/// is constant and DataError on a length mismatch.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Pearson correlation of the average ranks. Requires equal lengths >= 3;
/// a constant series throws NumericalError (the correlation is undefined).
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Identifies one tokenizer of the grid.
struct GridPoint {
  TokenizerKind kind = TokenizerKind::kBpe;
  std::size_t vocab_size = 0;

  friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

std::string label(const GridPoint& point);

struct MetricSeries {
  std::vector<GridPoint> labels;
  std::vector<double> values;
};

enum class TargetMetric { kPrecision, kRecall, kF1 };
std::string_view to_string(TargetMetric target);

struct CorrelationCell {
  std::string language;
  FeatureMode mode = FeatureMode::kSplit;
  AggregationKind aggregation = AggregationKind::kMean;
  double threshold = 0.0;
  /// "all" for the tokenizer-level population, otherwise one tokenizer kind.
  std::string population;
  TargetMetric target = TargetMetric::kRecall;
  std::size_t points = 0;
  /// Empty when the cell is missing (too few points or a constant series).
  std::optional<double> rho;
  std::string note;
};

struct CorrelationReport {
  std::vector<CorrelationCell> cells;

  /// The tokenizer-level cell for the given coordinates, if present.
  const CorrelationCell* find(std::string_view language, FeatureMode mode,
                              AggregationKind aggregation, double threshold,
                              TargetMetric target, std::string_view population = "all") const;
};

inline constexpr std::size_t kMinCorrelationPoints = 3;

/// Correlates alignment scores with boundary precision, recall and F1 over
/// the tokenizer grid for every (language, mode, aggregation, threshold).
/// Also emits a per-kind breakdown where a kind has enough grid points.
CorrelationReport build_report(std::span<const ScoreRow> rows);

/// Long format: one line per cell and target metric. Missing cells carry an
/// empty rho and a note.
void write_report_csv(std::ostream& out, const CorrelationReport& report,
                      std::string_view comment = {});

}  // namespace morphalign
