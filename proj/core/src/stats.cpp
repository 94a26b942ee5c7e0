#include "morphalign/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <tuple>

#include "morphalign/error.hpp"

namespace morphalign {

std::vector<double> average_ranks(std::span<const double> values) {
  for (const double v : values) {
    if (std::isnan(v)) throw DataError("cannot rank NaN");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold 1-based ranks i+1..j; their mean is (i+1+j)/2.
    const double rank = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DataError("correlation of series with different lengths");
  if (xs.empty()) throw DataError("correlation of empty series");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericalError("correlation undefined for a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DataError("spearman: series lengths differ");
  if (xs.size() < kMinCorrelationPoints) {
    throw DataError("spearman: need at least " + std::to_string(kMinCorrelationPoints) + " points");
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

std::string label(const GridPoint& point) {
  if (is_baseline(point.kind)) return std::string(to_string(point.kind));
  return std::string(to_string(point.kind)) + "-" + std::to_string(point.vocab_size);
}

std::string_view to_string(TargetMetric target) {
  switch (target) {
    case TargetMetric::kPrecision: return "precision";
    case TargetMetric::kRecall: return "recall";
    case TargetMetric::kF1: return "f1";
  }
  return "unknown";
}

const CorrelationCell* CorrelationReport::find(std::string_view language, FeatureMode mode,
                                               AggregationKind aggregation, double threshold,
                                               TargetMetric target,
                                               std::string_view population) const {
  for (const auto& cell : cells) {
    if (cell.language == language && cell.mode == mode && cell.aggregation == aggregation &&
        cell.threshold == threshold && cell.target == target && cell.population == population) {
      return &cell;
    }
  }
  return nullptr;
}

namespace {

using CellKey = std::tuple<std::string, int, int, double>;

struct PointValues {
  double score = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

double target_value(const PointValues& v, TargetMetric target) {
  switch (target) {
    case TargetMetric::kPrecision: return v.precision;
    case TargetMetric::kRecall: return v.recall;
    case TargetMetric::kF1: return v.f1;
  }
  return 0.0;
}

void correlate(const std::map<GridPoint, PointValues>& series, CorrelationCell prototype,
               std::vector<CorrelationCell>& out) {
  for (const auto target : {TargetMetric::kPrecision, TargetMetric::kRecall, TargetMetric::kF1}) {
    CorrelationCell cell = prototype;
    cell.target = target;
    cell.points = series.size();
    std::vector<double> scores;
    std::vector<double> values;
    for (const auto& [point, v] : series) {
      scores.push_back(v.score);
      values.push_back(target_value(v, target));
    }
    if (series.size() < kMinCorrelationPoints) {
      cell.note = "too few grid points";
    } else {
      try {
        cell.rho = spearman(scores, values);
      } catch (const NumericalError&) {
        cell.note = "constant series";
      }
    }
    out.push_back(std::move(cell));
  }
}

}  // namespace

CorrelationReport build_report(std::span<const ScoreRow> rows) {
  std::map<CellKey, std::map<GridPoint, PointValues>> grid;
  for (const auto& row : rows) {
    const CellKey key{row.language, static_cast<int>(row.mode), static_cast<int>(row.aggregation),
                      row.threshold};
    const GridPoint point{row.kind, is_baseline(row.kind) ? 0 : row.vocab_size};
    grid[key].emplace(point, PointValues{row.alignment_score, row.precision, row.recall, row.f1});
  }
  CorrelationReport report;
  for (const auto& [key, series] : grid) {
    CorrelationCell prototype;
    prototype.language = std::get<0>(key);
    prototype.mode = static_cast<FeatureMode>(std::get<1>(key));
    prototype.aggregation = static_cast<AggregationKind>(std::get<2>(key));
    prototype.threshold = std::get<3>(key);
    prototype.population = "all";
    correlate(series, prototype, report.cells);

    std::map<TokenizerKind, std::map<GridPoint, PointValues>> by_kind;
    for (const auto& [point, v] : series) {
      if (!is_baseline(point.kind)) by_kind[point.kind].emplace(point, v);
    }
    for (const auto& [kind, sub] : by_kind) {
      prototype.population = std::string(to_string(kind));
      correlate(sub, prototype, report.cells);
    }
  }
  return report;
}

void write_report_csv(std::ostream& out, const CorrelationReport& report, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "language,mode,aggregation,threshold,population,target,points,rho,note\n";
  for (const auto& cell : report.cells) {
    out << cell.language << ',' << to_string(cell.mode) << ',' << to_string(cell.aggregation) << ','
        << format_real(cell.threshold) << ',' << cell.population << ',' << to_string(cell.target)
        << ',' << cell.points << ',' << (cell.rho ? format_real(*cell.rho) : std::string()) << ','
        << cell.note << '\n';
  }
}

}  // namespace morphalign
