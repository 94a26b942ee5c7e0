#include "morphalign/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "morphalign/error.hpp"
#include "morphalign/unicode.hpp"

namespace morphalign {
namespace {

constexpr std::string_view kScoreColumns[] = {
    "language", "tokenizer", "vocab_size", "mode", "aggregation", "threshold",
    "alignment_score", "precision", "recall", "f1", "excluded_count"};

double parse_real(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::size_t parse_count(std::string_view text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("not a non-negative integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string_view to_string(AggregationKind kind) {
  switch (kind) {
    case AggregationKind::kSum: return "sum";
    case AggregationKind::kLog: return "log";
    case AggregationKind::kMean: return "mean";
    case AggregationKind::kMin: return "min";
    case AggregationKind::kMax: return "max";
  }
  return "unknown";
}

AggregationKind parse_aggregation(std::string_view text) {
  std::string lowered(text);
  for (auto& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const auto kind : kAllAggregations) {
    if (to_string(kind) == lowered) return kind;
  }
  throw ConfigError("unknown aggregation '" + std::string(text) + "'");
}

double subword_score(const TranslationTable& table, std::string_view subword,
                     std::span<const std::string> features, const ScoreConfig& config) {
  double sum = 0.0;
  double log_sum = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  std::size_t kept = 0;
  for (const auto& feature : features) {
    const double p = lookup(table, subword, feature);
    if (!(p > config.threshold)) continue;
    ++kept;
    sum += p;
    log_sum += std::log(p);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  if (kept == 0) return 0.0;
  switch (config.aggregation) {
    case AggregationKind::kSum: return sum;
    case AggregationKind::kLog: return log_sum;
    case AggregationKind::kMean: return sum / static_cast<double>(kept);
    case AggregationKind::kMin: return lo;
    case AggregationKind::kMax: return hi;
  }
  return 0.0;
}

double alignment_score(const TranslationTable& table, const ParallelCorpus& corpus,
                       AggregationKind aggregation, double threshold) {
  if (corpus.pairs.empty()) throw DataError("alignment score of an empty corpus");
  const ScoreConfig config{aggregation, threshold, FeatureMode::kSplit};
  double total = 0.0;
  std::size_t words = 0;
  for (const auto& pair : corpus.pairs) {
    double word_total = 0.0;
    std::size_t subwords = 0;
    for (const auto& subword : pair.source) {
      if (subword == kNullToken) continue;
      word_total += subword_score(table, subword, pair.target, config);
      ++subwords;
    }
    if (subwords == 0) continue;
    total += word_total / static_cast<double>(subwords);
    ++words;
  }
  if (words == 0) throw DataError("alignment score: no scorable entries");
  return total / static_cast<double>(words);
}

double alignment_score(const TranslationTable& table, const CuratedDataset& dataset,
                       const TokenizerModel& model, const ScoreConfig& config) {
  const ParallelCorpus corpus = build_parallel_corpus(dataset, model, config.mode);
  return alignment_score(table, corpus, config.aggregation, config.threshold);
}

std::set<std::size_t> boundary_positions(std::span<const std::string> segments) {
  std::set<std::size_t> positions;
  std::size_t offset = 0;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    offset += unicode::length(segments[i]);
    positions.insert(offset);
  }
  return positions;
}

BoundaryCounts& BoundaryCounts::operator+=(const BoundaryCounts& other) noexcept {
  true_positive += other.true_positive;
  predicted_total += other.predicted_total;
  gold_total += other.gold_total;
  return *this;
}

BoundaryScores boundary_scores(const BoundaryCounts& counts) {
  BoundaryScores scores;
  scores.counts = counts;
  const auto ratio = [](std::uint64_t tp, std::uint64_t total) {
    // An empty denominator implies tp == 0; nothing was missed.
    return total == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(total);
  };
  scores.precision = ratio(counts.true_positive, counts.predicted_total);
  scores.recall = ratio(counts.true_positive, counts.gold_total);
  const double denom = scores.precision + scores.recall;
  scores.f1 = denom > 0.0 ? 2.0 * scores.precision * scores.recall / denom : 0.0;
  return scores;
}

BoundaryScores boundary_prf(const CuratedDataset& dataset, const TokenizerModel& model) {
  if (dataset.entries.empty()) throw DataError("boundary metrics of an empty dataset");
  BoundaryCounts counts;
  std::size_t scored = 0;
  std::size_t excluded = 0;
  std::unordered_map<std::string, std::optional<std::vector<std::string>>> cache;
  for (const auto& entry : dataset.entries) {
    auto it = cache.find(entry.form());
    if (it == cache.end()) {
      it = cache.emplace(entry.form(), canonical_subwords(model, segment(model, entry.form()))).first;
    }
    if (!it->second) {
      ++excluded;
      continue;
    }
    const auto gold = boundary_positions(entry.gold_segments());
    const auto predicted = boundary_positions(*it->second);
    std::size_t tp = 0;
    for (const std::size_t pos : predicted) tp += gold.count(pos);
    counts += BoundaryCounts{tp, predicted.size(), gold.size()};
    ++scored;
  }
  if (scored == 0) throw DataError("boundary metrics: every word contains the unknown token");
  BoundaryScores scores = boundary_scores(counts);
  scores.scored_words = scored;
  scores.excluded = excluded;
  return scores;
}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void write_score_rows(std::ostream& out, std::span<const ScoreRow> rows, std::string_view comment,
                      char sep) {
  if (!comment.empty()) out << "# " << comment << '\n';
  for (std::size_t i = 0; i < std::size(kScoreColumns); ++i) {
    if (i > 0) out << sep;
    out << kScoreColumns[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    out << row.language << sep << to_string(row.kind) << sep << row.vocab_size << sep
        << to_string(row.mode) << sep << to_string(row.aggregation) << sep
        << format_real(row.threshold) << sep << format_real(row.alignment_score) << sep
        << format_real(row.precision) << sep << format_real(row.recall) << sep
        << format_real(row.f1) << sep << row.excluded_count << '\n';
  }
}

std::vector<ScoreRow> read_score_rows(std::istream& in, char sep) {
  std::vector<ScoreRow> rows;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, sep);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != std::size(kScoreColumns) || fields[0] != kScoreColumns[0]) {
        throw DataError("score file: unexpected header");
      }
      continue;
    }
    if (fields.size() != std::size(kScoreColumns)) {
      throw DataError("score file line " + std::to_string(line_no) + ": expected " +
                      std::to_string(std::size(kScoreColumns)) + " fields");
    }
    ScoreRow row;
    row.language = fields[0];
    row.kind = parse_tokenizer_kind(fields[1]);
    row.vocab_size = parse_count(fields[2]);
    row.mode = parse_feature_mode(fields[3]);
    row.aggregation = parse_aggregation(fields[4]);
    row.threshold = parse_real(fields[5]);
    row.alignment_score = parse_real(fields[6]);
    row.precision = parse_real(fields[7]);
    row.recall = parse_real(fields[8]);
    row.f1 = parse_real(fields[9]);
    row.excluded_count = parse_count(fields[10]);
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw IoError("read error in score file");
  return rows;
}

}  // namespace morphalign
