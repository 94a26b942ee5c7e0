#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morphalign/corpus.hpp"
#include "morphalign/tokenizers.hpp"

namespace morphalign {

inline constexpr std::string_view kNullToken = "<NULL>";

/// One word's subwords and its feature tokens.
struct ParallelPair {
  std::vector<std::string> source;  ///< subwords, optionally followed by the NULL token
  std::vector<std::string> target;  ///< feature tokens in the chosen FeatureMode

  friend bool operator==(const ParallelPair&, const ParallelPair&) = default;
};

struct ParallelCorpus {
  std::vector<ParallelPair> pairs;
  /// Index into the dataset for every pair (same length as `pairs`).
  std::vector<std::size_t> entry_index;
  /// Entries dropped because their segmentation contains the unknown token.
  std::size_t excluded = 0;
};

struct ParallelOptions {
  bool null_token = false;
};

/// One pair per coverable entry. Throws DataError when every entry is excluded.
ParallelCorpus build_parallel_corpus(const CuratedDataset& dataset, const TokenizerModel& model,
                                     FeatureMode mode, const ParallelOptions& options = {});

/// Which side of a pair is conditioned on.
enum class AlignDirection {
  kSubwordToFeature,  ///< learns P(feature | subword); the metric's definition
  kFeatureToSubword,  ///< learns P(subword | feature); diagnostic only
};

std::string_view to_string(AlignDirection direction);
AlignDirection parse_align_direction(std::string_view text);

/// Sparse conditional distribution P(outcome | given). For the default
/// direction `given` is a subword and `outcome` a feature.
class TranslationTable {
 public:
  using Row = std::map<std::string, double, std::less<>>;
  using Rows = std::map<std::string, Row, std::less<>>;

  TranslationTable() = default;
  TranslationTable(Rows rows, AlignDirection direction);

  /// Probability of `outcome` given `given`; 0 for unseen pairs.
  double probability(std::string_view given, std::string_view outcome) const noexcept;
  const Row* row(std::string_view given) const noexcept;
  const Rows& rows() const noexcept { return rows_; }
  AlignDirection direction() const noexcept { return direction_; }

  std::size_t size() const noexcept;
  std::vector<std::string> source_vocab() const;
  std::vector<std::string> target_vocab() const;

  std::size_t epochs_trained = 0;
  /// Log-likelihood of the corpus under the table entering each epoch.
  std::vector<double> loglik_trajectory;
  double final_loglik() const noexcept {
    return loglik_trajectory.empty() ? 0.0 : loglik_trajectory.back();
  }

 private:
  Rows rows_;
  AlignDirection direction_ = AlignDirection::kSubwordToFeature;
};

/// P(feature | subword) for default-direction tables, P(subword | feature)
/// for reversed ones.
double lookup(const TranslationTable& table, std::string_view subword, std::string_view feature);

/// Uniform distribution over the outcomes that co-occur with each given token
/// in at least one pair.
TranslationTable uniform_table(std::span<const ParallelPair> pairs,
                               AlignDirection direction = AlignDirection::kSubwordToFeature);

struct EpochResult {
  TranslationTable table;
  double loglik = 0.0;  ///< under the input table
};

/// Entries below this are removed after every M-step.
inline constexpr double kProbabilityFloor = 1e-12;

/// One EM iteration. Throws NumericalError when some outcome token has no
/// probability mass from any token it co-occurs with.
EpochResult em_epoch(std::span<const ParallelPair> pairs, const TranslationTable& table);

struct Ibm1Options {
  std::size_t epochs = 10;
  AlignDirection direction = AlignDirection::kSubwordToFeature;
};

TranslationTable train_ibm1(std::span<const ParallelPair> pairs, const Ibm1Options& options = {});

inline constexpr std::string_view kTableSchema = "morphalign.ibm1-table/1";

/// Schema id, direction, epochs, log-likelihood trajectory and
/// (given, outcome, probability) triples in lexicographic order.
std::string serialize_table(const TranslationTable& table);
TranslationTable deserialize_table(std::string_view text);
void save_table(const std::string& path, const TranslationTable& table);
TranslationTable load_table(const std::string& path);

}  // namespace morphalign
