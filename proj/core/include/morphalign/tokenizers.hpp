#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace morphalign {

namespace detail {
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view text) const noexcept {
    return std::hash<std::string_view>{}(text);
  }
};
using LogProbIndex = std::unordered_map<std::string, double, StringHash, std::equal_to<>>;
}  // namespace detail

enum class TokenizerKind { kBpe, kWordPiece, kUnigram, kCharacter, kGoldLookup };

std::string_view to_string(TokenizerKind kind);
/// Accepts bpe, wordpiece, unigram, character (or char), gold.
TokenizerKind parse_tokenizer_kind(std::string_view text);
/// Character and gold segmentation ignore the vocabulary budget.
bool is_baseline(TokenizerKind kind) noexcept;

/// Word type -> frequency. Ordered so that every pass over it is deterministic.
using WordCounts = std::map<std::string, std::uint64_t>;

/// Whitespace-tokenizes a plain-text corpus (one sentence per line) and counts
/// NFC-normalized word types.
WordCounts count_words(std::istream& in);
WordCounts count_words_file(const std::string& path);

/// Every code point that occurs in the corpus.
std::set<std::string> alphabet(const WordCounts& corpus);

struct TrainConfig {
  std::size_t vocab_size = 0;
  TokenizerKind kind = TokenizerKind::kBpe;
  /// Recorded in model files. Training is deterministic; ties are broken
  /// lexicographically, so the seed never changes the result.
  std::uint64_t seed = 0;
  std::size_t unigram_seed_vocab_factor = 4;
  double unigram_prune_fraction = 0.25;
  std::size_t unigram_max_piece_length = 20;
  /// Viterbi EM sweeps between two pruning rounds.
  std::size_t unigram_em_iterations = 2;
};

using MergePair = std::pair<std::string, std::string>;

inline constexpr std::string_view kContinuationMarker = "##";
inline constexpr std::string_view kUnknownToken = "[UNK]";

/// Result of segmenting one word, with coverage diagnostics.
struct Segmentation {
  std::vector<std::string> tokens;
  /// Characters unseen in training, emitted as raw single-character tokens
  /// (BPE, Unigram).
  std::size_t oov_characters = 0;
  /// WordPiece hit an unmatchable position and emitted the unknown token.
  bool has_unknown = false;
};

/// A trained (or baseline) subword segmenter. Immutable after construction;
/// segment() is safe to call concurrently.
class TokenizerModel {
 public:
  static TokenizerModel bpe(std::vector<std::string> vocab, std::vector<MergePair> merges);
  /// `merges` is the training history and is kept only for inspection;
  /// segmentation is greedy longest-match over `vocab`.
  static TokenizerModel wordpiece(std::vector<std::string> vocab, std::vector<MergePair> merges);
  static TokenizerModel unigram(std::vector<std::string> vocab, std::map<std::string, double> logprob);
  static TokenizerModel character();
  static TokenizerModel gold(std::map<std::string, std::vector<std::string>> gold_map);

  TokenizerKind kind() const noexcept { return kind_; }
  const std::vector<std::string>& vocab() const noexcept { return vocab_; }
  const std::vector<MergePair>& merges() const noexcept { return merges_; }
  const std::map<std::string, double>& token_logprob() const noexcept { return token_logprob_; }
  const std::map<std::string, std::vector<std::string>>& gold_map() const noexcept { return gold_map_; }
  /// "##" for WordPiece, empty otherwise.
  std::string_view continuation_marker() const noexcept;

  /// Budget the model was trained for (0 for baselines). Informational.
  std::size_t requested_vocab_size = 0;
  std::uint64_t seed = 0;

  Segmentation segment_detailed(std::string_view word) const;

 private:
  TokenizerModel() = default;
  void build_index();

  Segmentation segment_bpe(const std::vector<std::string>& chars) const;
  Segmentation segment_wordpiece(const std::vector<std::string>& chars) const;
  Segmentation segment_unigram(const std::vector<std::string>& chars) const;

  TokenizerKind kind_ = TokenizerKind::kCharacter;
  std::vector<std::string> vocab_;
  std::vector<MergePair> merges_;
  std::map<std::string, double> token_logprob_;
  std::map<std::string, std::vector<std::string>> gold_map_;

  std::unordered_map<std::string, std::size_t> merge_rank_;
  detail::LogProbIndex logprob_index_;
  std::set<std::string, std::less<>> vocab_set_;
  std::size_t max_token_chars_ = 0;
  double oov_logprob_ = 0.0;
};

/// Sennrich-style merge learning: most frequent adjacent pair first, ties to
/// the lexicographically smallest (left, right). Stops at the budget or when
/// no pair occurs at least twice.
TokenizerModel train_bpe(const WordCounts& corpus, const TrainConfig& config);

/// Same merge loop as BPE, selecting by count(l,r) / (count(l) * count(r)).
TokenizerModel train_wordpiece(const WordCounts& corpus, const TrainConfig& config);

/// Per-round Viterbi negative log-likelihood of the training corpus, one
/// inner vector per pruning round (fixed vocabulary within a round).
struct UnigramTrace {
  std::vector<std::vector<double>> nll_per_round;
  std::vector<std::size_t> vocab_size_per_round;
};

TokenizerModel train_unigram(const WordCounts& corpus, const TrainConfig& config,
                             UnigramTrace* trace = nullptr);

/// Dispatches on config.kind. Baseline kinds are rejected (build them directly).
TokenizerModel train_tokenizer(const WordCounts& corpus, const TrainConfig& config);

/// Word is NFC-normalized before segmentation. Throws DataError for an empty
/// word or a GoldLookup miss.
std::vector<std::string> segment(const TokenizerModel& model, std::string_view word);

/// Strips continuation markers. Returns nullopt when the unknown token is
/// present (the word cannot be covered).
std::optional<std::vector<std::string>> canonical_subwords(const TokenizerModel& model,
                                                           const std::vector<std::string>& tokens);

/// Versioned JSON document with a fixed field order; identical models
/// serialize to identical bytes.
std::string serialize_model(const TokenizerModel& model);
TokenizerModel deserialize_model(std::string_view text);
void save_model(const std::string& path, const TokenizerModel& model);
TokenizerModel load_model(const std::string& path);

inline constexpr std::string_view kModelSchema = "morphalign.tokenizer/1";

}  // namespace morphalign
