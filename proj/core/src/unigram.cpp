#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "internal.hpp"
#include "morphalign/error.hpp"
#include "morphalign/tokenizers.hpp"
#include "morphalign/unicode.hpp"

namespace morphalign {
namespace {

using detail::CharSpans;
using detail::LogProbIndex;

// Pseudo-count given to characters that no Viterbi path uses, so that every
// character keeps a finite log-probability. It bounds how far one EM sweep
// can worsen the Viterbi objective: at most kUnusedCharCount per such
// character.
constexpr double kUnusedCharCount = 1e-6;

struct TypeEntry {
  CharSpans spans;
  double freq = 0.0;
};

struct Token {
  double prob = 0.0;
  bool is_char = false;
};

class UnigramTrainer {
 public:
  UnigramTrainer(const WordCounts& corpus, const TrainConfig& config) : config_(config) {
    if (corpus.empty()) throw DataError("empty training corpus");
    if (config.unigram_prune_fraction <= 0.0 || config.unigram_prune_fraction >= 1.0) {
      throw ConfigError("unigram prune fraction must lie in (0, 1)");
    }
    if (config.unigram_seed_vocab_factor == 0 || config.unigram_max_piece_length == 0) {
      throw ConfigError("unigram seed factor and maximum piece length must be positive");
    }
    for (const auto& [word, freq] : corpus) {
      if (freq == 0) continue;
      types_.push_back({detail::char_spans(word), static_cast<double>(freq)});
    }
    const auto chars = alphabet(corpus);
    if (config.vocab_size < chars.size()) {
      throw ConfigError("vocabulary size " + std::to_string(config.vocab_size) +
                        " is smaller than the corpus alphabet (" + std::to_string(chars.size()) +
                        " characters)");
    }
    seed(chars);
  }

  TokenizerModel run(UnigramTrace* trace) {
    while (true) {
      std::vector<double> nll_trajectory;
      for (std::size_t it = 0; it < std::max<std::size_t>(1, config_.unigram_em_iterations); ++it) {
        const double nll = em_step();
        if (!nll_trajectory.empty()) {
          const double slack = kUnusedCharCount * static_cast<double>(char_count_) + 1e-9 * std::abs(nll);
          if (nll > nll_trajectory.back() + slack) {
            throw NumericalError("unigram Viterbi EM increased the negative log-likelihood");
          }
        }
        nll_trajectory.push_back(nll);
      }
      if (trace != nullptr) {
        trace->nll_per_round.push_back(nll_trajectory);
        trace->vocab_size_per_round.push_back(tokens_.size());
      }
      if (tokens_.size() <= config_.vocab_size) break;
      prune();
    }
    return finish();
  }

 private:
  void seed(const std::set<std::string>& chars) {
    // Substring score = frequency x length in code points.
    std::unordered_map<std::string, double> score;
    for (const auto& type : types_) {
      const std::size_t n = type.spans.size();
      for (std::size_t begin = 0; begin < n; ++begin) {
        const std::size_t max_end = std::min(n, begin + config_.unigram_max_piece_length);
        for (std::size_t end = begin + 1; end <= max_end; ++end) {
          score[std::string(type.spans.piece(begin, end))] +=
              type.freq * static_cast<double>(end - begin);
        }
      }
    }
    std::vector<std::pair<std::string, double>> pieces;
    for (auto& [piece, s] : score) {
      if (!chars.contains(piece)) pieces.emplace_back(piece, s);
    }
    std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    const std::size_t cap = config_.unigram_seed_vocab_factor * config_.vocab_size;
    const std::size_t keep = cap > chars.size() ? std::min(pieces.size(), cap - chars.size()) : 0;
    pieces.resize(keep);

    double total = 0.0;
    for (const auto& c : chars) total += score.at(c);
    for (const auto& [piece, s] : pieces) total += s;
    for (const auto& c : chars) tokens_[c] = Token{score.at(c) / total, true};
    for (const auto& [piece, s] : pieces) tokens_[piece] = Token{s / total, false};
    char_count_ = chars.size();
    max_piece_ = 1;
    for (const auto& [piece, token] : tokens_) {
      max_piece_ = std::max(max_piece_, unicode::length(piece));
    }
  }

  LogProbIndex index() const {
    LogProbIndex idx;
    idx.reserve(tokens_.size());
    for (const auto& [piece, token] : tokens_) idx.emplace(piece, std::log(token.prob));
    return idx;
  }

  // Viterbi E-step plus relative-frequency M-step. Returns the negative
  // log-likelihood under the parameters entering the step.
  double em_step() {
    const auto idx = index();
    std::map<std::string, double> counts;
    double nll = 0.0;
    for (const auto& type : types_) {
      const auto path = detail::viterbi(type.spans, idx, max_piece_, kNoOov);
      nll -= type.freq * path.logprob;
      for (std::size_t i = 0; i + 1 < path.boundaries.size(); ++i) {
        counts[std::string(type.spans.piece(path.boundaries[i], path.boundaries[i + 1]))] += type.freq;
      }
    }
    double total = 0.0;
    for (auto it = tokens_.begin(); it != tokens_.end();) {
      const auto c = counts.find(it->first);
      if (c != counts.end()) {
        it->second.prob = c->second;
      } else if (it->second.is_char) {
        it->second.prob = kUnusedCharCount;
      } else {
        it = tokens_.erase(it);
        continue;
      }
      total += it->second.prob;
      ++it;
    }
    for (auto& [piece, token] : tokens_) token.prob /= total;
    return nll;
  }

  // Removes the pieces whose removal costs the least likelihood.
  void prune() {
    const auto idx = index();
    // Which word types use each piece in their best segmentation.
    std::unordered_map<std::string, std::vector<std::size_t>> users;
    std::vector<double> best(types_.size());
    for (std::size_t t = 0; t < types_.size(); ++t) {
      const auto path = detail::viterbi(types_[t].spans, idx, max_piece_, kNoOov);
      best[t] = path.logprob;
      for (std::size_t i = 0; i + 1 < path.boundaries.size(); ++i) {
        const auto piece = types_[t].spans.piece(path.boundaries[i], path.boundaries[i + 1]);
        if (!tokens_.at(std::string(piece)).is_char) users[std::string(piece)].push_back(t);
      }
    }
    struct Candidate {
      std::string piece;
      double loss;
      double prob;
    };
    std::vector<Candidate> candidates;
    for (const auto& [piece, token] : tokens_) {
      if (token.is_char) continue;
      double loss = 0.0;
      if (const auto it = users.find(piece); it != users.end()) {
        auto& list = it->second;
        list.erase(std::unique(list.begin(), list.end()), list.end());
        for (const std::size_t t : list) {
          const auto alt = detail::viterbi(types_[t].spans, idx, max_piece_, kNoOov, piece);
          loss += types_[t].freq * (best[t] - alt.logprob);
        }
      }
      candidates.push_back({piece, loss, token.prob});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.loss != b.loss) return a.loss < b.loss;
      if (a.prob != b.prob) return a.prob < b.prob;
      return a.piece < b.piece;
    });
    const auto shrunk = static_cast<std::size_t>(
        std::floor(static_cast<double>(tokens_.size()) * (1.0 - config_.unigram_prune_fraction)));
    const std::size_t target = std::max(config_.vocab_size, shrunk);
    const std::size_t remove = std::min(candidates.size(), tokens_.size() - std::min(target, tokens_.size()));
    for (std::size_t i = 0; i < std::max<std::size_t>(remove, 1) && i < candidates.size(); ++i) {
      tokens_.erase(candidates[i].piece);
    }
    double total = 0.0;
    for (const auto& [piece, token] : tokens_) total += token.prob;
    for (auto& [piece, token] : tokens_) token.prob /= total;
  }

  TokenizerModel finish() const {
    std::vector<std::string> chars;
    std::vector<std::pair<std::string, double>> pieces;
    std::map<std::string, double> logprob;
    for (const auto& [piece, token] : tokens_) {
      logprob[piece] = std::log(token.prob);
      if (token.is_char) {
        chars.push_back(piece);
      } else {
        pieces.emplace_back(piece, token.prob);
      }
    }
    std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    std::vector<std::string> vocab = std::move(chars);
    for (auto& [piece, prob] : pieces) vocab.push_back(std::move(piece));
    auto model = TokenizerModel::unigram(std::move(vocab), std::move(logprob));
    model.requested_vocab_size = config_.vocab_size;
    model.seed = config_.seed;
    return model;
  }

  // Every training character is in the vocabulary, so no OOV path is needed.
  static constexpr double kNoOov = -std::numeric_limits<double>::infinity();

  TrainConfig config_;
  std::vector<TypeEntry> types_;
  std::map<std::string, Token> tokens_;
  std::size_t char_count_ = 0;
  std::size_t max_piece_ = 1;
};

}  // namespace

TokenizerModel train_unigram(const WordCounts& corpus, const TrainConfig& config,
                             UnigramTrace* trace) {
  UnigramTrainer trainer(corpus, config);
  return trainer.run(trace);
}

}  // namespace morphalign
