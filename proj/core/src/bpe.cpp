#include <algorithm>
#include <cstdint>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "morphalign/error.hpp"
#include "morphalign/tokenizers.hpp"
#include "morphalign/unicode.hpp"

namespace morphalign {
namespace {

__extension__ using Wide = unsigned __int128;

using SymbolId = std::uint32_t;
using PairId = std::uint64_t;

PairId make_pair_id(SymbolId left, SymbolId right) {
  return (static_cast<PairId>(left) << 32) | right;
}
SymbolId left_of(PairId id) { return static_cast<SymbolId>(id >> 32); }
SymbolId right_of(PairId id) { return static_cast<SymbolId>(id & 0xFFFFFFFFu); }

enum class PairScore { kFrequency, kLikelihood };

// Incremental merge learner over word types. Pair and symbol counts are kept
// current after every merge; only the words containing the merged pair are
// re-scanned.
class MergeLearner {
 public:
  MergeLearner(const WordCounts& corpus, PairScore score) : score_(score) {
    for (const auto& [word, freq] : corpus) {
      if (freq == 0) continue;
      Word w;
      w.freq = freq;
      for (const auto& cp : unicode::code_points(word)) w.symbols.push_back(intern(cp));
      words_.push_back(std::move(w));
    }
    for (std::uint32_t i = 0; i < words_.size(); ++i) add_word(i);
  }

  std::size_t alphabet_size() const { return symbols_.size(); }
  const std::string& symbol(SymbolId id) const { return symbols_[id]; }

  std::vector<std::string> sorted_alphabet() const {
    std::vector<std::string> out(symbols_.begin(), symbols_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  // Best pair under the configured score with count >= min_count, ties to
  // the lexicographically smallest (left, right). Returns false when none.
  bool best_pair(std::uint64_t min_count, PairId* best) {
    if (score_ == PairScore::kFrequency) return best_by_frequency(min_count, best);
    return best_by_likelihood(min_count, best);
  }

  std::uint64_t pair_count(PairId id) const {
    const auto it = pair_counts_.find(id);
    return it == pair_counts_.end() ? 0 : it->second;
  }

  // Merges every non-overlapping occurrence (left to right) and returns the
  // new symbol's string.
  std::string apply_merge(PairId id) {
    const SymbolId left = left_of(id);
    const SymbolId right = right_of(id);
    std::string merged = symbols_[left] + symbols_[right];
    const SymbolId out = intern(merged);

    auto& occurrences = where_[id];
    std::sort(occurrences.begin(), occurrences.end());
    occurrences.erase(std::unique(occurrences.begin(), occurrences.end()), occurrences.end());
    const std::vector<std::uint32_t> affected = std::move(occurrences);
    where_.erase(id);

    for (const std::uint32_t wi : affected) {
      Word& w = words_[wi];
      bool present = false;
      for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
        if (w.symbols[i] == left && w.symbols[i + 1] == right) {
          present = true;
          break;
        }
      }
      if (!present) continue;
      remove_word(wi);
      std::vector<SymbolId> next;
      next.reserve(w.symbols.size());
      for (std::size_t i = 0; i < w.symbols.size(); ++i) {
        if (i + 1 < w.symbols.size() && w.symbols[i] == left && w.symbols[i + 1] == right) {
          next.push_back(out);
          ++i;
        } else {
          next.push_back(w.symbols[i]);
        }
      }
      w.symbols = std::move(next);
      add_word(wi);
    }
    return merged;
  }

 private:
  struct Word {
    std::vector<SymbolId> symbols;
    std::uint64_t freq = 0;
  };

  struct HeapEntry {
    std::uint64_t count;
    PairId id;
  };

  SymbolId intern(const std::string& text) {
    const auto [it, inserted] = symbol_ids_.emplace(text, static_cast<SymbolId>(symbols_.size()));
    if (inserted) {
      symbols_.push_back(text);
      symbol_counts_.push_back(0);
    }
    return it->second;
  }

  void add_word(std::uint32_t wi) {
    const Word& w = words_[wi];
    for (const SymbolId s : w.symbols) symbol_counts_[s] += w.freq;
    for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
      const PairId id = make_pair_id(w.symbols[i], w.symbols[i + 1]);
      const std::uint64_t updated = (pair_counts_[id] += w.freq);
      where_[id].push_back(wi);
      if (score_ == PairScore::kFrequency) heap_push(id, updated);
    }
  }

  void remove_word(std::uint32_t wi) {
    const Word& w = words_[wi];
    for (const SymbolId s : w.symbols) symbol_counts_[s] -= w.freq;
    for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
      const PairId id = make_pair_id(w.symbols[i], w.symbols[i + 1]);
      auto it = pair_counts_.find(id);
      it->second -= w.freq;
      const std::uint64_t updated = it->second;
      if (updated == 0) pair_counts_.erase(it);
      if (score_ == PairScore::kFrequency && updated > 0) heap_push(id, updated);
    }
  }

  // true when `a` ranks strictly before `b` among equal scores.
  bool lexicographically_before(PairId a, PairId b) const {
    const auto& al = symbols_[left_of(a)];
    const auto& bl = symbols_[left_of(b)];
    if (al != bl) return al < bl;
    return symbols_[right_of(a)] < symbols_[right_of(b)];
  }

  auto heap_less() const {
    return [this](const HeapEntry& a, const HeapEntry& b) {
      if (a.count != b.count) return a.count < b.count;
      return lexicographically_before(b.id, a.id);
    };
  }

  void heap_push(PairId id, std::uint64_t count) {
    heap_.push_back({count, id});
    std::push_heap(heap_.begin(), heap_.end(), heap_less());
  }

  // Lazy max-heap: entries whose count no longer matches are discarded.
  bool best_by_frequency(std::uint64_t min_count, PairId* best) {
    while (!heap_.empty()) {
      const HeapEntry top = heap_.front();
      if (pair_count(top.id) != top.count) {
        std::pop_heap(heap_.begin(), heap_.end(), heap_less());
        heap_.pop_back();
        continue;
      }
      if (top.count < min_count) return false;
      *best = top.id;
      return true;
    }
    return false;
  }

  // Exact comparison of count(l,r) / (count(l) * count(r)) by cross-multiplying.
  bool best_by_likelihood(std::uint64_t min_count, PairId* best) {
    bool found = false;
    Wide best_num = 0;
    Wide best_den = 1;
    for (const auto& [id, count] : pair_counts_) {
      if (count < min_count) continue;
      const Wide num = count;
      const Wide den =
          static_cast<Wide>(symbol_counts_[left_of(id)]) * symbol_counts_[right_of(id)];
      if (!found) {
        found = true;
        best_num = num;
        best_den = den;
        *best = id;
        continue;
      }
      const Wide lhs = num * best_den;
      const Wide rhs = best_num * den;
      if (lhs > rhs || (lhs == rhs && lexicographically_before(id, *best))) {
        best_num = num;
        best_den = den;
        *best = id;
      }
    }
    return found;
  }

  PairScore score_;
  std::vector<Word> words_;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, SymbolId> symbol_ids_;
  std::vector<std::uint64_t> symbol_counts_;
  std::unordered_map<PairId, std::uint64_t> pair_counts_;
  std::unordered_map<PairId, std::vector<std::uint32_t>> where_;
  std::vector<HeapEntry> heap_;
};

struct MergeResult {
  std::vector<std::string> vocab;
  std::vector<MergePair> merges;
};

MergeResult learn_merges(const WordCounts& corpus, const TrainConfig& config, PairScore score,
                         std::uint64_t min_count) {
  if (corpus.empty()) throw DataError("empty training corpus");
  MergeLearner learner(corpus, score);
  if (config.vocab_size < learner.alphabet_size()) {
    throw ConfigError("vocabulary size " + std::to_string(config.vocab_size) +
                      " is smaller than the corpus alphabet (" +
                      std::to_string(learner.alphabet_size()) + " characters)");
  }
  MergeResult result;
  result.vocab = learner.sorted_alphabet();
  std::unordered_set<std::string> in_vocab(result.vocab.begin(), result.vocab.end());
  PairId best = 0;
  while (result.vocab.size() < config.vocab_size && learner.best_pair(min_count, &best)) {
    result.merges.emplace_back(learner.symbol(left_of(best)), learner.symbol(right_of(best)));
    std::string merged = learner.apply_merge(best);
    if (in_vocab.insert(merged).second) result.vocab.push_back(std::move(merged));
  }
  return result;
}

}  // namespace

TokenizerModel train_bpe(const WordCounts& corpus, const TrainConfig& config) {
  auto learned = learn_merges(corpus, config, PairScore::kFrequency, 2);
  auto model = TokenizerModel::bpe(std::move(learned.vocab), std::move(learned.merges));
  model.requested_vocab_size = config.vocab_size;
  model.seed = config.seed;
  return model;
}

TokenizerModel train_wordpiece(const WordCounts& corpus, const TrainConfig& config) {
  // Any adjacent pair is a candidate; the likelihood score already discounts
  // rare pairs.
  auto learned = learn_merges(corpus, config, PairScore::kLikelihood, 1);
  auto model = TokenizerModel::wordpiece(std::move(learned.vocab), std::move(learned.merges));
  model.requested_vocab_size = config.vocab_size;
  model.seed = config.seed;
  return model;
}

}  // namespace morphalign
