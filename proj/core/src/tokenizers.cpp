#include "morphalign/tokenizers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>

#include "internal.hpp"
#include "morphalign/error.hpp"
#include "morphalign/unicode.hpp"

namespace morphalign {
namespace detail {

CharSpans char_spans(std::string_view utf8) {
  CharSpans spans;
  spans.text = std::string(utf8);
  spans.offsets.push_back(0);
  for (const auto& cp : unicode::code_points(utf8)) {
    spans.offsets.push_back(spans.offsets.back() + cp.size());
  }
  return spans;
}

ViterbiPath viterbi(const CharSpans& word, const LogProbIndex& logprob,
                    std::size_t max_piece_chars, double oov_logprob, std::string_view excluded) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const std::size_t n = word.size();
  std::vector<double> best(n + 1, kNegInf);
  std::vector<std::size_t> back(n + 1, 0);
  std::vector<std::size_t> oov(n + 1, 0);
  best[0] = 0.0;
  for (std::size_t end = 1; end <= n; ++end) {
    const std::size_t longest = std::min(end, max_piece_chars);
    // Longer pieces are tried first; a later candidate must be strictly better.
    for (std::size_t len = longest; len >= 1; --len) {
      const std::size_t begin = end - len;
      if (best[begin] == kNegInf) continue;
      const std::string_view piece = word.piece(begin, end);
      double score = kNegInf;
      std::size_t extra_oov = 0;
      if (piece != excluded) {
        if (const auto it = logprob.find(piece); it != logprob.end()) score = it->second;
      }
      if (score == kNegInf && len == 1 && !logprob.contains(piece)) {
        score = oov_logprob;
        extra_oov = 1;
      }
      if (score == kNegInf) continue;
      const double total = best[begin] + score;
      if (total > best[end]) {
        best[end] = total;
        back[end] = begin;
        oov[end] = oov[begin] + extra_oov;
      }
    }
  }
  ViterbiPath path;
  path.logprob = best[n];
  path.oov_characters = oov[n];
  if (best[n] == kNegInf) return path;
  for (std::size_t pos = n; pos > 0; pos = back[pos]) path.boundaries.push_back(pos);
  path.boundaries.push_back(0);
  std::reverse(path.boundaries.begin(), path.boundaries.end());
  return path;
}

}  // namespace detail

namespace {

std::string lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string pair_key(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key.append(left);
  key.push_back(' ');
  key.append(right);
  return key;
}

}  // namespace

std::string_view to_string(TokenizerKind kind) {
  switch (kind) {
    case TokenizerKind::kBpe: return "bpe";
    case TokenizerKind::kWordPiece: return "wordpiece";
    case TokenizerKind::kUnigram: return "unigram";
    case TokenizerKind::kCharacter: return "character";
    case TokenizerKind::kGoldLookup: return "gold";
  }
  return "unknown";
}

TokenizerKind parse_tokenizer_kind(std::string_view text) {
  const std::string lowered = lower_ascii(text);
  if (lowered == "bpe") return TokenizerKind::kBpe;
  if (lowered == "wordpiece") return TokenizerKind::kWordPiece;
  if (lowered == "unigram") return TokenizerKind::kUnigram;
  if (lowered == "character" || lowered == "char") return TokenizerKind::kCharacter;
  if (lowered == "gold") return TokenizerKind::kGoldLookup;
  throw ConfigError("unknown tokenizer kind '" + std::string(text) + "'");
}

bool is_baseline(TokenizerKind kind) noexcept {
  return kind == TokenizerKind::kCharacter || kind == TokenizerKind::kGoldLookup;
}

WordCounts count_words(std::istream& in) {
  WordCounts counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      if (end > pos) {
        const std::string_view raw(line.data() + pos, end - pos);
        if (!unicode::is_valid_utf8(raw)) {
          throw DataError("invalid UTF-8 in training corpus line " + std::to_string(line_no));
        }
        ++counts[unicode::nfc(raw)];
      }
      pos = end;
    }
  }
  if (in.bad()) throw IoError("read error in training corpus");
  return counts;
}

WordCounts count_words_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open training corpus '" + path + "'");
  return count_words(in);
}

std::set<std::string> alphabet(const WordCounts& corpus) {
  std::set<std::string> chars;
  for (const auto& [word, count] : corpus) {
    for (auto& cp : unicode::code_points(word)) chars.insert(std::move(cp));
  }
  return chars;
}

// --- TokenizerModel ---------------------------------------------------------

TokenizerModel TokenizerModel::bpe(std::vector<std::string> vocab, std::vector<MergePair> merges) {
  TokenizerModel model;
  model.kind_ = TokenizerKind::kBpe;
  model.vocab_ = std::move(vocab);
  model.merges_ = std::move(merges);
  model.build_index();
  return model;
}

TokenizerModel TokenizerModel::wordpiece(std::vector<std::string> vocab,
                                         std::vector<MergePair> merges) {
  TokenizerModel model;
  model.kind_ = TokenizerKind::kWordPiece;
  model.vocab_ = std::move(vocab);
  model.merges_ = std::move(merges);
  model.build_index();
  return model;
}

TokenizerModel TokenizerModel::unigram(std::vector<std::string> vocab,
                                       std::map<std::string, double> logprob) {
  TokenizerModel model;
  model.kind_ = TokenizerKind::kUnigram;
  model.vocab_ = std::move(vocab);
  model.token_logprob_ = std::move(logprob);
  for (const auto& token : model.vocab_) {
    const auto it = model.token_logprob_.find(token);
    if (it == model.token_logprob_.end() || !std::isfinite(it->second)) {
      throw DataError("unigram token '" + token + "' lacks a finite log-probability");
    }
  }
  if (model.token_logprob_.size() != model.vocab_.size()) {
    throw DataError("unigram log-probability table does not match the vocabulary");
  }
  model.build_index();
  return model;
}

TokenizerModel TokenizerModel::character() {
  TokenizerModel model;
  model.kind_ = TokenizerKind::kCharacter;
  return model;
}

TokenizerModel TokenizerModel::gold(std::map<std::string, std::vector<std::string>> gold_map) {
  TokenizerModel model;
  model.kind_ = TokenizerKind::kGoldLookup;
  model.gold_map_ = std::move(gold_map);
  return model;
}

std::string_view TokenizerModel::continuation_marker() const noexcept {
  return kind_ == TokenizerKind::kWordPiece ? kContinuationMarker : std::string_view{};
}

void TokenizerModel::build_index() {
  vocab_set_.clear();
  max_token_chars_ = 1;
  for (const auto& token : vocab_) {
    vocab_set_.insert(token);
    max_token_chars_ = std::max(max_token_chars_, unicode::length(token));
  }
  merge_rank_.clear();
  for (std::size_t i = 0; i < merges_.size(); ++i) {
    merge_rank_.emplace(pair_key(merges_[i].first, merges_[i].second), i);
  }
  logprob_index_.clear();
  double min_logprob = 0.0;
  for (const auto& [token, lp] : token_logprob_) {
    logprob_index_.emplace(token, lp);
    min_logprob = std::min(min_logprob, lp);
  }
  // Unseen characters must never beat an in-vocabulary alternative.
  oov_logprob_ = min_logprob - 10.0;
}

Segmentation TokenizerModel::segment_detailed(std::string_view word) const {
  if (word.empty()) throw DataError("cannot segment an empty word");
  const std::string normalized = unicode::nfc(word);
  switch (kind_) {
    case TokenizerKind::kCharacter:
      return Segmentation{unicode::code_points(normalized), 0, false};
    case TokenizerKind::kGoldLookup: {
      const auto it = gold_map_.find(normalized);
      if (it == gold_map_.end()) {
        throw DataError("gold segmentation has no entry for '" + normalized + "'");
      }
      return Segmentation{it->second, 0, false};
    }
    case TokenizerKind::kBpe:
      return segment_bpe(unicode::code_points(normalized));
    case TokenizerKind::kWordPiece:
      return segment_wordpiece(unicode::code_points(normalized));
    case TokenizerKind::kUnigram:
      return segment_unigram(unicode::code_points(normalized));
  }
  throw DataError("unsupported tokenizer kind");
}

Segmentation TokenizerModel::segment_bpe(const std::vector<std::string>& chars) const {
  Segmentation result;
  for (const auto& c : chars) {
    if (!vocab_set_.contains(c)) ++result.oov_characters;
  }
  std::vector<std::string> symbols = chars;
  // Replays the merge list in order: at every step the earliest merge not yet
  // applied that has an occurrence is applied to all its occurrences.
  std::size_t next_rank = 0;
  while (symbols.size() > 1) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      const auto it = merge_rank_.find(pair_key(symbols[i], symbols[i + 1]));
      if (it != merge_rank_.end() && it->second >= next_rank && it->second < best_rank) {
        best_rank = it->second;
      }
    }
    if (best_rank == std::numeric_limits<std::size_t>::max()) break;
    const auto& [left, right] = merges_[best_rank];
    std::vector<std::string> merged;
    merged.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
        merged.push_back(left + right);
        ++i;
      } else {
        merged.push_back(std::move(symbols[i]));
      }
    }
    symbols = std::move(merged);
    next_rank = best_rank + 1;
  }
  result.tokens = std::move(symbols);
  return result;
}

Segmentation TokenizerModel::segment_wordpiece(const std::vector<std::string>& chars) const {
  Segmentation result;
  std::size_t pos = 0;
  while (pos < chars.size()) {
    std::size_t end = std::min(chars.size(), pos + max_token_chars_);
    std::string match;
    for (; end > pos; --end) {
      std::string candidate;
      for (std::size_t i = pos; i < end; ++i) candidate += chars[i];
      if (vocab_set_.contains(candidate)) {
        match = std::move(candidate);
        break;
      }
    }
    if (end == pos) {
      result.tokens.emplace_back(kUnknownToken);
      result.has_unknown = true;
      return result;
    }
    result.tokens.push_back(pos == 0 ? match : std::string(kContinuationMarker) + match);
    pos = end;
  }
  return result;
}

Segmentation TokenizerModel::segment_unigram(const std::vector<std::string>& chars) const {
  std::string joined;
  for (const auto& c : chars) joined += c;
  const auto spans = detail::char_spans(joined);
  const auto path = detail::viterbi(spans, logprob_index_, max_token_chars_, oov_logprob_);
  Segmentation result;
  result.oov_characters = path.oov_characters;
  for (std::size_t i = 0; i + 1 < path.boundaries.size(); ++i) {
    result.tokens.emplace_back(spans.piece(path.boundaries[i], path.boundaries[i + 1]));
  }
  return result;
}

std::vector<std::string> segment(const TokenizerModel& model, std::string_view word) {
  return model.segment_detailed(word).tokens;
}

std::optional<std::vector<std::string>> canonical_subwords(const TokenizerModel& model,
                                                           const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  const std::string_view marker = model.continuation_marker();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& token = tokens[i];
    if (token == kUnknownToken) return std::nullopt;
    if (i > 0 && !marker.empty() && token.starts_with(marker) && token.size() > marker.size()) {
      out.push_back(token.substr(marker.size()));
    } else {
      out.push_back(token);
    }
  }
  return out;
}

TokenizerModel train_tokenizer(const WordCounts& corpus, const TrainConfig& config) {
  switch (config.kind) {
    case TokenizerKind::kBpe: return train_bpe(corpus, config);
    case TokenizerKind::kWordPiece: return train_wordpiece(corpus, config);
    case TokenizerKind::kUnigram: return train_unigram(corpus, config);
    case TokenizerKind::kCharacter:
    case TokenizerKind::kGoldLookup:
      break;
  }
  throw ConfigError("tokenizer kind '" + std::string(to_string(config.kind)) +
                    "' is a baseline and is not trained");
}

}  // namespace morphalign
