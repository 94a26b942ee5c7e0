#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "morphalign/tokenizers.hpp"

namespace morphalign::detail {


/// A word as UTF-8 bytes plus the byte offset of every code point boundary
/// (size n + 1 for n code points).
struct CharSpans {
  std::string text;
  std::vector<std::size_t> offsets;

  std::size_t size() const noexcept { return offsets.size() - 1; }
  std::string_view piece(std::size_t begin, std::size_t end) const noexcept {
    return std::string_view(text).substr(offsets[begin], offsets[end] - offsets[begin]);
  }
};

CharSpans char_spans(std::string_view utf8);

struct ViterbiPath {
  double logprob = 0.0;
  /// Code point boundaries of the chosen pieces: 0 = b0 < b1 < ... < bk = n.
  std::vector<std::size_t> boundaries;
  std::size_t oov_characters = 0;
};

/// Best segmentation under `logprob`. Pieces longer than `max_piece_chars`
/// are not considered; `excluded` (when non-empty) is treated as absent. A
/// single character missing from the index is still usable at `oov_logprob`.
ViterbiPath viterbi(const CharSpans& word, const LogProbIndex& logprob,
                    std::size_t max_piece_chars, double oov_logprob,
                    std::string_view excluded = {});

}  // namespace morphalign::detail
