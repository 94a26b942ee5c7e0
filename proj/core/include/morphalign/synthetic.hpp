#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace morphalign {

/// A small agglutinative toy language: nouns inflect for number and case,
/// verbs for tense, person and number, every category with its own suffix.
struct SyntheticLanguageConfig {
  std::uint64_t seed = 20241016;
  std::size_t noun_stems = 26;
  std::size_t verb_stems = 14;
  std::size_t sentences = 6000;
  std::size_t min_sentence_words = 4;
  std::size_t max_sentence_words = 12;
  // Leave the unmarked values (SG, NOM, PRS, 3;SG) without a suffix, as in
  // Hungarian, instead of giving every value its own overt morph.
  bool zero_morphs = false;
};

struct SyntheticLanguage {
  std::string feature_lexicon;       ///< lemma TAB form TAB features
  std::string segmentation_lexicon;  ///< form TAB segments
  std::string corpus;                ///< one sentence per line
  std::size_t stems = 0;
  std::size_t forms = 0;
};

/// Output is a pure function of the config (no std distributions involved).
SyntheticLanguage generate_synthetic_language(const SyntheticLanguageConfig& config);

/// Writes features.tsv, segmentations.tsv and corpus.txt into `directory`.
void write_synthetic_language(const std::string& directory, const SyntheticLanguage& language);

}  // namespace morphalign
