#include "morphalign/synthetic.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string_view>
#include <vector>

#include "morphalign/error.hpp"
#include "morphalign/sweep.hpp"

namespace morphalign {
namespace {

struct Affix {
  std::string_view surface;
  std::string_view tag;
  bool unmarked = false;  // dropped when zero morphs are enabled
};

// Hungarian-flavoured nominal paradigm: stem + number + case.
constexpr Affix kNumbers[] = {{"ul", "SG", true}, {"ek", "PL"}};
constexpr Affix kCases[] = {{"on", "NOM", true}, {"et", "ACC"},   {"nak", "DAT"},
                            {"ig", "GEN"},       {"ban", "INE"}, {"vel", "INS"}};
// Verbal paradigm: stem + tense + person/number.
constexpr Affix kTenses[] = {{"ar", "PRS", true}, {"tt", "PST"}, {"and", "FUT"}};
constexpr Affix kPersons[] = {{"ok", "1;SG"},  {"sz", "2;SG"},  {"ja", "3;SG", true},
                              {"unk", "1;PL"}, {"tok", "2;PL"}, {"nek", "3;PL"}};

constexpr std::string_view kOnsets[] = {"p", "t", "k", "m", "n", "s", "l", "r", "h", "j", "f", "d"};
constexpr std::string_view kVowels[] = {"a", "e", "i", "o", "u", "á", "ö"};
constexpr std::string_view kCodas[] = {"", "", "", "r", "l", "m", "s"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // mt19937_64's output sequence is fixed by the standard; the reduction
  // below is ours, so results do not depend on the library's distributions.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct Form {
  std::string lemma;
  std::vector<std::string> segments;
  std::string features;
  double weight = 1.0;
};

std::string make_stem(Rng& rng) {
  const std::size_t syllables = 1 + rng.below(2);
  std::string stem;
  for (std::size_t i = 0; i < syllables; ++i) {
    stem += kOnsets[rng.below(std::size(kOnsets))];
    stem += kVowels[rng.below(std::size(kVowels))];
  }
  stem += kCodas[rng.below(std::size(kCodas))];
  return stem;
}

std::string concat(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += p;
  return out;
}

// Draws an index with probability proportional to `weights`.
std::size_t draw(Rng& rng, const std::vector<double>& cumulative) {
  const double u = rng.unit() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

SyntheticLanguage generate_synthetic_language(const SyntheticLanguageConfig& config) {
  if (config.noun_stems + config.verb_stems == 0) throw ConfigError("synthetic language needs stems");
  if (config.min_sentence_words == 0 || config.max_sentence_words < config.min_sentence_words) {
    throw ConfigError("invalid synthetic sentence length range");
  }
  Rng rng(config.seed);
  const auto add_affix = [&](std::vector<std::string>& segments, const Affix& affix) {
    if (!(config.zero_morphs && affix.unmarked)) segments.emplace_back(affix.surface);
  };
  std::set<std::string> used_stems;
  std::set<std::string> used_forms;
  std::vector<std::vector<Form>> paradigms;

  const auto fresh_stem = [&]() {
    while (true) {
      std::string stem = make_stem(rng);
      if (used_stems.insert(stem).second) return stem;
    }
  };

  const auto add_paradigm = [&](std::vector<Form> forms) {
    for (const auto& f : forms) {
      if (used_forms.contains(concat(f.segments))) return false;
    }
    for (const auto& f : forms) used_forms.insert(concat(f.segments));
    paradigms.push_back(std::move(forms));
    return true;
  };

  for (std::size_t s = 0; s < config.noun_stems;) {
    const std::string stem = fresh_stem();
    std::vector<Form> forms;
    for (const auto& number : kNumbers) {
      for (const auto& kase : kCases) {
        Form f;
        f.lemma = stem;
        f.segments.push_back(stem);
        add_affix(f.segments, number);
        add_affix(f.segments, kase);
        f.features = "N;" + std::string(kase.tag) + ";" + std::string(number.tag);
        // Singular and nominative forms are the most frequent.
        f.weight = (number.tag == "SG" ? 2.0 : 1.0) * (kase.tag == "NOM" ? 2.0 : 1.0);
        forms.push_back(std::move(f));
      }
    }
    if (add_paradigm(std::move(forms))) ++s;
  }
  for (std::size_t s = 0; s < config.verb_stems;) {
    const std::string stem = fresh_stem();
    std::vector<Form> forms;
    for (const auto& tense : kTenses) {
      for (const auto& person : kPersons) {
        Form f;
        f.lemma = stem;
        f.segments.push_back(stem);
        add_affix(f.segments, tense);
        add_affix(f.segments, person);
        f.features = "V;" + std::string(tense.tag) + ";" + std::string(person.tag);
        f.weight = tense.tag == "PRS" ? 2.0 : 1.0;
        forms.push_back(std::move(f));
      }
    }
    if (add_paradigm(std::move(forms))) ++s;
  }

  SyntheticLanguage language;
  language.stems = paradigms.size();
  std::map<std::string, std::string> segmentations;
  for (const auto& paradigm : paradigms) {
    for (const auto& f : paradigm) {
      const std::string form = concat(f.segments);
      language.feature_lexicon += f.lemma + "\t" + form + "\t" + f.features + "\n";
      segmentations.emplace(form, join(f.segments, "|"));
      ++language.forms;
    }
  }
  for (const auto& [form, segments] : segmentations) {
    language.segmentation_lexicon += form + "\t" + segments + "\n";
  }

  // Zipfian lexeme frequencies, paradigm cells by weight.
  std::vector<double> lexeme_cumulative;
  for (std::size_t r = 0; r < paradigms.size(); ++r) {
    const double w = 1.0 / static_cast<double>(r + 1);
    lexeme_cumulative.push_back((lexeme_cumulative.empty() ? 0.0 : lexeme_cumulative.back()) + w);
  }
  // Shuffle which lexeme gets which rank so nouns and verbs interleave.
  std::vector<std::size_t> rank_to_lexeme(paradigms.size());
  for (std::size_t i = 0; i < rank_to_lexeme.size(); ++i) rank_to_lexeme[i] = i;
  for (std::size_t i = rank_to_lexeme.size(); i > 1; --i) {
    std::swap(rank_to_lexeme[i - 1], rank_to_lexeme[rng.below(i)]);
  }
  std::vector<std::vector<double>> cell_cumulative;
  for (const auto& paradigm : paradigms) {
    std::vector<double> cumulative;
    for (const auto& f : paradigm) {
      cumulative.push_back((cumulative.empty() ? 0.0 : cumulative.back()) + f.weight);
    }
    cell_cumulative.push_back(std::move(cumulative));
  }
  const std::size_t span = config.max_sentence_words - config.min_sentence_words + 1;
  for (std::size_t s = 0; s < config.sentences; ++s) {
    const std::size_t words = config.min_sentence_words + rng.below(span);
    for (std::size_t w = 0; w < words; ++w) {
      const std::size_t lexeme = rank_to_lexeme[draw(rng, lexeme_cumulative)];
      const Form& f = paradigms[lexeme][draw(rng, cell_cumulative[lexeme])];
      if (w > 0) language.corpus += ' ';
      language.corpus += concat(f.segments);
    }
    language.corpus += '\n';
  }
  return language;
}

void write_synthetic_language(const std::string& directory, const SyntheticLanguage& language) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create directory '" + directory + "': " + ec.message());
  const std::filesystem::path dir(directory);
  write_file_atomic((dir / "features.tsv").string(), language.feature_lexicon);
  write_file_atomic((dir / "segmentations.tsv").string(), language.segmentation_lexicon);
  write_file_atomic((dir / "corpus.txt").string(), language.corpus);
}

}  // namespace morphalign
