#pragma once

#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "morphalign/corpus.hpp"
#include "morphalign/ibm1.hpp"
#include "morphalign/tokenizers.hpp"
#include "oracles.hpp"

namespace fixtures {

namespace ma = morphalign;

inline std::vector<ma::ParallelPair> to_pairs(const std::vector<oracle::Pair>& in) {
  std::vector<ma::ParallelPair> out;
  for (const auto& p : in) out.push_back({p.src, p.tgt});
  return out;
}

// Small IBM1 corpora: at most 5 pairs over at most 4 types per side.
inline std::vector<std::vector<oracle::Pair>> ibm1_corpora() {
  return {
      {{{"s1"}, {"f1"}}},
      {{{"a", "b"}, {"X", "Y"}}, {{"a"}, {"X"}}},
      {{{"a", "b"}, {"X", "Y"}}, {{"a", "c"}, {"X", "Z"}}, {{"b", "c"}, {"Y", "Z"}}},
      {{{"la", "maison"}, {"the", "house"}},
       {{"la", "fleur"}, {"the", "flower"}},
       {{"maison"}, {"house"}},
       {{"la", "la", "fleur"}, {"the", "flower", "the"}}},
      {{{"a", "b", "c", "d"}, {"W", "X"}},
       {{"a", "b"}, {"W", "Y", "Z"}},
       {{"c"}, {"X", "X"}},
       {{"d", "a"}, {"Z"}},
       {{"b", "d"}, {"Y", "W"}}},
  };
}

// Random corpora drawn from tiny vocabularies so that tokens co-occur a lot.
inline std::vector<oracle::Pair> random_corpus(std::mt19937_64& rng, std::size_t max_pairs = 8,
                                               std::size_t src_types = 5, std::size_t tgt_types = 5) {
  const auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  std::vector<oracle::Pair> out(1 + pick(max_pairs));
  for (auto& p : out) {
    const std::size_t ns = 1 + pick(4);
    const std::size_t nt = 1 + pick(4);
    for (std::size_t i = 0; i < ns; ++i) p.src.push_back("s" + std::to_string(pick(src_types)));
    for (std::size_t i = 0; i < nt; ++i) p.tgt.push_back("F" + std::to_string(pick(tgt_types)));
  }
  return out;
}

// Words over a small alphabet that includes multi-byte characters.
inline std::string random_word(std::mt19937_64& rng, std::size_t min_len = 1, std::size_t max_len = 10) {
  static const std::vector<std::string> letters = {"a", "b", "c", "d", "e", "á", "ž", "ý", "ň", "o"};
  const std::size_t len = min_len + static_cast<std::size_t>(rng() % (max_len - min_len + 1));
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += letters[rng() % letters.size()];
  return w;
}

inline ma::WordCounts random_word_counts(std::mt19937_64& rng, std::size_t types,
                                         std::size_t max_len = 8) {
  ma::WordCounts counts;
  while (counts.size() < types) counts[random_word(rng, 1, max_len)] += 1 + rng() % 20;
  return counts;
}

// A random gold-segmented dataset: each word is a concatenation of random segments.
inline ma::CuratedDataset random_dataset(std::mt19937_64& rng, std::size_t words) {
  ma::CuratedDataset d;
  d.language = "fz";
  static const std::vector<std::string> tags = {"N", "V", "SG", "PL", "NOM", "ACC", "PST", "1"};
  std::set<std::string> seen;  // curated forms are unique
  for (std::size_t i = 0; i < words; ++i) {
    std::vector<std::string> segs;
    const std::size_t n = 1 + rng() % 4;
    std::string form;
    for (std::size_t k = 0; k < n; ++k) {
      segs.push_back(random_word(rng, 1, 4));
      form += segs.back();
    }
    std::vector<std::string> feats;
    const std::size_t nf = 1 + rng() % 4;
    for (std::size_t k = 0; k < nf; ++k) feats.push_back(tags[rng() % tags.size()]);
    if (!seen.insert(form).second) continue;
    d.entries.emplace_back(form, segs, feats);
  }
  return d;
}

// Czech and Dutch words with gold segments and UniMorph-style
// feature bundles.
inline ma::CuratedDataset table1_dataset() {
  ma::CuratedDataset d;
  d.language = "t1";
  d.entries.emplace_back("rýžový", std::vector<std::string>{"rýž", "ov", "ý"},
                         std::vector<std::string>{"ADJ", "ACC", "MASC", "INAN", "SG"});
  d.entries.emplace_back("bázeň", std::vector<std::string>{"báz", "eň"},
                         std::vector<std::string>{"N", "ACC", "SG", "FEM"});
  d.entries.emplace_back("projet", std::vector<std::string>{"pro", "je", "t"},
                         std::vector<std::string>{"V", "NFIN"});
  return d;
}

inline ma::TokenizerModel gold_model(const ma::CuratedDataset& d) {
  std::map<std::string, std::vector<std::string>> gold;
  for (const auto& e : d.entries) gold.emplace(e.form(), e.gold_segments());
  return ma::TokenizerModel::gold(std::move(gold));
}

// Five words with a hand-built table. Some probabilities sit exactly on the
// 0.3 and 0.5 thresholds to exercise the strict comparison.
inline std::vector<oracle::Pair> eq1_words() {
  return {
      {{"rýž", "ov", "ý"}, {"ADJ", "ACC", "MASC", "INAN", "SG"}},
      {{"báz", "eň"}, {"N", "ACC", "SG", "FEM"}},
      {{"pro", "je", "t"}, {"V", "NFIN"}},
      {{"ov", "eň"}, {"N", "SG"}},
      {{"unseen"}, {"N"}},
  };
}

inline oracle::Table eq1_table() {
  return {
      {"rýž", {{"ADJ", 0.62}, {"MASC", 0.2}, {"INAN", 0.18}}},
      {"ov", {{"ACC", 0.5}, {"MASC", 0.3}, {"SG", 0.195}, {"N", 0.005}}},
      {"ý", {{"SG", 0.45}, {"ACC", 0.35}, {"INAN", 0.2}}},
      {"báz", {{"N", 0.9}, {"FEM", 0.1}}},
      {"eň", {{"FEM", 0.51}, {"SG", 0.3}, {"ACC", 0.009}, {"N", 0.181}}},
      {"pro", {{"V", 0.7}, {"NFIN", 0.3}}},
      {"je", {{"V", 0.25}, {"NFIN", 0.25}, {"SG", 0.5}}},
      {"t", {{"NFIN", 0.999}, {"V", 0.001}}},
  };
}

inline ma::TranslationTable to_table(const oracle::Table& t) {
  ma::TranslationTable::Rows rows;
  for (const auto& [s, row] : t)
    for (const auto& [f, p] : row) rows[s][f] = p;
  return ma::TranslationTable(std::move(rows), ma::AlignDirection::kSubwordToFeature);
}

inline ma::ParallelCorpus to_corpus(const std::vector<oracle::Pair>& words) {
  ma::ParallelCorpus c;
  c.pairs = to_pairs(words);
  for (std::size_t i = 0; i < words.size(); ++i) c.entry_index.push_back(i);
  return c;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("morphalign-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
