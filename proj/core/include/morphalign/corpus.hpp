#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace morphalign {

/// How a feature bundle is presented to the aligner.
enum class FeatureMode {
  kJoint,  ///< whole bundle ("ADJ;ACC;SG") is one target token
  kSplit,  ///< every atomic tag is its own target token
};

std::string_view to_string(FeatureMode mode);
/// Accepts "joint" / "split" (case-insensitive). Throws ConfigError otherwise.
FeatureMode parse_feature_mode(std::string_view text);

/// One curated row: a surface form, its gold morph segmentation and one
/// morpho-syntactic analysis.
///
/// Construction validates the invariants: segments are non-empty and
/// concatenate to the form, features are non-empty atoms without ';'.
class WordEntry {
 public:
  WordEntry(std::string form, std::vector<std::string> gold_segments,
            std::vector<std::string> features);

  const std::string& form() const noexcept { return form_; }
  const std::vector<std::string>& gold_segments() const noexcept { return gold_segments_; }
  const std::vector<std::string>& features() const noexcept { return features_; }

  friend bool operator==(const WordEntry&, const WordEntry&) = default;

 private:
  std::string form_;
  std::vector<std::string> gold_segments_;
  std::vector<std::string> features_;
};

struct CuratedDataset {
  std::vector<WordEntry> entries;
  std::string language;
  std::vector<std::string> source_meta;
};

struct FeatureRow {
  std::string form;
  std::string bundle;  ///< ';'-joined tags, NFC-normalized

  friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

struct FeatureLexicon {
  std::vector<FeatureRow> rows;
  std::size_t skipped_lines = 0;   ///< fewer than three columns
  std::size_t empty_bundles = 0;   ///< third column empty or with empty tags
};

struct SegmentationLexicon {
  std::map<std::string, std::vector<std::string>> segments;
  std::size_t duplicate_forms = 0;  ///< later rows for an already seen form
  std::size_t malformed_rows = 0;   ///< wrong column count or concatenation mismatch
};

struct CurationStats {
  std::size_t feature_rows = 0;
  std::size_t matched = 0;
  std::size_t dropped = 0;  ///< feature rows whose form has no segmentation
};

/// Reads UniMorph-style TSV: lemma TAB form TAB features. '#' lines are comments.
FeatureLexicon parse_feature_lexicon(std::istream& in);

/// Reads the flattened segmentation TSV: form TAB '|'-joined segments.
SegmentationLexicon parse_segmentation_lexicon(std::istream& in);

/// Joins feature rows with segmentations on the exact (normalized) form.
/// Throws DataError("empty join") if no row survives.
CuratedDataset curate(const SegmentationLexicon& segmentations,
                      const FeatureLexicon& features,
                      CurationStats* stats = nullptr);

std::vector<std::string> feature_tokens(const WordEntry& entry, FeatureMode mode);

/// Curated TSV: form TAB '|'-joined segments TAB ';'-joined features.
void write_curated(std::ostream& out, const CuratedDataset& dataset);
CuratedDataset read_curated(std::istream& in, std::string language = {});

CuratedDataset load_curated(const std::string& path, std::string language = {});
void save_curated(const std::string& path, const CuratedDataset& dataset);

/// Splits on a single-character separator, keeping empty fields.
std::vector<std::string> split(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace morphalign
