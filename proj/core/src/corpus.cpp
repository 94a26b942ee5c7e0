#include "morphalign/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include "morphalign/error.hpp"
#include "morphalign/unicode.hpp"

namespace morphalign {
namespace {

std::string lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank_or_comment(std::string_view line) {
  const auto first = line.find_first_not_of(" \t");
  return first == std::string_view::npos || line[first] == '#';
}

void check_stream(const std::istream& in, std::string_view what) {
  if (in.bad()) throw IoError("read error in " + std::string(what));
}

// Splits a ';' bundle into atoms; returns nullopt-like empty vector when any
// atom is empty.
std::vector<std::string> bundle_atoms(std::string_view bundle) {
  auto atoms = split(bundle, ';');
  for (const auto& atom : atoms) {
    if (atom.empty()) return {};
  }
  return atoms;
}

}  // namespace

std::string_view to_string(FeatureMode mode) {
  return mode == FeatureMode::kJoint ? "joint" : "split";
}

FeatureMode parse_feature_mode(std::string_view text) {
  const std::string lowered = lower_ascii(text);
  if (lowered == "joint") return FeatureMode::kJoint;
  if (lowered == "split") return FeatureMode::kSplit;
  throw ConfigError("unknown feature mode '" + std::string(text) + "' (expected joint or split)");
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      return out;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

WordEntry::WordEntry(std::string form, std::vector<std::string> gold_segments,
                     std::vector<std::string> features)
    : form_(std::move(form)),
      gold_segments_(std::move(gold_segments)),
      features_(std::move(features)) {
  if (form_.empty()) throw DataError("word entry with empty form");
  if (gold_segments_.empty()) throw DataError("word entry '" + form_ + "' has no segments");
  std::string concat;
  for (const auto& segment : gold_segments_) {
    if (segment.empty()) throw DataError("word entry '" + form_ + "' has an empty segment");
    concat += segment;
  }
  if (concat != form_) {
    throw DataError("segments of '" + form_ + "' concatenate to '" + concat + "'");
  }
  if (features_.empty()) throw DataError("word entry '" + form_ + "' has no features");
  for (const auto& feature : features_) {
    if (feature.empty() || feature.find(';') != std::string::npos) {
      throw DataError("word entry '" + form_ + "' has invalid feature '" + feature + "'");
    }
  }
}

FeatureLexicon parse_feature_lexicon(std::istream& in) {
  FeatureLexicon lexicon;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (is_blank_or_comment(line)) continue;
    const auto columns = split(line, '\t');
    if (columns.size() < 3 || columns[1].empty()) {
      ++lexicon.skipped_lines;
      continue;
    }
    if (bundle_atoms(columns[2]).empty()) {
      ++lexicon.empty_bundles;
      continue;
    }
    if (!unicode::is_valid_utf8(columns[1]) || !unicode::is_valid_utf8(columns[2])) {
      ++lexicon.skipped_lines;
      continue;
    }
    lexicon.rows.push_back({unicode::nfc(columns[1]), unicode::nfc(columns[2])});
  }
  check_stream(in, "feature lexicon");
  return lexicon;
}

SegmentationLexicon parse_segmentation_lexicon(std::istream& in) {
  SegmentationLexicon lexicon;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (is_blank_or_comment(line)) continue;
    const auto columns = split(line, '\t');
    if (columns.size() < 2 || columns[0].empty() || !unicode::is_valid_utf8(line)) {
      ++lexicon.malformed_rows;
      continue;
    }
    const std::string form = unicode::nfc(columns[0]);
    std::vector<std::string> segments;
    std::string concat;
    bool ok = true;
    for (const auto& raw : split(columns[1], '|')) {
      if (raw.empty()) {
        ok = false;
        break;
      }
      segments.push_back(unicode::nfc(raw));
      concat += segments.back();
    }
    if (!ok || concat != form) {
      ++lexicon.malformed_rows;
      continue;
    }
    if (!lexicon.segments.emplace(form, std::move(segments)).second) ++lexicon.duplicate_forms;
  }
  check_stream(in, "segmentation lexicon");
  return lexicon;
}

CuratedDataset curate(const SegmentationLexicon& segmentations, const FeatureLexicon& features,
                      CurationStats* stats) {
  CuratedDataset dataset;
  CurationStats local;
  local.feature_rows = features.rows.size();
  for (const auto& row : features.rows) {
    const auto it = segmentations.segments.find(row.form);
    if (it == segmentations.segments.end()) {
      ++local.dropped;
      continue;
    }
    dataset.entries.emplace_back(row.form, it->second, split(row.bundle, ';'));
    ++local.matched;
  }
  if (stats != nullptr) *stats = local;
  if (dataset.entries.empty()) {
    throw DataError("empty join: none of the " + std::to_string(local.feature_rows) +
                    " feature rows has a segmentation");
  }
  return dataset;
}

std::vector<std::string> feature_tokens(const WordEntry& entry, FeatureMode mode) {
  if (mode == FeatureMode::kJoint) return {join(entry.features(), ";")};
  return entry.features();
}

void write_curated(std::ostream& out, const CuratedDataset& dataset) {
  for (const auto& entry : dataset.entries) {
    out << entry.form() << '\t' << join(entry.gold_segments(), "|") << '\t'
        << join(entry.features(), ";") << '\n';
  }
}

CuratedDataset read_curated(std::istream& in, std::string language) {
  CuratedDataset dataset;
  dataset.language = std::move(language);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank_or_comment(line)) continue;
    const auto columns = split(line, '\t');
    if (columns.size() != 3) {
      throw DataError("curated dataset line " + std::to_string(line_no) + ": expected 3 columns");
    }
    try {
      dataset.entries.emplace_back(unicode::nfc(columns[0]), split(unicode::nfc(columns[1]), '|'),
                                   split(unicode::nfc(columns[2]), ';'));
    } catch (const DataError& e) {
      throw DataError("curated dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  check_stream(in, "curated dataset");
  if (dataset.entries.empty()) throw DataError("curated dataset is empty");
  return dataset;
}

CuratedDataset load_curated(const std::string& path, std::string language) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open curated dataset '" + path + "'");
  auto dataset = read_curated(in, std::move(language));
  dataset.source_meta.push_back(path);
  return dataset;
}

void save_curated(const std::string& path, const CuratedDataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_curated(out, dataset);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace morphalign
