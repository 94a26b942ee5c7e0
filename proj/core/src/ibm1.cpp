#include "morphalign/ibm1.hpp"

#include <cctype>
#include <cmath>
#include <unordered_map>

#include <json.hpp>

#include "morphalign/error.hpp"
#include "morphalign/sweep.hpp"

namespace morphalign {
namespace {

std::string lower_ascii(std::string_view text) {
  std::string out(text);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// The parallel corpus with every token interned and every (given, outcome)
// co-occurrence mapped to a cell of a flat probability array.
class CompiledCorpus {
 public:
  CompiledCorpus(std::span<const ParallelPair> pairs, AlignDirection direction)
      : direction_(direction) {
    for (const auto& pair : pairs) {
      const auto& given = direction == AlignDirection::kSubwordToFeature ? pair.source : pair.target;
      const auto& outcome = direction == AlignDirection::kSubwordToFeature ? pair.target : pair.source;
      if (given.empty() || outcome.empty()) throw DataError("parallel pair with an empty side");
      Sentence s;
      s.given_count = given.size();
      s.outcome_count = outcome.size();
      std::vector<std::uint32_t> given_ids;
      given_ids.reserve(given.size());
      for (const auto& g : given) given_ids.push_back(intern(given_ids_, given_names_, g));
      for (const auto& o : outcome) {
        const std::uint32_t oid = intern(outcome_ids_, outcome_names_, o);
        for (const std::uint32_t gid : given_ids) s.cells.push_back(cell(gid, oid));
      }
      sentences_.push_back(std::move(s));
    }
    probs_.assign(cell_given_.size(), 0.0);
  }

  void set_uniform() {
    std::vector<std::size_t> row_size(given_names_.size(), 0);
    for (const std::uint32_t g : cell_given_) ++row_size[g];
    for (std::size_t c = 0; c < probs_.size(); ++c) {
      probs_[c] = 1.0 / static_cast<double>(row_size[cell_given_[c]]);
    }
  }

  void set_from(const TranslationTable& table) {
    for (std::size_t c = 0; c < probs_.size(); ++c) {
      probs_[c] = table.probability(given_names_[cell_given_[c]], outcome_names_[cell_outcome_[c]]);
    }
  }

  // One EM iteration; returns the log-likelihood under the entering parameters.
  double em_step() {
    std::vector<double> counts(probs_.size(), 0.0);
    double loglik = 0.0;
    for (const auto& s : sentences_) {
      for (std::size_t j = 0; j < s.outcome_count; ++j) {
        const std::uint32_t* row = s.cells.data() + j * s.given_count;
        double z = 0.0;
        for (std::size_t i = 0; i < s.given_count; ++i) z += probs_[row[i]];
        if (!(z > 0.0)) {
          throw NumericalError("IBM1: outcome token '" + outcome_names_[cell_outcome_[row[0]]] +
                               "' has zero probability under every co-occurring token");
        }
        loglik += std::log(z / static_cast<double>(s.given_count));
        for (std::size_t i = 0; i < s.given_count; ++i) counts[row[i]] += probs_[row[i]] / z;
      }
    }
    std::vector<double> totals(given_names_.size(), 0.0);
    for (std::size_t c = 0; c < counts.size(); ++c) totals[cell_given_[c]] += counts[c];
    for (std::size_t c = 0; c < counts.size(); ++c) {
      const double total = totals[cell_given_[c]];
      const double p = total > 0.0 ? counts[c] / total : 0.0;
      probs_[c] = p < kProbabilityFloor ? 0.0 : p;
    }
    // Renormalize rows that lost floored entries.
    std::vector<double> kept(given_names_.size(), 0.0);
    for (std::size_t c = 0; c < probs_.size(); ++c) kept[cell_given_[c]] += probs_[c];
    for (std::size_t c = 0; c < probs_.size(); ++c) {
      const double k = kept[cell_given_[c]];
      if (k > 0.0) probs_[c] /= k;
    }
    return loglik;
  }

  TranslationTable table() const {
    TranslationTable::Rows rows;
    for (std::size_t c = 0; c < probs_.size(); ++c) {
      if (probs_[c] <= 0.0) continue;
      rows[given_names_[cell_given_[c]]][outcome_names_[cell_outcome_[c]]] = probs_[c];
    }
    return TranslationTable(std::move(rows), direction_);
  }

 private:
  struct Sentence {
    std::size_t given_count = 0;
    std::size_t outcome_count = 0;
    std::vector<std::uint32_t> cells;  // outcome-major: cells[j * given_count + i]
  };

  static std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& ids,
                              std::vector<std::string>& names, const std::string& token) {
    const auto [it, inserted] = ids.emplace(token, static_cast<std::uint32_t>(names.size()));
    if (inserted) names.push_back(token);
    return it->second;
  }

  std::uint32_t cell(std::uint32_t given, std::uint32_t outcome) {
    const std::uint64_t key = (static_cast<std::uint64_t>(given) << 32) | outcome;
    const auto [it, inserted] = cell_ids_.emplace(key, static_cast<std::uint32_t>(cell_given_.size()));
    if (inserted) {
      cell_given_.push_back(given);
      cell_outcome_.push_back(outcome);
    }
    return it->second;
  }

  AlignDirection direction_;
  std::vector<Sentence> sentences_;
  std::unordered_map<std::string, std::uint32_t> given_ids_;
  std::unordered_map<std::string, std::uint32_t> outcome_ids_;
  std::vector<std::string> given_names_;
  std::vector<std::string> outcome_names_;
  std::unordered_map<std::uint64_t, std::uint32_t> cell_ids_;
  std::vector<std::uint32_t> cell_given_;
  std::vector<std::uint32_t> cell_outcome_;
  std::vector<double> probs_;
};

}  // namespace

std::string_view to_string(AlignDirection direction) {
  return direction == AlignDirection::kSubwordToFeature ? "subword-to-feature" : "feature-to-subword";
}

AlignDirection parse_align_direction(std::string_view text) {
  const std::string lowered = lower_ascii(text);
  if (lowered == "subword-to-feature" || lowered == "forward") return AlignDirection::kSubwordToFeature;
  if (lowered == "feature-to-subword" || lowered == "reverse") return AlignDirection::kFeatureToSubword;
  throw ConfigError("unknown alignment direction '" + std::string(text) + "'");
}

ParallelCorpus build_parallel_corpus(const CuratedDataset& dataset, const TokenizerModel& model,
                                     FeatureMode mode, const ParallelOptions& options) {
  ParallelCorpus corpus;
  std::unordered_map<std::string, std::optional<std::vector<std::string>>> cache;
  for (std::size_t i = 0; i < dataset.entries.size(); ++i) {
    const WordEntry& entry = dataset.entries[i];
    auto it = cache.find(entry.form());
    if (it == cache.end()) {
      it = cache.emplace(entry.form(), canonical_subwords(model, segment(model, entry.form()))).first;
    }
    if (!it->second) {
      ++corpus.excluded;
      continue;
    }
    ParallelPair pair{*it->second, feature_tokens(entry, mode)};
    if (options.null_token) pair.source.emplace_back(kNullToken);
    corpus.pairs.push_back(std::move(pair));
    corpus.entry_index.push_back(i);
  }
  if (corpus.pairs.empty()) {
    throw DataError("empty parallel corpus: all " + std::to_string(dataset.entries.size()) +
                    " entries are uncoverable by the tokenizer");
  }
  return corpus;
}

TranslationTable::TranslationTable(Rows rows, AlignDirection direction)
    : rows_(std::move(rows)), direction_(direction) {}

double TranslationTable::probability(std::string_view given, std::string_view outcome) const noexcept {
  const auto row_it = rows_.find(given);
  if (row_it == rows_.end()) return 0.0;
  const auto it = row_it->second.find(outcome);
  return it == row_it->second.end() ? 0.0 : it->second;
}

const TranslationTable::Row* TranslationTable::row(std::string_view given) const noexcept {
  const auto it = rows_.find(given);
  return it == rows_.end() ? nullptr : &it->second;
}

std::size_t TranslationTable::size() const noexcept {
  std::size_t n = 0;
  for (const auto& [given, row] : rows_) n += row.size();
  return n;
}

std::vector<std::string> TranslationTable::source_vocab() const {
  std::vector<std::string> out;
  for (const auto& [given, row] : rows_) out.push_back(given);
  return out;
}

std::vector<std::string> TranslationTable::target_vocab() const {
  std::set<std::string> out;
  for (const auto& [given, row] : rows_) {
    for (const auto& [outcome, p] : row) out.insert(outcome);
  }
  return {out.begin(), out.end()};
}

double lookup(const TranslationTable& table, std::string_view subword, std::string_view feature) {
  if (table.direction() == AlignDirection::kSubwordToFeature) return table.probability(subword, feature);
  return table.probability(feature, subword);
}

TranslationTable uniform_table(std::span<const ParallelPair> pairs, AlignDirection direction) {
  CompiledCorpus compiled(pairs, direction);
  compiled.set_uniform();
  return compiled.table();
}

EpochResult em_epoch(std::span<const ParallelPair> pairs, const TranslationTable& table) {
  CompiledCorpus compiled(pairs, table.direction());
  compiled.set_from(table);
  EpochResult result;
  result.loglik = compiled.em_step();
  result.table = compiled.table();
  result.table.epochs_trained = table.epochs_trained + 1;
  result.table.loglik_trajectory = table.loglik_trajectory;
  result.table.loglik_trajectory.push_back(result.loglik);
  return result;
}

TranslationTable train_ibm1(std::span<const ParallelPair> pairs, const Ibm1Options& options) {
  if (pairs.empty()) throw DataError("IBM1 training needs at least one parallel pair");
  if (options.epochs == 0) throw ConfigError("IBM1 epochs must be at least 1");
  CompiledCorpus compiled(pairs, options.direction);
  compiled.set_uniform();
  std::vector<double> trajectory;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) trajectory.push_back(compiled.em_step());
  TranslationTable table = compiled.table();
  table.epochs_trained = options.epochs;
  table.loglik_trajectory = std::move(trajectory);
  return table;
}

std::string serialize_table(const TranslationTable& table) {
  nlohmann::ordered_json doc;
  doc["schema"] = kTableSchema;
  doc["direction"] = to_string(table.direction());
  doc["epochs"] = table.epochs_trained;
  doc["loglik"] = table.loglik_trajectory;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& [given, row] : table.rows()) {
    for (const auto& [outcome, p] : row) entries.push_back({given, outcome, p});
  }
  doc["entries"] = std::move(entries);
  // One entry per line keeps large tables diffable.
  std::string out = "{\n";
  bool first = true;
  for (const auto& [key, value] : doc.items()) {
    if (!first) out += ",\n";
    first = false;
    out += " " + nlohmann::ordered_json(key).dump() + ": ";
    if (key == "entries") {
      out += "[";
      for (std::size_t i = 0; i < value.size(); ++i) {
        out += (i == 0 ? "\n  " : ",\n  ") + value[i].dump();
      }
      out += value.empty() ? "]" : "\n ]";
    } else {
      out += value.dump();
    }
  }
  out += "\n}\n";
  return out;
}

TranslationTable deserialize_table(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("schema").get<std::string>() != kTableSchema) {
      throw DataError("unsupported translation table schema");
    }
    TranslationTable::Rows rows;
    for (const auto& e : doc.at("entries")) {
      rows[e.at(0).get<std::string>()][e.at(1).get<std::string>()] = e.at(2).get<double>();
    }
    TranslationTable table(std::move(rows), parse_align_direction(doc.at("direction").get<std::string>()));
    table.epochs_trained = doc.at("epochs").get<std::size_t>();
    table.loglik_trajectory = doc.at("loglik").get<std::vector<double>>();
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed translation table: ") + e.what());
  }
}

void save_table(const std::string& path, const TranslationTable& table) {
  write_file_atomic(path, serialize_table(table));
}

TranslationTable load_table(const std::string& path) {
  return deserialize_table(read_file(path));
}

}  // namespace morphalign
