#include "morphalign/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "morphalign/error.hpp"

namespace fs = std::filesystem;

namespace morphalign {

std::vector<std::size_t> default_vocab_sizes() {
  return {2000, 4000, 8000, 16000, 24000, 32000, 40000, 48000, 56000, 64000, 72000, 80000};
}

std::vector<double> default_thresholds() {
  // 0.01 + k * 0.049 for k = 0..10, written out to avoid accumulated rounding.
  return {0.01, 0.059, 0.108, 0.157, 0.206, 0.255, 0.304, 0.353, 0.402, 0.451, 0.5};
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory for '" + path + "': " + ec.message());
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for '" + tmp + "'");
  }
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read error in '" + path + "'");
  return buffer.str();
}

Evaluation evaluate(const CuratedDataset& dataset, const TokenizerModel& model,
                    const EvaluateOptions& options) {
  if (options.aggregations.empty() || options.thresholds.empty()) {
    throw ConfigError("evaluate needs at least one aggregation and one threshold");
  }
  const ParallelCorpus corpus =
      build_parallel_corpus(dataset, model, options.mode, ParallelOptions{options.null_token});
  Evaluation result;
  result.table = train_ibm1(corpus.pairs, Ibm1Options{options.epochs, options.direction});
  result.boundary = boundary_prf(dataset, model);
  const std::size_t vocab_size = is_baseline(model.kind()) ? 0 : model.requested_vocab_size;
  for (const auto aggregation : options.aggregations) {
    for (const double threshold : options.thresholds) {
      ScoreRow row;
      row.language = options.language;
      row.kind = model.kind();
      row.vocab_size = vocab_size;
      row.mode = options.mode;
      row.aggregation = aggregation;
      row.threshold = threshold;
      row.alignment_score = alignment_score(result.table, corpus, aggregation, threshold);
      row.precision = result.boundary.precision;
      row.recall = result.boundary.recall;
      row.f1 = result.boundary.f1;
      row.excluded_count = corpus.excluded;
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

// --- configuration ----------------------------------------------------------

void SweepConfig::validate(bool check_paths) const {
  if (languages.empty()) throw ConfigError("sweep config: no languages");
  if (kinds.empty()) throw ConfigError("sweep config: no tokenizer kinds");
  if (modes.empty()) throw ConfigError("sweep config: no feature modes");
  if (aggregations.empty()) throw ConfigError("sweep config: no aggregations");
  if (thresholds.empty()) throw ConfigError("sweep config: no thresholds");
  if (epochs == 0) throw ConfigError("sweep config: epochs must be at least 1");
  if (workers == 0) throw ConfigError("sweep config: workers must be at least 1");
  const bool needs_sizes = std::any_of(kinds.begin(), kinds.end(),
                                       [](TokenizerKind k) { return !is_baseline(k); });
  if (needs_sizes && vocab_sizes.empty()) throw ConfigError("sweep config: no vocabulary sizes");
  for (const auto size : vocab_sizes) {
    if (size == 0) throw ConfigError("sweep config: vocabulary sizes must be positive");
  }
  for (const double t : thresholds) {
    if (!(t >= 0.0 && t < 1.0)) throw ConfigError("sweep config: thresholds must lie in [0, 1)");
  }
  std::set<std::string> codes;
  for (const auto& lang : languages) {
    if (lang.code.empty() || lang.code.find_first_of("/\\ \t") != std::string::npos) {
      throw ConfigError("sweep config: invalid language code '" + lang.code + "'");
    }
    if (!codes.insert(lang.code).second) {
      throw ConfigError("sweep config: duplicate language '" + lang.code + "'");
    }
    if (!check_paths) continue;
    for (const auto* path : {&lang.feature_lexicon, &lang.segmentation_lexicon, &lang.corpus}) {
      if (!fs::exists(*path)) {
        throw ConfigError("sweep config: language '" + lang.code + "': missing file '" + *path + "'");
      }
    }
  }
}

SweepConfig parse_sweep_config(std::string_view json_text, const std::string& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("sweep config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("sweep config must be a JSON object");
  const auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path.string() : (fs::path(base_dir) / path).lexically_normal().string();
  };
  static const std::set<std::string> known = {
      "languages", "kinds",  "vocab_sizes", "modes",   "aggregations", "thresholds",
      "epochs",    "seed",   "output_dir",  "workers", "null_token"};
  SweepConfig config;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (!known.contains(key)) throw ConfigError("sweep config: unknown key '" + key + "'");
    }
    if (doc.contains("languages")) {
      for (const auto& lang : doc.at("languages")) {
        LanguageInputs in;
        in.code = lang.at("code").get<std::string>();
        in.feature_lexicon = resolve(lang.at("features").get<std::string>());
        in.segmentation_lexicon = resolve(lang.at("segmentations").get<std::string>());
        in.corpus = resolve(lang.at("corpus").get<std::string>());
        config.languages.push_back(std::move(in));
      }
    }
    if (doc.contains("kinds")) {
      config.kinds.clear();
      for (const auto& k : doc.at("kinds")) config.kinds.push_back(parse_tokenizer_kind(k.get<std::string>()));
    }
    if (doc.contains("vocab_sizes")) config.vocab_sizes = doc.at("vocab_sizes").get<std::vector<std::size_t>>();
    if (doc.contains("modes")) {
      config.modes.clear();
      for (const auto& m : doc.at("modes")) config.modes.push_back(parse_feature_mode(m.get<std::string>()));
    }
    if (doc.contains("aggregations")) {
      config.aggregations.clear();
      for (const auto& a : doc.at("aggregations")) config.aggregations.push_back(parse_aggregation(a.get<std::string>()));
    }
    if (doc.contains("thresholds")) config.thresholds = doc.at("thresholds").get<std::vector<double>>();
    if (doc.contains("epochs")) config.epochs = doc.at("epochs").get<std::size_t>();
    if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("output_dir")) config.output_dir = resolve(doc.at("output_dir").get<std::string>());
    if (doc.contains("workers")) config.workers = doc.at("workers").get<std::size_t>();
    if (doc.contains("null_token")) config.null_token = doc.at("null_token").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sweep config: ") + e.what());
  }
  return config;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  const fs::path parent = fs::path(path).parent_path();
  return parse_sweep_config(text, parent.empty() ? "." : parent.string());
}

// --- sweep ------------------------------------------------------------------

namespace {

struct LanguageData {
  CuratedDataset dataset;
  WordCounts corpus;
  fs::path dir;
};

struct Job {
  std::size_t language = 0;
  GridPoint point;
};

struct JobOutcome {
  std::vector<ScoreRow> rows;
  bool reused = false;
  std::optional<std::string> error;
};

std::string seed_comment(const SweepConfig& config) {
  return "morphalign sweep seed=" + std::to_string(config.seed) +
         " epochs=" + std::to_string(config.epochs);
}

std::string score_file_text(const SweepConfig& config, const std::vector<ScoreRow>& rows) {
  std::ostringstream out;
  write_score_rows(out, rows, seed_comment(config));
  return out.str();
}

JobOutcome run_job(const SweepConfig& config, const LanguageData& lang, const Job& job) {
  JobOutcome outcome;
  const std::string name = label(job.point);
  const fs::path model_path = lang.dir / "models" / (name + ".json");
  std::vector<fs::path> score_paths;
  for (const auto mode : config.modes) {
    score_paths.push_back(lang.dir / "scores" / (name + "-" + std::string(to_string(mode)) + ".tsv"));
  }
  const bool model_exists = fs::exists(model_path);
  const bool all_scores =
      model_exists && std::all_of(score_paths.begin(), score_paths.end(),
                                  [](const fs::path& p) { return fs::exists(p); });
  if (all_scores) {
    for (const auto& p : score_paths) {
      std::istringstream in(read_file(p.string()));
      auto rows = read_score_rows(in);
      outcome.rows.insert(outcome.rows.end(), rows.begin(), rows.end());
    }
    outcome.reused = true;
    return outcome;
  }

  TokenizerModel model = TokenizerModel::character();
  if (model_exists) {
    model = load_model(model_path.string());
  } else {
    switch (job.point.kind) {
      case TokenizerKind::kCharacter:
        break;
      case TokenizerKind::kGoldLookup: {
        std::map<std::string, std::vector<std::string>> gold;
        for (const auto& entry : lang.dataset.entries) gold.emplace(entry.form(), entry.gold_segments());
        model = TokenizerModel::gold(std::move(gold));
        break;
      }
      default: {
        TrainConfig train;
        train.kind = job.point.kind;
        train.vocab_size = job.point.vocab_size;
        train.seed = config.seed;
        model = train_tokenizer(lang.corpus, train);
      }
    }
    model.seed = config.seed;
    save_model(model_path.string(), model);
  }

  for (std::size_t m = 0; m < config.modes.size(); ++m) {
    EvaluateOptions options;
    options.language = lang.dataset.language;
    options.mode = config.modes[m];
    options.aggregations = config.aggregations;
    options.thresholds = config.thresholds;
    options.epochs = config.epochs;
    options.null_token = config.null_token;
    Evaluation evaluation = evaluate(lang.dataset, model, options);
    for (auto& row : evaluation.rows) row.vocab_size = is_baseline(job.point.kind) ? 0 : job.point.vocab_size;
    const fs::path table_path =
        lang.dir / "tables" / (name + "-" + std::string(to_string(config.modes[m])) + ".json");
    save_table(table_path.string(), evaluation.table);
    write_file_atomic(score_paths[m].string(), score_file_text(config, evaluation.rows));
    outcome.rows.insert(outcome.rows.end(), evaluation.rows.begin(), evaluation.rows.end());
  }
  return outcome;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config, std::ostream* log) {
  config.validate();
  const fs::path out_dir(config.output_dir);
  std::mutex log_mutex;
  const auto say = [&](const std::string& line) {
    if (log == nullptr) return;
    std::lock_guard lock(log_mutex);
    *log << line << '\n';
  };

  std::vector<LanguageData> languages;
  for (const auto& inputs : config.languages) {
    LanguageData lang;
    lang.dir = out_dir / inputs.code;
    std::ifstream features(inputs.feature_lexicon);
    std::ifstream segmentations(inputs.segmentation_lexicon);
    if (!features) throw IoError("cannot open '" + inputs.feature_lexicon + "'");
    if (!segmentations) throw IoError("cannot open '" + inputs.segmentation_lexicon + "'");
    CurationStats stats;
    lang.dataset = curate(parse_segmentation_lexicon(segmentations), parse_feature_lexicon(features), &stats);
    lang.dataset.language = inputs.code;
    lang.dataset.source_meta = {inputs.feature_lexicon, inputs.segmentation_lexicon};
    std::ostringstream curated;
    write_curated(curated, lang.dataset);
    write_file_atomic((lang.dir / "curated.tsv").string(), curated.str());
    lang.corpus = count_words_file(inputs.corpus);
    say(inputs.code + ": curated " + std::to_string(stats.matched) + " entries (dropped " +
        std::to_string(stats.dropped) + "), " + std::to_string(lang.corpus.size()) + " word types");
    languages.push_back(std::move(lang));
  }

  std::vector<Job> jobs;
  for (std::size_t l = 0; l < languages.size(); ++l) {
    for (const auto kind : config.kinds) {
      if (is_baseline(kind)) {
        jobs.push_back({l, GridPoint{kind, 0}});
        continue;
      }
      for (const auto size : config.vocab_sizes) jobs.push_back({l, GridPoint{kind, size}});
    }
  }

  std::vector<JobOutcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      const std::string name = config.languages[job.language].code + "/" + label(job.point);
      try {
        outcomes[i] = run_job(config, languages[job.language], job);
        say(name + (outcomes[i].reused ? ": reused" : ": done"));
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
        say(name + ": FAILED: " + e.what());
      }
    }
  };
  const std::size_t threads = std::min(config.workers, std::max<std::size_t>(jobs.size(), 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SweepResult result;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto& outcome = outcomes[i];
    if (outcome.error) {
      result.failures.push_back({config.languages[jobs[i].language].code, jobs[i].point, *outcome.error});
      continue;
    }
    (outcome.reused ? result.reused_points : result.computed_points) += 1;
    result.rows.insert(result.rows.end(), outcome.rows.begin(), outcome.rows.end());
  }
  result.report = build_report(result.rows);

  const std::string comment = seed_comment(config);
  write_file_atomic((out_dir / "scores.tsv").string(), score_file_text(config, result.rows));
  {
    std::ostringstream csv;
    write_score_rows(csv, result.rows, comment, ',');
    write_file_atomic((out_dir / "scores.csv").string(), csv.str());
  }
  {
    std::ostringstream csv;
    write_report_csv(csv, result.report, comment);
    write_file_atomic((out_dir / "correlations.csv").string(), csv.str());
  }
  {
    std::ostringstream tsv;
    tsv << "# " << comment << "\nlanguage\tpoint\tmessage\n";
    for (const auto& f : result.failures) tsv << f.language << '\t' << label(f.point) << '\t' << f.message << '\n';
    write_file_atomic((out_dir / "failures.tsv").string(), tsv.str());
  }
  return result;
}

}  // namespace morphalign
