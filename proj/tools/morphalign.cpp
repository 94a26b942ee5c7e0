// morphalign: command-line front end for curating lexicons, training
// tokenizers, scoring them by feature alignment and running sweeps.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "morphalign/corpus.hpp"
#include "morphalign/error.hpp"
#include "morphalign/ibm1.hpp"
#include "morphalign/metrics.hpp"
#include "morphalign/stats.hpp"
#include "morphalign/sweep.hpp"
#include "morphalign/synthetic.hpp"
#include "morphalign/tokenizers.hpp"

namespace ma = morphalign;

namespace {

std::vector<std::string> comma_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto& item : ma::split(text, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : comma_list(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ma::ConfigError("invalid threshold '" + item + "'");
    }
  }
  if (out.empty()) throw ma::ConfigError("no thresholds given");
  return out;
}

std::vector<ma::AggregationKind> parse_aggregations(const std::string& text) {
  std::vector<ma::AggregationKind> out;
  if (text == "all") return {ma::kAllAggregations.begin(), ma::kAllAggregations.end()};
  for (const auto& item : comma_list(text)) out.push_back(ma::parse_aggregation(item));
  if (out.empty()) throw ma::ConfigError("no aggregations given");
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ma::IoError("cannot open '" + path + "'");
  return in;
}

struct CurateArgs {
  std::string features;
  std::string segmentations;
  std::string out;
};

int cmd_curate(const CurateArgs& args) {
  auto features_in = open_input(args.features);
  auto segmentations_in = open_input(args.segmentations);
  const auto features = ma::parse_feature_lexicon(features_in);
  const auto segmentations = ma::parse_segmentation_lexicon(segmentations_in);
  ma::CurationStats stats;
  const auto dataset = ma::curate(segmentations, features, &stats);
  std::ostringstream text;
  ma::write_curated(text, dataset);
  ma::write_file_atomic(args.out, text.str());
  std::cout << "feature rows: " << stats.feature_rows << '\n'
            << "matched: " << stats.matched << '\n'
            << "dropped: " << stats.dropped << '\n'
            << "feature lines skipped: " << features.skipped_lines << '\n'
            << "empty bundles: " << features.empty_bundles << '\n'
            << "segmentations: " << segmentations.segments.size() << '\n'
            << "segmentation rows rejected: " << segmentations.malformed_rows << '\n'
            << "duplicate segmentation forms: " << segmentations.duplicate_forms << '\n';
  return 0;
}

struct TrainArgs {
  std::string corpus;
  std::string curated;
  std::string kind;
  std::size_t vocab_size = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_train_tokenizer(const TrainArgs& args) {
  const ma::TokenizerKind kind = ma::parse_tokenizer_kind(args.kind);
  ma::TokenizerModel model = ma::TokenizerModel::character();
  if (kind == ma::TokenizerKind::kGoldLookup) {
    if (args.curated.empty()) throw ma::ConfigError("--curated is required for the gold baseline");
    const auto dataset = ma::load_curated(args.curated);
    std::map<std::string, std::vector<std::string>> gold;
    for (const auto& entry : dataset.entries) gold.emplace(entry.form(), entry.gold_segments());
    model = ma::TokenizerModel::gold(std::move(gold));
  } else if (kind != ma::TokenizerKind::kCharacter) {
    if (args.corpus.empty()) throw ma::ConfigError("--corpus is required for trainable tokenizers");
    if (args.vocab_size == 0) throw ma::ConfigError("--vocab-size must be positive");
    ma::TrainConfig config;
    config.kind = kind;
    config.vocab_size = args.vocab_size;
    config.seed = args.seed;
    model = ma::train_tokenizer(ma::count_words_file(args.corpus), config);
  }
  model.seed = args.seed;
  ma::save_model(args.out, model);
  std::cout << "kind: " << ma::to_string(model.kind()) << '\n'
            << "vocab size: " << model.vocab().size() << '\n';
  if (!model.merges().empty()) std::cout << "merges: " << model.merges().size() << '\n';
  return 0;
}

struct SegmentArgs {
  std::string model;
  std::vector<std::string> words;
  bool canonical = false;
};

int cmd_segment(const SegmentArgs& args) {
  const auto model = ma::load_model(args.model);
  const auto emit = [&](const std::string& word) {
    auto tokens = ma::segment(model, word);
    if (args.canonical) {
      const auto canonical = ma::canonical_subwords(model, tokens);
      if (!canonical) {
        std::cout << word << '\t' << ma::kUnknownToken << '\n';
        return;
      }
      tokens = *canonical;
    }
    std::cout << word << '\t' << ma::join(tokens, " ") << '\n';
  };
  if (!args.words.empty()) {
    for (const auto& w : args.words) emit(w);
    return 0;
  }
  std::string line;
  while (std::getline(std::cin, line)) {
    std::istringstream words(line);
    std::string w;
    while (words >> w) emit(w);
  }
  return 0;
}

struct EvaluateArgs {
  std::string curated;
  std::string model;
  std::string mode = "split";
  std::string aggregations = "all";
  std::string thresholds;
  std::size_t epochs = 10;
  std::string out;
  std::string table_out;
  std::string language = "und";
  std::string direction = "subword-to-feature";
  bool null_token = false;
};

int cmd_evaluate(const EvaluateArgs& args) {
  const auto dataset = ma::load_curated(args.curated, args.language);
  const auto model = ma::load_model(args.model);
  ma::EvaluateOptions options;
  options.language = args.language;
  options.mode = ma::parse_feature_mode(args.mode);
  options.aggregations = parse_aggregations(args.aggregations);
  if (!args.thresholds.empty()) options.thresholds = parse_thresholds(args.thresholds);
  options.epochs = args.epochs;
  options.null_token = args.null_token;
  options.direction = ma::parse_align_direction(args.direction);
  const auto evaluation = ma::evaluate(dataset, model, options);
  std::ostringstream rows;
  ma::write_score_rows(rows, evaluation.rows, "morphalign evaluate seed=" + std::to_string(model.seed) +
                                                  " epochs=" + std::to_string(args.epochs));
  if (args.out.empty() || args.out == "-") {
    std::cout << rows.str();
  } else {
    ma::write_file_atomic(args.out, rows.str());
  }
  if (!args.table_out.empty()) ma::save_table(args.table_out, evaluation.table);
  std::cerr << "pairs: " << dataset.entries.size() - evaluation.rows.front().excluded_count
            << ", excluded: " << evaluation.rows.front().excluded_count
            << ", final loglik: " << ma::format_real(evaluation.table.final_loglik()) << '\n';
  return 0;
}

struct SweepArgs {
  std::string config;
  std::string output_dir;
  std::size_t workers = 0;
  std::size_t epochs = 0;
  std::int64_t seed = -1;
};

int cmd_sweep(const SweepArgs& args) {
  auto config = ma::load_sweep_config(args.config);
  if (!args.output_dir.empty()) config.output_dir = args.output_dir;
  if (args.workers > 0) config.workers = args.workers;
  if (args.epochs > 0) config.epochs = args.epochs;
  if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
  const auto result = ma::run_sweep(config, &std::cerr);
  std::cout << "grid points computed: " << result.computed_points << '\n'
            << "grid points reused: " << result.reused_points << '\n'
            << "failures: " << result.failures.size() << '\n'
            << "score rows: " << result.rows.size() << '\n'
            << "output: " << config.output_dir << '\n';
  return 0;
}

struct ReportArgs {
  std::string scores;
  std::string out;
};

int cmd_report(const ReportArgs& args) {
  auto in = open_input(args.scores);
  const char sep = args.scores.ends_with(".csv") ? ',' : '\t';
  const auto rows = ma::read_score_rows(in, sep);
  const auto report = ma::build_report(rows);
  std::ostringstream csv;
  ma::write_report_csv(csv, report);
  if (args.out.empty() || args.out == "-") {
    std::cout << csv.str();
  } else {
    ma::write_file_atomic(args.out, csv.str());
  }
  return 0;
}

struct SynthArgs {
  std::string out_dir;
  ma::SyntheticLanguageConfig config;
};

int cmd_synth(const SynthArgs& args) {
  const auto language = ma::generate_synthetic_language(args.config);
  ma::write_synthetic_language(args.out_dir, language);
  std::cout << "stems: " << language.stems << '\n' << "forms: " << language.forms << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morphological plausibility of subword tokenizers via feature alignment"};
  app.require_subcommand(1);

  CurateArgs curate_args;
  auto* curate = app.add_subcommand("curate", "Join a feature lexicon with a segmentation lexicon");
  curate->add_option("--features", curate_args.features, "UniMorph-style TSV (lemma, form, features)")->required();
  curate->add_option("--segmentations", curate_args.segmentations, "TSV of form and '|'-joined segments")->required();
  curate->add_option("-o,--out", curate_args.out, "Curated TSV output")->required();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train-tokenizer", "Train a subword tokenizer or build a baseline");
  train->add_option("--corpus", train_args.corpus, "Plain-text corpus, one sentence per line");
  train->add_option("--curated", train_args.curated, "Curated TSV (gold baseline only)");
  train->add_option("--kind", train_args.kind, "bpe, wordpiece, unigram, character or gold")->required();
  train->add_option("--vocab-size", train_args.vocab_size, "Vocabulary budget");
  train->add_option("--seed", train_args.seed, "Seed recorded in the model file");
  train->add_option("-o,--out", train_args.out, "Model file")->required();

  SegmentArgs segment_args;
  auto* seg = app.add_subcommand("segment", "Segment words with a model (reads stdin if no words)");
  seg->add_option("--model", segment_args.model, "Model file")->required();
  seg->add_flag("--canonical", segment_args.canonical, "Strip continuation markers");
  seg->add_option("words", segment_args.words, "Words to segment");

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate", "Alignment score and boundary P/R/F1 of one model");
  eval->add_option("--curated", eval_args.curated, "Curated TSV")->required();
  eval->add_option("--model", eval_args.model, "Model file")->required();
  eval->add_option("--mode", eval_args.mode, "joint or split")->capture_default_str();
  eval->add_option("--aggregations", eval_args.aggregations, "Comma list or 'all'")->capture_default_str();
  eval->add_option("--thresholds", eval_args.thresholds, "Comma list (default: 11 values in [0.01, 0.5])");
  eval->add_option("--epochs", eval_args.epochs, "IBM Model 1 EM epochs")->capture_default_str();
  eval->add_option("--language", eval_args.language, "Language code for the rows")->capture_default_str();
  eval->add_option("--direction", eval_args.direction, "subword-to-feature or feature-to-subword")->capture_default_str();
  eval->add_flag("--null-token", eval_args.null_token, "Add a NULL source token to every pair");
  eval->add_option("-o,--out", eval_args.out, "Score rows TSV (default stdout)");
  eval->add_option("--table-out", eval_args.table_out, "Write the translation table here");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Run the full tokenizer grid and the correlation report");
  sweep->add_option("--config", sweep_args.config, "JSON sweep configuration")->required();
  sweep->add_option("--output-dir", sweep_args.output_dir, "Override output_dir");
  sweep->add_option("--workers", sweep_args.workers, "Override workers");
  sweep->add_option("--epochs", sweep_args.epochs, "Override epochs");
  sweep->add_option("--seed", sweep_args.seed, "Override seed");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Spearman correlation report from score rows");
  report->add_option("--scores", report_args.scores, "scores.tsv or scores.csv")->required();
  report->add_option("-o,--out", report_args.out, "Correlation CSV (default stdout)");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate the toy agglutinative language");
  synth->add_option("-o,--out-dir", synth_args.out_dir, "Output directory")->required();
  synth->add_option("--seed", synth_args.config.seed, "Generator seed")->capture_default_str();
  synth->add_option("--noun-stems", synth_args.config.noun_stems)->capture_default_str();
  synth->add_option("--verb-stems", synth_args.config.verb_stems)->capture_default_str();
  synth->add_option("--sentences", synth_args.config.sentences)->capture_default_str();
  synth->add_flag("--zero-morphs", synth_args.config.zero_morphs, "Leave unmarked values without a suffix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ma::ExitCode::kUsage);
  }

  try {
    if (*curate) return cmd_curate(curate_args);
    if (*train) return cmd_train_tokenizer(train_args);
    if (*seg) return cmd_segment(segment_args);
    if (*eval) return cmd_evaluate(eval_args);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*report) return cmd_report(report_args);
    if (*synth) return cmd_synth(synth_args);
  } catch (const ma::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ma::ExitCode::kData);
  }
  return static_cast<int>(ma::ExitCode::kUsage);
}
