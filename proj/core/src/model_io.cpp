#include <fstream>
#include <sstream>

#include <json.hpp>

#include "morphalign/error.hpp"
#include "morphalign/sweep.hpp"
#include "morphalign/tokenizers.hpp"

namespace morphalign {

using ordered_json = nlohmann::ordered_json;

std::string serialize_model(const TokenizerModel& model) {
  ordered_json doc;
  doc["schema"] = kModelSchema;
  doc["kind"] = to_string(model.kind());
  doc["seed"] = model.seed;
  doc["requested_vocab_size"] = model.requested_vocab_size;
  doc["continuation_marker"] = model.continuation_marker();
  doc["unknown_token"] = model.kind() == TokenizerKind::kWordPiece ? kUnknownToken : "";
  doc["vocab"] = model.vocab();
  auto merges = ordered_json::array();
  for (const auto& [left, right] : model.merges()) merges.push_back({left, right});
  doc["merges"] = std::move(merges);
  // Log-probabilities follow vocabulary order.
  auto logprob = ordered_json::array();
  if (model.kind() == TokenizerKind::kUnigram) {
    for (const auto& token : model.vocab()) {
      logprob.push_back({token, model.token_logprob().at(token)});
    }
  }
  doc["token_logprob"] = std::move(logprob);
  auto gold = ordered_json::array();
  for (const auto& [form, segments] : model.gold_map()) gold.push_back({form, segments});
  doc["gold_map"] = std::move(gold);
  return doc.dump(1) + "\n";
}

TokenizerModel deserialize_model(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("tokenizer model is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("schema").get<std::string>() != kModelSchema) {
      throw DataError("unsupported tokenizer model schema '" + doc.at("schema").get<std::string>() + "'");
    }
    const TokenizerKind kind = parse_tokenizer_kind(doc.at("kind").get<std::string>());
    auto vocab = doc.at("vocab").get<std::vector<std::string>>();
    std::vector<MergePair> merges;
    for (const auto& m : doc.at("merges")) merges.emplace_back(m.at(0).get<std::string>(), m.at(1).get<std::string>());

    TokenizerModel model = TokenizerModel::character();
    switch (kind) {
      case TokenizerKind::kBpe:
        model = TokenizerModel::bpe(std::move(vocab), std::move(merges));
        break;
      case TokenizerKind::kWordPiece:
        model = TokenizerModel::wordpiece(std::move(vocab), std::move(merges));
        break;
      case TokenizerKind::kUnigram: {
        std::map<std::string, double> logprob;
        for (const auto& entry : doc.at("token_logprob")) {
          logprob[entry.at(0).get<std::string>()] = entry.at(1).get<double>();
        }
        model = TokenizerModel::unigram(std::move(vocab), std::move(logprob));
        break;
      }
      case TokenizerKind::kCharacter:
        break;
      case TokenizerKind::kGoldLookup: {
        std::map<std::string, std::vector<std::string>> gold;
        for (const auto& entry : doc.at("gold_map")) {
          gold[entry.at(0).get<std::string>()] = entry.at(1).get<std::vector<std::string>>();
        }
        model = TokenizerModel::gold(std::move(gold));
        break;
      }
    }
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.requested_vocab_size = doc.at("requested_vocab_size").get<std::size_t>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed tokenizer model: ") + e.what());
  }
}

void save_model(const std::string& path, const TokenizerModel& model) {
  write_file_atomic(path, serialize_model(model));
}

TokenizerModel load_model(const std::string& path) {
  return deserialize_model(read_file(path));
}

}  // namespace morphalign
