#include "spanproto/checkpoint.hpp"

#include <fstream>
#include <vector>

#include <json.hpp>

namespace spanproto {

using nlohmann::json;

void save_checkpoint(const Model& model, const std::string& path) {
  json j;
  j["encoder"] = {{"embedding_dim", model.encoder.embedding_dim},
                  {"max_len", model.encoder.max_len},
                  {"mixing_layers", model.encoder.mixing_layers}};
  j["vocab"] = model.vocab.tokens();
  json params = json::array();
  for (int i = 0; i < model.params.size(); ++i) {
    const Param& p = model.params.at(i);
    params.push_back({{"name", p.name},
                      {"rows", p.value.rows},
                      {"cols", p.value.cols},
                      {"data", p.value.a}});
  }
  j["params"] = std::move(params);

  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump();
  if (!out) throw IoError("write failed: " + path);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("checkpoint parse error: " + path + ": " + e.what());
  }

  try {
    EncoderConfig cfg;
    cfg.embedding_dim = j.at("encoder").at("embedding_dim").get<int>();
    cfg.max_len = j.at("encoder").at("max_len").get<int>();
    cfg.mixing_layers = j.at("encoder").at("mixing_layers").get<int>();
    Vocabulary vocab = Vocabulary::from_tokens(j.at("vocab").get<std::vector<std::string>>());

    // Rebuild the expected registry, then fill values; any mismatch in
    // names or shapes is rejected.
    Model model = init_model(cfg, std::move(vocab), 0);
    const auto& params = j.at("params");
    if (static_cast<int>(params.size()) != model.params.size()) {
      throw ParseError("checkpoint parameter count mismatch: " + path);
    }
    std::vector<bool> filled(static_cast<size_t>(model.params.size()), false);
    for (const auto& pj : params) {
      const std::string name = pj.at("name").get<std::string>();
      const int idx = model.params.index_of(name);
      if (idx < 0) throw ParseError("checkpoint has unknown parameter " + name);
      if (filled[static_cast<size_t>(idx)]) {
        throw ParseError("checkpoint has duplicate parameter " + name);
      }
      filled[static_cast<size_t>(idx)] = true;
      Param& p = model.params.at(idx);
      const int rows = pj.at("rows").get<int>();
      const int cols = pj.at("cols").get<int>();
      if (rows != p.value.rows || cols != p.value.cols) {
        throw ParseError("checkpoint shape mismatch for " + name + ": got " +
                         std::to_string(rows) + "x" + std::to_string(cols) + ", expected " +
                         std::to_string(p.value.rows) + "x" + std::to_string(p.value.cols));
      }
      const auto data = pj.at("data").get<std::vector<double>>();
      if (data.size() != p.value.size()) {
        throw ParseError("checkpoint data size mismatch for " + name);
      }
      p.value.a = data;
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError("checkpoint parse error: " + path + ": " + e.what());
  }
}

}  // namespace spanproto
