#include "spanproto/encoder.hpp"

#include <cmath>

#include "spanproto/rng.hpp"

namespace spanproto {

Vocabulary Vocabulary::build(const EpisodeDataset& data) {
  Vocabulary v;
  for (const Episode& ep : data.episodes) {
    for (const LabeledSentence& s : ep.support) {
      for (const std::string& tok : s.tokens) v.add(tok);
    }
    for (const LabeledSentence& s : ep.query) {
      for (const std::string& tok : s.tokens) v.add(tok);
    }
  }
  return v;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& id_to_token) {
  if (id_to_token.empty() || id_to_token[0] != "<unk>") {
    throw ParseError("vocabulary must start with <unk>");
  }
  Vocabulary v;
  for (size_t i = 1; i < id_to_token.size(); ++i) {
    if (v.add(id_to_token[i]) != static_cast<int>(i)) {
      throw ParseError("duplicate token in vocabulary: " + id_to_token[i]);
    }
  }
  return v;
}

int Vocabulary::add(const std::string& token) {
  auto it = token_to_id_.find(token);
  if (it != token_to_id_.end()) return it->second;
  const int id = static_cast<int>(id_to_token_.size());
  token_to_id_[token] = id;
  id_to_token_.push_back(token);
  return id;
}

namespace {

constexpr double kPositionScale = 0.1;

void init_normal(Mat& m, Rng& rng, double stddev) {
  for (double& x : m.a) x = stddev * rng_normal(rng);
}

}  // namespace

Mat position_signal(int length, int dim) {
  Mat p(length, dim);
  for (int i = 0; i < length; ++i) {
    for (int k = 0; 2 * k < dim; ++k) {
      const double freq = std::pow(10000.0, -2.0 * k / dim);
      p(i, 2 * k) = kPositionScale * std::sin(i * freq);
      if (2 * k + 1 < dim) p(i, 2 * k + 1) = kPositionScale * std::cos(i * freq);
    }
  }
  return p;
}

Model init_model(const EncoderConfig& config, Vocabulary vocab, uint64_t seed) {
  config.validate();
  Model model;
  model.encoder = config;
  model.vocab = std::move(vocab);

  const int h = config.embedding_dim;
  ParameterRegistry& reg = model.params;
  reg.add("emb", model.vocab.size(), h);
  for (int layer = 0; layer < config.mixing_layers; ++layer) {
    const std::string p = "enc.l" + std::to_string(layer) + ".";
    reg.add(p + "wq", h, h);
    reg.add(p + "wk", h, h);
    reg.add(p + "wv", h, h);
    reg.add(p + "bq", 1, h);
    reg.add(p + "bk", 1, h);
    reg.add(p + "bv", 1, h);
    reg.add(p + "w1", h, h);
    reg.add(p + "b1", 1, h);
    reg.add(p + "w2", h, h);
    reg.add(p + "b2", 1, h);
  }
  reg.add("scorer.wq", h, h);
  reg.add("scorer.wk", h, h);
  reg.add("scorer.bq", 1, h);
  reg.add("scorer.bk", 1, h);
  reg.add("scorer.wv", h, 1);

  Rng rng(seed);
  const double w_std = 1.0 / std::sqrt(static_cast<double>(h));
  // Embedding scale keeps pairwise span-representation distances roughly
  // h-independent (E|u - u'| ~ 2 * std * sqrt(h)), so the default rejection
  // radius means the same thing at any width.
  init_normal(reg.at("emb").value, rng, 1.8 / std::sqrt(static_cast<double>(h)));
  for (int layer = 0; layer < config.mixing_layers; ++layer) {
    const std::string p = "enc.l" + std::to_string(layer) + ".";
    init_normal(reg.at(p + "wq").value, rng, w_std);
    init_normal(reg.at(p + "wk").value, rng, w_std);
    init_normal(reg.at(p + "wv").value, rng, 0.3 * w_std);
    init_normal(reg.at(p + "w1").value, rng, w_std);
    init_normal(reg.at(p + "w2").value, rng, 0.3 * w_std);
  }
  init_normal(reg.at("scorer.wq").value, rng, w_std);
  init_normal(reg.at("scorer.wk").value, rng, w_std);
  init_normal(reg.at("scorer.wv").value, rng, w_std);
  return model;
}

Var encode_on(Tape& tape, Model& model, const LabeledSentence& sentence) {
  const int len = sentence.length();
  const int h = model.encoder.embedding_dim;
  if (len == 0) throw ValidationError("encode: empty token list");
  if (len > model.encoder.max_len) {
    throw ValidationError("encode: length error: sentence has " + std::to_string(len) +
                          " tokens, max is " + std::to_string(model.encoder.max_len));
  }

  std::vector<int> ids;
  ids.reserve(static_cast<size_t>(len));
  for (const std::string& tok : sentence.tokens) ids.push_back(model.vocab.id(tok));

  Var emb = tape.param(model.params, "emb");
  Var H = add(gather_rows(emb, std::move(ids)), tape.input(position_signal(len, h)));

  const double inv_sqrt_h = 1.0 / std::sqrt(static_cast<double>(h));
  for (int layer = 0; layer < model.encoder.mixing_layers; ++layer) {
    const std::string p = "enc.l" + std::to_string(layer) + ".";
    Var q = add_rowvec(matmul(H, tape.param(model.params, p + "wq")),
                       tape.param(model.params, p + "bq"));
    Var k = add_rowvec(matmul(H, tape.param(model.params, p + "wk")),
                       tape.param(model.params, p + "bk"));
    Var v = add_rowvec(matmul(H, tape.param(model.params, p + "wv")),
                       tape.param(model.params, p + "bv"));
    Var attn = softmax_rows(scale(matmul_nt(q, k), inv_sqrt_h));
    H = add(H, matmul(attn, v));

    Var m = tanh_op(add_rowvec(matmul(H, tape.param(model.params, p + "w1")),
                               tape.param(model.params, p + "b1")));
    H = add(H, add_rowvec(matmul(m, tape.param(model.params, p + "w2")),
                          tape.param(model.params, p + "b2")));
  }
  return H;
}

EncodedSentence encode(Model& model, const LabeledSentence& sentence) {
  Tape tape;
  Var H = encode_on(tape, model, sentence);
  if (!tape.val(H).all_finite()) {
    throw ValidationError("encode: non-finite entries in H");
  }
  return EncodedSentence{tape.val(H), sentence.length()};
}

}  // namespace spanproto
