// Small randomized models, sentences, and episodes shared by the gradient
// and oracle tests.
#pragma once

#include <string>
#include <vector>

#include "spanproto/encoder.hpp"
#include "spanproto/episode.hpp"
#include "spanproto/rng.hpp"

namespace fixtures {

using namespace spanproto;

inline std::vector<std::string> tiny_tokens() {
  return {"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta", "iota", "kappa"};
}

inline Model tiny_model(int h, int mixing_layers, uint64_t seed) {
  Vocabulary vocab;
  for (const std::string& t : tiny_tokens()) vocab.add(t);
  EncoderConfig cfg;
  cfg.embedding_dim = h;
  cfg.max_len = 16;
  cfg.mixing_layers = mixing_layers;
  return init_model(cfg, std::move(vocab), seed);
}

inline LabeledSentence random_sentence(Rng& rng, int length,
                                       const std::vector<std::string>& types,
                                       int max_mentions) {
  const auto tokens = tiny_tokens();
  LabeledSentence s;
  for (int i = 0; i < length; ++i) {
    s.tokens.push_back(tokens[static_cast<size_t>(rng_index(rng, static_cast<int>(tokens.size())))]);
  }
  const int n = max_mentions == 0 ? 0 : rng_index(rng, max_mentions + 1);
  for (int m = 0; m < n; ++m) {
    Span sp;
    sp.start = rng_index(rng, length);
    sp.end = sp.start + rng_index(rng, length - sp.start);
    const std::string type = types[static_cast<size_t>(rng_index(rng, static_cast<int>(types.size())))];
    Mention mention{sp, type};
    bool dup = false;
    for (const Mention& other : s.mentions) dup = dup || other == mention;
    if (!dup) s.mentions.push_back(mention);
  }
  return s;
}

// Episode with every type owning at least one support mention.
inline Episode random_episode(Rng& rng, int n_types, int n_support, int n_query, int max_len) {
  Episode ep;
  for (int t = 0; t < n_types; ++t) ep.types.push_back("T" + std::to_string(t));
  for (int t = 0; t < n_types; ++t) {
    const int len = 2 + rng_index(rng, max_len - 1);
    LabeledSentence s = random_sentence(rng, len, ep.types, 2);
    Span sp;
    sp.start = rng_index(rng, len);
    sp.end = sp.start + rng_index(rng, len - sp.start);
    Mention must{sp, ep.types[static_cast<size_t>(t)]};
    bool dup = false;
    for (const Mention& other : s.mentions) dup = dup || other == must;
    if (!dup) s.mentions.push_back(must);
    ep.support.push_back(std::move(s));
  }
  for (int i = n_types; i < n_support; ++i) {
    ep.support.push_back(random_sentence(rng, 2 + rng_index(rng, max_len - 1), ep.types, 2));
  }
  for (int q = 0; q < n_query; ++q) {
    ep.query.push_back(random_sentence(rng, 2 + rng_index(rng, max_len - 1), ep.types, 2));
  }
  return ep;
}

inline Mat random_mat(Rng& rng, int rows, int cols, double scale = 1.0) {
  Mat m(rows, cols);
  for (double& x : m.a) x = scale * rng_normal(rng);
  return m;
}

}  // namespace fixtures
