// Trainable token encoder: embedding lookup + sinusoidal position signal +
// lightweight self-attention mixing blocks. Produces the contextual matrix
// H (L x h) consumed by the span scorer and the mention classifier. Also
// owns the whole model's parameter bundle.
#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "spanproto/episode.hpp"
#include "spanproto/params.hpp"
#include "spanproto/tape.hpp"

namespace spanproto {

struct EncoderConfig {
  int embedding_dim = 64;  // h
  int max_len = 128;
  int mixing_layers = 1;

  void validate() const {
    if (embedding_dim < 2) throw ConfigError("embedding_dim must be >= 2");
    if (max_len < 1) throw ConfigError("max_len must be >= 1");
    if (mixing_layers < 0) throw ConfigError("mixing_layers must be >= 0");
  }
};

struct EncodedSentence {
  Mat H;
  int length = 0;
};

// Token -> index map with index 0 reserved for the unknown bucket.
class Vocabulary {
 public:
  Vocabulary() { id_to_token_.push_back("<unk>"); }

  static Vocabulary build(const EpisodeDataset& data);
  static Vocabulary from_tokens(const std::vector<std::string>& id_to_token);

  int id(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? 0 : it->second;
  }
  int add(const std::string& token);
  int size() const { return static_cast<int>(id_to_token_.size()); }
  const std::vector<std::string>& tokens() const { return id_to_token_; }

 private:
  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

// The full trainable bundle: encoder + span-scorer parameters.
struct Model {
  EncoderConfig encoder;
  Vocabulary vocab;
  ParameterRegistry params;
};

// Registers and initializes every parameter. Deterministic in seed.
Model init_model(const EncoderConfig& config, Vocabulary vocab, uint64_t seed);

// Builds the encoder graph for one sentence; returns H (L x h).
// Rejects empty sentences and sentences longer than max_len.
Var encode_on(Tape& tape, Model& model, const LabeledSentence& sentence);

// Forward-only convenience.
EncodedSentence encode(Model& model, const LabeledSentence& sentence);

// Fixed (non-trainable) sinusoidal position rows, scaled to stay small
// relative to token embeddings.
Mat position_signal(int length, int dim);

}  // namespace spanproto
