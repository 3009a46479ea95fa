// Synthetic episode generator: deterministic N-way K-shot episodes built
// from type lexicons (entity phrase lists) and slotted sentence templates.
//
// Query sentences optionally carry distractor mentions whose true type lies
// outside the episode's target set. Distractors are not labeled in the
// episode itself (that would break the episode invariant); their locations
// are returned as side annotations so rejection behavior can be measured.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spanproto/episode.hpp"

namespace spanproto {

enum class DisjointnessMode { intra, inter };

std::string mode_name(DisjointnessMode m);
DisjointnessMode mode_from_name(const std::string& name);

struct TypeLexicon {
  std::string name;    // fine type name, unique across the pool
  std::string coarse;  // coarse group name
  std::vector<std::vector<std::string>> phrases;
};

struct GeneratorConfig {
  int ways = 5;
  int shots = 1;
  int queries_per_episode = 2;
  int episodes = 50;
  double distractor_prob = 0.3;
  DisjointnessMode mode = DisjointnessMode::inter;
  Split split = Split::train;
  std::vector<TypeLexicon> lexicons;                 // full pool, all splits
  std::vector<std::vector<std::string>> templates;   // "{}" marks an entity slot
};

// An unlabeled entity-shaped phrase injected into a query sentence.
struct DistractorRecord {
  int episode = 0;
  int query_sentence = 0;
  Span span;
  std::string true_type;
};

struct SyntheticBatch {
  EpisodeDataset dataset;
  std::vector<DistractorRecord> distractors;
};

// Built-in pool: 8 coarse groups x 3 fine types, phrases composed from
// signature token pairs over a shared alphabet plus garnish tokens. The
// signature assignment depends on the disjointness mode so that no two
// types of one split share a signature while the train split still sees
// every content token.
GeneratorConfig default_generator_config(DisjointnessMode mode);

// Lexicon indices of the pool belonging to config.split under config.mode.
std::vector<int> split_pool(const GeneratorConfig& config);

// Pure function of (config, seed).
SyntheticBatch generate_synthetic(const GeneratorConfig& config, uint64_t seed);

}  // namespace spanproto
