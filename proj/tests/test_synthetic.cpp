#include <gtest/gtest.h>

#include <set>

#include "spanproto/synthetic.hpp"

using namespace spanproto;

namespace {

GeneratorConfig small_config(DisjointnessMode mode, Split split) {
  GeneratorConfig cfg = default_generator_config(mode);
  cfg.ways = 2;
  cfg.shots = 1;
  cfg.queries_per_episode = 1;
  cfg.episodes = 1;
  cfg.distractor_prob = 0.0;
  cfg.split = split;
  return cfg;
}

std::set<std::string> type_names(const EpisodeDataset& ds) {
  std::set<std::string> names;
  for (const Episode& ep : ds.episodes) {
    for (const std::string& t : ep.types) names.insert(t);
  }
  return names;
}

}  // namespace

TEST(Synthetic, StructuralShape) {
  const auto batch = generate_synthetic(small_config(DisjointnessMode::inter, Split::train), 42);
  ASSERT_EQ(batch.dataset.episodes.size(), 1u);
  const Episode& ep = batch.dataset.episodes[0];
  EXPECT_EQ(ep.types.size(), 2u);
  // Exactly K=1 support mention per type.
  for (const std::string& t : ep.types) {
    int count = 0;
    for (const LabeledSentence& s : ep.support) {
      for (const Mention& m : s.mentions) count += m.type == t;
    }
    EXPECT_EQ(count, 1) << t;
  }
  EXPECT_NO_THROW(ep.validate(0));
}

TEST(Synthetic, DeterministicInSeed) {
  const auto cfg = small_config(DisjointnessMode::inter, Split::train);
  const auto a = generate_synthetic(cfg, 42);
  const auto b = generate_synthetic(cfg, 42);
  EXPECT_EQ(a.dataset, b.dataset);
  ASSERT_EQ(a.distractors.size(), b.distractors.size());
  const auto c = generate_synthetic(cfg, 43);
  EXPECT_NE(a.dataset, c.dataset);
}

TEST(Synthetic, ExactShotCounts) {
  GeneratorConfig cfg = small_config(DisjointnessMode::inter, Split::train);
  cfg.ways = 4;
  cfg.shots = 3;
  cfg.episodes = 5;
  const auto batch = generate_synthetic(cfg, 7);
  for (const Episode& ep : batch.dataset.episodes) {
    for (const std::string& t : ep.types) {
      int count = 0;
      for (const LabeledSentence& s : ep.support) {
        for (const Mention& m : s.mentions) count += m.type == t;
      }
      EXPECT_EQ(count, 3);
    }
  }
}

TEST(Synthetic, DistractorProbabilityOne) {
  GeneratorConfig cfg = small_config(DisjointnessMode::inter, Split::train);
  cfg.ways = 5;
  cfg.queries_per_episode = 3;
  cfg.episodes = 10;
  cfg.distractor_prob = 1.0;
  const auto batch = generate_synthetic(cfg, 11);
  // Every query sentence owns exactly one distractor record.
  std::set<std::pair<int, int>> covered;
  for (const DistractorRecord& d : batch.distractors) {
    const Episode& ep = batch.dataset.episodes[static_cast<size_t>(d.episode)];
    EXPECT_EQ(ep.type_index(d.true_type), -1) << "distractor type inside episode types";
    covered.insert({d.episode, d.query_sentence});
    // The distractor span is not a gold mention.
    for (const Mention& m : ep.query[static_cast<size_t>(d.query_sentence)].mentions) {
      EXPECT_FALSE(m.span == d.span);
    }
  }
  EXPECT_EQ(covered.size(), 30u);
}

TEST(Synthetic, IntraTypeNamesDisjointAcrossSplits) {
  GeneratorConfig cfg = small_config(DisjointnessMode::intra, Split::train);
  cfg.ways = 5;
  cfg.episodes = 20;
  const auto train = generate_synthetic(cfg, 1);
  cfg.split = Split::dev;
  const auto dev = generate_synthetic(cfg, 2);
  cfg.split = Split::test;
  const auto test = generate_synthetic(cfg, 3);

  const auto train_names = type_names(train.dataset);
  for (const std::string& t : type_names(dev.dataset)) EXPECT_EQ(train_names.count(t), 0u) << t;
  for (const std::string& t : type_names(test.dataset)) EXPECT_EQ(train_names.count(t), 0u) << t;
}

TEST(Synthetic, InterFineTypesDisjointAcrossSplits) {
  GeneratorConfig cfg = small_config(DisjointnessMode::inter, Split::train);
  cfg.ways = 5;
  cfg.episodes = 20;
  const auto train = generate_synthetic(cfg, 1);
  cfg.split = Split::test;
  const auto test = generate_synthetic(cfg, 2);
  const auto train_names = type_names(train.dataset);
  for (const std::string& t : type_names(test.dataset)) EXPECT_EQ(train_names.count(t), 0u) << t;
}

TEST(Synthetic, WaysBeyondPoolIsConfigError) {
  GeneratorConfig cfg = small_config(DisjointnessMode::inter, Split::train);
  cfg.ways = 10;  // inter split pool has 9 types
  EXPECT_THROW(generate_synthetic(cfg, 1), ConfigError);
}

TEST(Synthetic, ShotsBeyondLexiconIsConfigError) {
  GeneratorConfig cfg = small_config(DisjointnessMode::inter, Split::train);
  cfg.shots = 100;
  EXPECT_THROW(generate_synthetic(cfg, 1), ConfigError);
}

TEST(Synthetic, TrainSplitCoversAllContentTokens) {
  // Every entity token of dev/test lexicons must be reachable from training
  // data, or held-out episodes degenerate to unknown-token soup.
  for (DisjointnessMode mode : {DisjointnessMode::intra, DisjointnessMode::inter}) {
    GeneratorConfig cfg = default_generator_config(mode);
    std::set<std::string> train_tokens;
    cfg.split = Split::train;
    for (int idx : split_pool(cfg)) {
      for (const auto& phrase : cfg.lexicons[static_cast<size_t>(idx)].phrases) {
        for (const std::string& tok : phrase) train_tokens.insert(tok);
      }
    }
    for (Split split : {Split::dev, Split::test}) {
      cfg.split = split;
      for (int idx : split_pool(cfg)) {
        for (const auto& phrase : cfg.lexicons[static_cast<size_t>(idx)].phrases) {
          for (const std::string& tok : phrase) {
            EXPECT_EQ(train_tokens.count(tok), 1u)
                << tok << " unseen in " << mode_name(mode) << " train split";
          }
        }
      }
    }
  }
}

TEST(Synthetic, SignatureCollisionsLimitedToTwinPair) {
  // Within one split, distinct types stay token-separable except for the
  // deliberate person/creature twin pair (inter mode only), which shares a
  // signature and is separable through garnish context alone.
  for (DisjointnessMode mode : {DisjointnessMode::intra, DisjointnessMode::inter}) {
    for (Split split : {Split::train, Split::dev, Split::test}) {
      GeneratorConfig cfg = default_generator_config(mode);
      cfg.split = split;
      const auto pool = split_pool(cfg);
      int collisions = 0;
      for (size_t a = 0; a < pool.size(); ++a) {
        for (size_t b = a + 1; b < pool.size(); ++b) {
          const TypeLexicon& la = cfg.lexicons[static_cast<size_t>(pool[a])];
          const TypeLexicon& lb = cfg.lexicons[static_cast<size_t>(pool[b])];
          std::set<std::string> ends_a, ends_b;
          for (const auto& p : la.phrases) {
            ends_a.insert(p.front());
            ends_a.insert(p.back());
          }
          for (const auto& p : lb.phrases) {
            ends_b.insert(p.front());
            ends_b.insert(p.back());
          }
          bool overlap = false;
          for (const std::string& tok : ends_a) overlap = overlap || ends_b.count(tok) != 0;
          if (!overlap) continue;
          ++collisions;
          // Inter twins person/creature by construction; intra's signature
          // cycle wraps person onto product inside the train block.
          const std::set<std::string> pair = {la.coarse, lb.coarse};
          const bool is_twin = pair == std::set<std::string>{"person", "creature"} ||
                               pair == std::set<std::string>{"person", "product"};
          EXPECT_TRUE(is_twin) << mode_name(mode) << "/" << split_name(split) << ": "
                               << la.name << " vs " << lb.name;
        }
      }
      if (mode == DisjointnessMode::inter) {
        EXPECT_EQ(collisions, 1) << mode_name(mode) << "/" << split_name(split);
      } else {
        // Intra train wraps the signature cycle onto person/product, one
        // collision per fine slot; dev and test blocks stay collision-free.
        EXPECT_EQ(collisions, split == Split::train ? 3 : 0)
            << mode_name(mode) << "/" << split_name(split);
      }
    }
  }
}

TEST(Synthetic, TwinTypesNeverCoSampled) {
  GeneratorConfig cfg = default_generator_config(DisjointnessMode::inter);
  cfg.ways = 5;
  cfg.shots = 1;
  cfg.queries_per_episode = 1;
  cfg.episodes = 40;
  cfg.distractor_prob = 0.0;
  const auto batch = generate_synthetic(cfg, 33);
  for (const Episode& ep : batch.dataset.episodes) {
    std::set<std::string> names(ep.types.begin(), ep.types.end());
    int person = 0, creature = 0;
    for (const std::string& t : names) {
      person += t.rfind("person-", 0) == 0;
      creature += t.rfind("creature-", 0) == 0;
    }
    EXPECT_FALSE(person > 0 && creature > 0)
        << "twin types co-sampled in one episode";
  }
}
