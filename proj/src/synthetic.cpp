#include "spanproto/synthetic.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "spanproto/rng.hpp"

namespace spanproto {

std::string mode_name(DisjointnessMode m) {
  return m == DisjointnessMode::intra ? "intra" : "inter";
}

DisjointnessMode mode_from_name(const std::string& name) {
  if (name == "intra") return DisjointnessMode::intra;
  if (name == "inter") return DisjointnessMode::inter;
  throw ConfigError("unknown disjointness mode: " + name);
}

namespace {

// Group 8 ("creature") reuses group 0's signatures with different garnish:
// a deliberate twin pair per split, confusable the way surface-identical
// entities of different types are in real corpora. Rejection of its
// mentions cannot ride on token identity alone.
const char* kCoarseGroups[9] = {"person",   "location", "organization", "building",
                                "product",  "event",    "art",          "misc",
                                "creature"};

const char* kFineNames[9][3] = {
    {"artist", "scientist", "politician"}, {"city", "country", "river"},
    {"company", "team", "university"},     {"stadium", "museum", "airport"},
    {"car", "software", "ship"},           {"war", "festival", "election"},
    {"film", "song", "book"},              {"language", "award", "disease"},
    {"bird", "fish", "insect"}};

// Content alphabet: signature s uses tokens 2s and 2s+1.
const char* kContentTokens[24] = {"vorak",  "zeliph", "morun",  "tessik", "quilar",
                                  "brodem", "ferrin", "stovak", "lumeri", "gandor",
                                  "perrith","wexal",  "cinthe", "ralork", "dovani",
                                  "mirkel", "santor", "ublix",  "kravon", "delmor",
                                  "ossian", "turvel", "nimbra", "halquor"};

const char* kGarnishTokens[6] = {"eth", "qua", "dor", "ishi", "bel", "oru"};

// Each type carries a primary garnish token (and a secondary one for its
// third phrase variant); phrase lengths stay within 3-4 tokens so same-type
// mentions keep near-identical contexts, while twin types (shared
// signature) differ in garnish identity. The (g + 2k) % 6 keying makes the
// training split of either mode cover all six garnish tokens and keeps twin
// pairs on disjoint garnish.
std::vector<std::vector<std::string>> make_phrases(int signature, int garnish_index) {
  const std::string a = kContentTokens[2 * signature];
  const std::string b = kContentTokens[2 * signature + 1];
  const std::string g = kGarnishTokens[garnish_index % 6];
  const std::string g2 = kGarnishTokens[(garnish_index + 1) % 6];
  // Every phrase starts with the signature's first token and ends with its
  // second; garnish stays internal, and the end token's left neighbor is
  // always the primary garnish. Start and end roles never swap, so
  // boundaries are inferable from token identity alone.
  return {{a, g, b}, {a, g, g, b}, {a, g2, g, b}};
}

std::vector<std::vector<std::string>> default_templates() {
  return {
      {"witnesses", "saw", "{}", "near", "the", "old", "bridge"},
      {"a", "story", "about", "{}", "appeared", "in", "the", "morning", "paper"},
      {"the", "council", "praised", "{}", "after", "the", "vote"},
      {"{}", "announced", "a", "new", "plan", "for", "the", "region"},
      {"the", "crowd", "followed", "{}", "toward", "the", "station"},
      {"officials", "from", "{}", "signed", "the", "accord"},
      {"the", "{}", "delegation", "visited", "{}", "last", "spring"},
      {"{}", "met", "{}", "during", "the", "winter", "fair"},
      {"early", "reports", "from", "{}", "mentioned", "{}", "twice"},
      {"observers", "compared", "{}", "with", "{}", "at", "length"},
      {"{}", "returned", "to", "{}", "without", "warning"},
      {"the", "journal", "profiled", "{}", "and", "{}", "together"},
      {"the", "envoy", "greeted", "{}", "then", "{}", "and", "finally", "{}"},
      {"reporters", "linked", "{}", "with", "{}", "and", "with", "{}"},
  };
}

int slot_count(const std::vector<std::string>& tpl) {
  int n = 0;
  for (const auto& item : tpl) {
    if (item == "{}") ++n;
  }
  return n;
}

// Pool-index pairs whose phrase endpoint tokens overlap (twin types). Such
// pairs are kept out of a single episode's target set: within one episode,
// support mentions of distinct types must remain distinguishable.
std::vector<std::pair<int, int>> collision_pairs(const GeneratorConfig& config,
                                                 const std::vector<int>& pool) {
  std::vector<std::set<std::string>> endpoints;
  for (int idx : pool) {
    std::set<std::string> ends;
    for (const auto& phrase : config.lexicons[static_cast<size_t>(idx)].phrases) {
      ends.insert(phrase.front());
      ends.insert(phrase.back());
    }
    endpoints.push_back(std::move(ends));
  }
  std::vector<std::pair<int, int>> pairs;
  for (size_t a = 0; a < pool.size(); ++a) {
    for (size_t b = a + 1; b < pool.size(); ++b) {
      for (const std::string& tok : endpoints[a]) {
        if (endpoints[b].count(tok) != 0) {
          pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
          break;
        }
      }
    }
  }
  return pairs;
}

}  // namespace

GeneratorConfig default_generator_config(DisjointnessMode mode) {
  GeneratorConfig cfg;
  cfg.mode = mode;
  for (int g = 0; g < 9; ++g) {
    for (int k = 0; k < 3; ++k) {
      TypeLexicon lex;
      lex.coarse = kCoarseGroups[g];
      lex.name = std::string(kCoarseGroups[g]) + "-" + kFineNames[g][k];
      const int signature = mode == DisjointnessMode::intra ? 3 * (g % 4) + k
                                                            : (g + k) % 8;
      lex.phrases = make_phrases(signature, g + 2 * k);
      cfg.lexicons.push_back(std::move(lex));
    }
  }
  cfg.templates = default_templates();
  return cfg;
}

std::vector<int> split_pool(const GeneratorConfig& config) {
  // Coarse groups in first-appearance order.
  std::vector<std::string> groups;
  for (const TypeLexicon& lex : config.lexicons) {
    if (std::find(groups.begin(), groups.end(), lex.coarse) == groups.end()) {
      groups.push_back(lex.coarse);
    }
  }

  std::vector<int> pool;
  if (config.mode == DisjointnessMode::intra) {
    // Whole coarse groups per split: first half train, then a quarter each
    // for dev and test.
    const int g_total = static_cast<int>(groups.size());
    if (g_total < 3) throw ConfigError("intra mode needs at least 3 coarse groups");
    const int g_train = (g_total + 1) / 2;
    const int g_dev = std::max(1, (g_total - g_train) / 2);
    auto group_split = [&](const std::string& coarse) {
      const int gi = static_cast<int>(
          std::find(groups.begin(), groups.end(), coarse) - groups.begin());
      if (gi < g_train) return Split::train;
      if (gi < g_train + g_dev) return Split::dev;
      return Split::test;
    };
    for (size_t i = 0; i < config.lexicons.size(); ++i) {
      if (group_split(config.lexicons[i].coarse) == config.split) {
        pool.push_back(static_cast<int>(i));
      }
    }
  } else {
    // Fine types within each coarse group spread across splits.
    std::map<std::string, int> seen;
    for (size_t i = 0; i < config.lexicons.size(); ++i) {
      const int k = seen[config.lexicons[i].coarse]++;
      const Split s = k == 0 ? Split::train : (k == 1 ? Split::dev : Split::test);
      if (s == config.split) pool.push_back(static_cast<int>(i));
    }
  }
  if (pool.empty()) {
    throw ConfigError("no lexicon types assigned to split " + split_name(config.split));
  }
  return pool;
}

namespace {

struct SlotFill {
  const std::vector<std::string>* phrase;
  int gold_type = -1;                 // index into episode types, -1 = distractor
  std::string distractor_type;
};

// Expands a template, returning the sentence plus one span per slot.
LabeledSentence fill_template(const std::vector<std::string>& tpl,
                              const std::vector<SlotFill>& fills,
                              const std::vector<std::string>& types,
                              std::vector<std::pair<Span, int>>* slot_spans) {
  LabeledSentence s;
  size_t next = 0;
  for (const std::string& item : tpl) {
    if (item != "{}") {
      s.tokens.push_back(item);
      continue;
    }
    const SlotFill& fill = fills[next];
    Span span;
    span.start = static_cast<int>(s.tokens.size());
    for (const std::string& tok : *fill.phrase) s.tokens.push_back(tok);
    span.end = static_cast<int>(s.tokens.size()) - 1;
    slot_spans->emplace_back(span, static_cast<int>(next));
    if (fill.gold_type >= 0) {
      s.mentions.push_back({span, types[static_cast<size_t>(fill.gold_type)]});
    }
    ++next;
  }
  return s;
}

}  // namespace

SyntheticBatch generate_synthetic(const GeneratorConfig& config, uint64_t seed) {
  if (config.ways < 1) throw ConfigError("ways must be >= 1");
  if (config.shots < 1) throw ConfigError("shots must be >= 1");
  if (config.queries_per_episode < 1) throw ConfigError("queries_per_episode must be >= 1");
  if (config.episodes < 0) throw ConfigError("episodes must be >= 0");

  const std::vector<int> pool = split_pool(config);
  const int pool_size = static_cast<int>(pool.size());
  if (config.ways > pool_size) {
    throw ConfigError("ways (" + std::to_string(config.ways) + ") exceeds available lexicon types (" +
                      std::to_string(pool_size) + ") in split " + split_name(config.split));
  }
  if (config.distractor_prob > 0.0 && config.ways >= pool_size) {
    throw ConfigError("distractors need at least one lexicon type outside the episode; "
                      "pool has " + std::to_string(pool_size) + " types for ways=" +
                      std::to_string(config.ways));
  }
  for (int idx : pool) {
    const TypeLexicon& lex = config.lexicons[static_cast<size_t>(idx)];
    if (config.shots > static_cast<int>(lex.phrases.size())) {
      throw ConfigError("shots (" + std::to_string(config.shots) + ") exceeds lexicon size (" +
                        std::to_string(lex.phrases.size()) + ") for type " + lex.name);
    }
  }

  // Index templates by slot count.
  std::vector<std::vector<int>> by_slots(4);
  for (size_t i = 0; i < config.templates.size(); ++i) {
    const int n = slot_count(config.templates[i]);
    if (n >= 1 && n <= 3) by_slots[static_cast<size_t>(n)].push_back(static_cast<int>(i));
  }
  for (int n = 1; n <= 3; ++n) {
    if (by_slots[static_cast<size_t>(n)].empty()) {
      throw ConfigError("template pool has no template with " + std::to_string(n) + " slots");
    }
  }
  auto pick_template = [&](Rng& rng, int slots) -> const std::vector<std::string>& {
    const auto& ids = by_slots[static_cast<size_t>(slots)];
    return config.templates[static_cast<size_t>(ids[static_cast<size_t>(rng_index(
        rng, static_cast<int>(ids.size())))])];
  };

  Rng rng(seed);
  SyntheticBatch batch;
  batch.dataset.split = config.split;
  batch.dataset.empty_input_warning = config.episodes == 0;

  const std::vector<std::pair<int, int>> twins = collision_pairs(config, pool);

  for (int e = 0; e < config.episodes; ++e) {
    Episode ep;
    std::vector<int> chosen;
    for (int attempt = 0;; ++attempt) {
      chosen = rng_sample_distinct(rng, pool_size, config.ways);
      bool clash = false;
      for (const auto& [a, b] : twins) {
        clash = clash ||
                (std::find(chosen.begin(), chosen.end(), a) != chosen.end() &&
                 std::find(chosen.begin(), chosen.end(), b) != chosen.end());
      }
      if (!clash) break;
      if (attempt > 200) {
        throw ConfigError("cannot sample " + std::to_string(config.ways) +
                          " types without a twin collision; pool too small");
      }
    }
    for (int c : chosen) {
      ep.types.push_back(config.lexicons[static_cast<size_t>(pool[static_cast<size_t>(c)])].name);
    }
    std::vector<const TypeLexicon*> lex;
    for (int c : chosen) {
      lex.push_back(&config.lexicons[static_cast<size_t>(pool[static_cast<size_t>(c)])]);
    }

    // Support: exactly `shots` mentions per type, distinct phrases within a
    // type, packed 1-2 mentions per sentence so the extractor also trains on
    // cross-mention negative cells.
    std::vector<SlotFill> slots;
    for (int t = 0; t < config.ways; ++t) {
      const auto& phrases = lex[static_cast<size_t>(t)]->phrases;
      const std::vector<int> phrase_ids =
          rng_sample_distinct(rng, static_cast<int>(phrases.size()), config.shots);
      for (int k = 0; k < config.shots; ++k) {
        SlotFill fill;
        fill.phrase = &phrases[static_cast<size_t>(phrase_ids[static_cast<size_t>(k)])];
        fill.gold_type = t;
        slots.push_back(fill);
      }
    }
    rng_shuffle(rng, slots);
    for (size_t at = 0; at < slots.size();) {
      const int remaining = static_cast<int>(slots.size() - at);
      const int take = remaining >= 2 && rng_bernoulli(rng, 0.5) ? 2 : 1;
      const auto& tpl = pick_template(rng, take);
      std::vector<SlotFill> fills(slots.begin() + static_cast<long>(at),
                                  slots.begin() + static_cast<long>(at) + take);
      std::vector<std::pair<Span, int>> spans;
      ep.support.push_back(fill_template(tpl, fills, ep.types, &spans));
      at += static_cast<size_t>(take);
    }

    // Queries: 1-2 gold mentions plus an optional distractor at a random slot.
    for (int q = 0; q < config.queries_per_episode; ++q) {
      const int n_gold = 1 + rng_index(rng, 2);
      const bool with_distractor = rng_bernoulli(rng, config.distractor_prob);
      const int slots = n_gold + (with_distractor ? 1 : 0);
      const auto& tpl = pick_template(rng, slots);
      const int distractor_slot = with_distractor ? rng_index(rng, slots) : -1;

      std::vector<SlotFill> fills(static_cast<size_t>(slots));
      for (int slot = 0; slot < slots; ++slot) {
        SlotFill& fill = fills[static_cast<size_t>(slot)];
        if (slot == distractor_slot) {
          // Any split type outside the episode's target set.
          int off = rng_index(rng, pool_size - config.ways);
          int pick = -1;
          for (int c = 0; c < pool_size; ++c) {
            if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
            if (off-- == 0) {
              pick = c;
              break;
            }
          }
          const TypeLexicon& dlex = config.lexicons[static_cast<size_t>(pool[static_cast<size_t>(pick)])];
          fill.phrase = &dlex.phrases[static_cast<size_t>(
              rng_index(rng, static_cast<int>(dlex.phrases.size())))];
          fill.distractor_type = dlex.name;
        } else {
          const int t = rng_index(rng, config.ways);
          const auto& phrases = lex[static_cast<size_t>(t)]->phrases;
          fill.phrase = &phrases[static_cast<size_t>(
              rng_index(rng, static_cast<int>(phrases.size())))];
          fill.gold_type = t;
        }
      }
      std::vector<std::pair<Span, int>> spans;
      LabeledSentence sentence = fill_template(tpl, fills, ep.types, &spans);
      if (distractor_slot >= 0) {
        for (const auto& [span, slot] : spans) {
          if (slot == distractor_slot) {
            batch.distractors.push_back(
                {e, q, span, fills[static_cast<size_t>(slot)].distractor_type});
          }
        }
      }
      ep.query.push_back(std::move(sentence));
    }

    ep.validate(e);
    batch.dataset.episodes.push_back(std::move(ep));
  }
  return batch;
}

}  // namespace spanproto
