// Episode data model: sentences with labeled mention spans, grouped into
// N-way K-shot episodes (support + query + target type list), plus the
// JSONL episode file format.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spanproto/error.hpp"

namespace spanproto {

// Token span, 0-based inclusive on both ends.
struct Span {
  int start = 0;
  int end = 0;

  bool operator==(const Span& o) const { return start == o.start && end == o.end; }
  bool operator<(const Span& o) const {
    return start != o.start ? start < o.start : end < o.end;
  }
};

struct Mention {
  Span span;
  std::string type;

  bool operator==(const Mention& o) const { return span == o.span && type == o.type; }
};

struct LabeledSentence {
  std::vector<std::string> tokens;
  std::vector<Mention> mentions;

  int length() const { return static_cast<int>(tokens.size()); }
  bool operator==(const LabeledSentence& o) const {
    return tokens == o.tokens && mentions == o.mentions;
  }

  std::vector<Span> gold_spans() const;
};

struct Episode {
  std::vector<std::string> types;
  std::vector<LabeledSentence> support;
  std::vector<LabeledSentence> query;

  bool operator==(const Episode& o) const {
    return types == o.types && support == o.support && query == o.query;
  }

  int type_index(const std::string& name) const;  // -1 if absent

  // Throws ValidationError naming the episode index and offending field.
  void validate(int episode_index) const;
};

enum class Split { train, dev, test };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct EpisodeDataset {
  std::vector<Episode> episodes;
  Split split = Split::train;
  bool empty_input_warning = false;

  bool operator==(const EpisodeDataset& o) const {
    return episodes == o.episodes && split == o.split;
  }
};

// One JSON object per line:
//   {"types":[...], "support":[{"tokens":[...], "spans":[[s,e,"TYPE"],...]}, ...],
//    "query":[...]}
// Spans are 0-based inclusive. All episode invariants are enforced on read.
EpisodeDataset read_episodes(const std::string& path, Split split = Split::train);

void write_episodes(const EpisodeDataset& dataset, const std::string& path);

// Exposed so tests and the synthetic generator share one sentence check.
void validate_sentence(const LabeledSentence& s, int episode_index, const char* role,
                       int sentence_index, const std::vector<std::string>& types);

}  // namespace spanproto
