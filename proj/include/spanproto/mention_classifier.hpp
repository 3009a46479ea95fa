// Mention classification: span boundary representations, per-type
// prototypes, the prototypical and margin losses, and nearest-prototype
// type assignment with distance-based rejection.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spanproto/encoder.hpp"
#include "spanproto/episode.hpp"
#include "spanproto/tape.hpp"

namespace spanproto {

struct MarginConfig {
  double radius = 3.0;        // margin r, reused as the rejection radius
  bool margin_enabled = true;

  void validate() const {
    if (radius <= 0.0) throw ConfigError("margin radius must be > 0");
  }
};

// Value-level prototype set used by evaluation and inspection.
struct PrototypeSet {
  std::vector<std::string> types;  // episode order
  Mat centroids;                   // N x h
  std::vector<int> counts;         // K_t

  int type_count() const { return static_cast<int>(types.size()); }
};

// Graph-level prototype set used in training.
struct PrototypeVar {
  std::vector<std::string> types;
  Var centroids;
  std::vector<int> counts;
};

// u = h_start + h_end, one row per span.
Var span_representations(Tape& tape, Var H, const std::vector<Span>& spans);

// One support sentence's encoded H plus its gold mentions.
struct EncodedSupport {
  Var H;
  const LabeledSentence* sentence;
};

// c_t = mean of u over support mentions with type t. Every episode type
// must own at least one support mention.
PrototypeVar compute_prototypes(Tape& tape, const std::vector<EncodedSupport>& support,
                                const std::vector<std::string>& types);

// Mean over gold mentions of -log softmax_t(-d(u, c_t)) at the gold type.
// Zero for an empty mention list.
Var proto_loss(Tape& tape, Var gold_reps, const std::vector<int>& gold_types,
               const PrototypeVar& prototypes);

// Exact set difference predicted \ gold on (start, end) pairs, sorted.
std::vector<Span> false_positive_set(const std::vector<Span>& predicted,
                                     const std::vector<Span>& gold);

// (1 / (|T| * |fp|)) sum_t sum_fp max(0, r - d(u, c_t)); zero when the fp
// list is empty or the margin objective is disabled.
Var margin_loss(Tape& tape, Var fp_reps, int fp_count, const PrototypeVar& prototypes,
                const MarginConfig& config);

struct Classification {
  bool rejected = false;
  int type_index = -1;      // valid when !rejected
  double min_distance = 0;  // distance to the nearest prototype
};

// Nearest prototype with rejection: REJECTED when min_t d(u, c_t) > r.
// Ties break toward the earlier type in episode order.
Classification classify(const Mat& u, const PrototypeSet& prototypes,
                        const MarginConfig& config);

// Value-level helpers for the evaluation path.
Mat span_representation_values(const Mat& H, const std::vector<Span>& spans);
PrototypeSet compute_prototype_values(Model& model, const Episode& episode);

}  // namespace spanproto
