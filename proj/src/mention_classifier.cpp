#include "spanproto/mention_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace spanproto {

Var span_representations(Tape& tape, Var H, const std::vector<Span>& spans) {
  (void)tape;  // all graph ops thread the tape; H already carries it
  std::vector<int> starts, ends;
  starts.reserve(spans.size());
  ends.reserve(spans.size());
  for (const Span& sp : spans) {
    if (sp.start < 0 || sp.start > sp.end || sp.end >= H.rows) {
      throw ValidationError("span_representation: span [" + std::to_string(sp.start) +
                            ", " + std::to_string(sp.end) + "] out of range for length " +
                            std::to_string(H.rows));
    }
    starts.push_back(sp.start);
    ends.push_back(sp.end);
  }
  return add(gather_rows(H, std::move(starts)), gather_rows(H, std::move(ends)));
}

PrototypeVar compute_prototypes(Tape& tape, const std::vector<EncodedSupport>& support,
                                const std::vector<std::string>& types) {
  const int n_types = static_cast<int>(types.size());
  std::vector<Var> reps;
  std::vector<int> groups;
  for (const EncodedSupport& s : support) {
    if (s.sentence->mentions.empty()) continue;
    std::vector<Span> spans;
    for (const Mention& m : s.sentence->mentions) {
      spans.push_back(m.span);
      auto it = std::find(types.begin(), types.end(), m.type);
      if (it == types.end()) {
        throw ValidationError("compute_prototypes: mention type \"" + m.type +
                              "\" not in episode types");
      }
      groups.push_back(static_cast<int>(it - types.begin()));
    }
    reps.push_back(span_representations(tape, s.H, spans));
  }

  std::vector<int> counts(static_cast<size_t>(n_types), 0);
  for (int g : groups) ++counts[static_cast<size_t>(g)];
  for (int t = 0; t < n_types; ++t) {
    if (counts[static_cast<size_t>(t)] == 0) {
      throw ValidationError("compute_prototypes: prototype undefined, type \"" +
                            types[static_cast<size_t>(t)] + "\" has no support span");
    }
  }

  PrototypeVar out;
  out.types = types;
  out.counts = counts;
  out.centroids = group_mean(concat_rows(reps), std::move(groups), n_types);
  (void)tape;
  return out;
}

Var proto_loss(Tape& tape, Var gold_reps, const std::vector<int>& gold_types,
               const PrototypeVar& prototypes) {
  if (gold_types.empty()) return tape.scalar(0.0);
  return nll_of_neg_distance(pairwise_dist(gold_reps, prototypes.centroids), gold_types);
}

std::vector<Span> false_positive_set(const std::vector<Span>& predicted,
                                     const std::vector<Span>& gold) {
  std::set<Span> gold_set(gold.begin(), gold.end());
  std::set<Span> out;
  for (const Span& sp : predicted) {
    if (gold_set.count(sp) == 0) out.insert(sp);
  }
  return {out.begin(), out.end()};
}

Var margin_loss(Tape& tape, Var fp_reps, int fp_count, const PrototypeVar& prototypes,
                const MarginConfig& config) {
  config.validate();
  if (!config.margin_enabled || fp_count == 0) return tape.scalar(0.0);
  return hinge_mean(pairwise_dist(fp_reps, prototypes.centroids), config.radius);
}

Classification classify(const Mat& u, const PrototypeSet& prototypes,
                        const MarginConfig& config) {
  config.validate();
  if (prototypes.type_count() == 0) {
    throw ValidationError("classify: empty prototype set");
  }
  Classification out;
  out.type_index = 0;
  out.min_distance = 0.0;
  for (int t = 0; t < prototypes.type_count(); ++t) {
    double s = 0.0;
    for (int k = 0; k < u.cols; ++k) {
      const double d = u(0, k) - prototypes.centroids(t, k);
      s += d * d;
    }
    const double dist = std::sqrt(s);
    if (t == 0 || dist < out.min_distance) {
      out.min_distance = dist;
      out.type_index = t;
    }
  }
  out.rejected = out.min_distance > config.radius;
  return out;
}

Mat span_representation_values(const Mat& H, const std::vector<Span>& spans) {
  Mat out(static_cast<int>(spans.size()), H.cols);
  for (size_t i = 0; i < spans.size(); ++i) {
    const Span& sp = spans[i];
    if (sp.start < 0 || sp.start > sp.end || sp.end >= H.rows) {
      throw ValidationError("span_representation: span out of range");
    }
    for (int k = 0; k < H.cols; ++k) {
      out(static_cast<int>(i), k) = H(sp.start, k) + H(sp.end, k);
    }
  }
  return out;
}

PrototypeSet compute_prototype_values(Model& model, const Episode& episode) {
  Tape tape;
  std::vector<EncodedSupport> support;
  support.reserve(episode.support.size());
  for (const LabeledSentence& s : episode.support) {
    support.push_back({encode_on(tape, model, s), &s});
  }
  PrototypeVar proto = compute_prototypes(tape, support, episode.types);
  return PrototypeSet{proto.types, tape.val(proto.centroids), proto.counts};
}

}  // namespace spanproto
