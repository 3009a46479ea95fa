// Class-agnostic span extraction over a global boundary matrix: query/key
// projections, pair scoring, the binary target matrix, the boundary loss,
// and threshold decoding.
#pragma once

#include <vector>

#include "spanproto/encoder.hpp"
#include "spanproto/episode.hpp"
#include "spanproto/tape.hpp"

namespace spanproto {

// Raw pair scores f(i, j) on the upper triangle (i <= j). Lower-triangle
// entries are masked: never written with meaning, never read.
struct BoundaryMatrix {
  Mat scores;
  int length = 0;
};

struct DecodeConfig {
  double theta = 0.8;  // confidence threshold on sigmoid(f)

  void validate() const {
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must be in (0, 1)");
  }
};

struct QueryKey {
  Var q;
  Var k;
};

// q_i = Wq h_i + bq, k_i = Wk h_i + bk (scorer parameters).
QueryKey project_qk(Tape& tape, Model& model, Var H);

// f(i, j) = q_i . k_j + wv . (h_i + h_j); full matrix built, upper triangle
// meaningful.
Var score_pairs(Tape& tape, Model& model, Var H, const QueryKey& qk);

// Convenience: encode + project + score, with the graph kept on `tape`.
Var score_sentence_on(Tape& tape, Model& model, const LabeledSentence& sentence);

// Forward-only scores for decoding/inspection.
BoundaryMatrix score_sentence(Model& model, const LabeledSentence& sentence);

// Binary target: 1 on gold mention cells, 0 elsewhere in the upper triangle.
Mat target_matrix(const LabeledSentence& sentence);

// Span loss over one sentence (upper triangle only, log-sum-exp stable).
Var span_loss(Tape& tape, Var scores, const Mat& target);

double sigmoid(double x);

// All spans (i, j), i <= j, with sigmoid(f(i, j)) >= theta. Nested and
// overlapping spans are all kept; no suppression.
std::vector<Span> decode(const BoundaryMatrix& scores, const DecodeConfig& config);

}  // namespace spanproto
