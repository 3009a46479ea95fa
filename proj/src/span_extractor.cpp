#include "spanproto/span_extractor.hpp"

#include <algorithm>
#include <cmath>

namespace spanproto {

QueryKey project_qk(Tape& tape, Model& model, Var H) {
  Var q = add_rowvec(matmul(H, tape.param(model.params, "scorer.wq")),
                     tape.param(model.params, "scorer.bq"));
  Var k = add_rowvec(matmul(H, tape.param(model.params, "scorer.wk")),
                     tape.param(model.params, "scorer.bk"));
  return QueryKey{q, k};
}

Var score_pairs(Tape& tape, Model& model, Var H, const QueryKey& qk) {
  Var pair_term = matmul_nt(qk.q, qk.k);                          // q_i . k_j
  Var s = matmul(H, tape.param(model.params, "scorer.wv"));       // L x 1
  return add(pair_term, outer_sum(s));                            // + wv.(h_i + h_j)
}

Var score_sentence_on(Tape& tape, Model& model, const LabeledSentence& sentence) {
  Var H = encode_on(tape, model, sentence);
  return score_pairs(tape, model, H, project_qk(tape, model, H));
}

BoundaryMatrix score_sentence(Model& model, const LabeledSentence& sentence) {
  Tape tape;
  Var f = score_sentence_on(tape, model, sentence);
  return BoundaryMatrix{tape.val(f), sentence.length()};
}

Mat target_matrix(const LabeledSentence& sentence) {
  const int n = sentence.length();
  Mat t(n, n);
  for (const Mention& m : sentence.mentions) t(m.span.start, m.span.end) = 1.0;
  return t;
}

Var span_loss(Tape& tape, Var scores, const Mat& target) {
  (void)tape;
  return boundary_loss(scores, target);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<Span> decode(const BoundaryMatrix& scores, const DecodeConfig& config) {
  config.validate();
  std::vector<Span> out;
  for (int i = 0; i < scores.length; ++i) {
    for (int j = i; j < scores.length; ++j) {
      if (sigmoid(scores.scores(i, j)) >= config.theta) out.push_back({i, j});
    }
  }
  return out;
}

}  // namespace spanproto
