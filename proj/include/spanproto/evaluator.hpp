// Two-stage evaluation: decode candidate spans per query sentence, assign
// types by nearest prototype with rejection, score exact (span, type)
// matches, and decompose false positives into FP-Span / FP-Type.
#pragma once

#include <string>
#include <vector>

#include "spanproto/encoder.hpp"
#include "spanproto/episode.hpp"
#include "spanproto/mention_classifier.hpp"
#include "spanproto/span_extractor.hpp"

namespace spanproto {

struct EvalConfig {
  DecodeConfig decode;
  MarginConfig margin;
};

struct EpisodeEval {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct ErrorBreakdown {
  int fp_span = 0;  // boundary matches no gold span
  int fp_type = 0;  // boundary matches a gold span, type differs
  double fp_span_pct = 0;
  double fp_type_pct = 0;
  bool no_false_positives = true;
};

struct EvalReport {
  double precision = 0;  // micro over all query mentions
  double recall = 0;
  double f1 = 0;
  double macro_f1 = 0;  // episode-macro, secondary
  int tp = 0;
  int fp = 0;
  int fn = 0;
  ErrorBreakdown errors;
  long rejected_spans = 0;
  std::vector<EpisodeEval> per_episode;
};

// P, R, F1 with the 0/0 -> 0 convention.
void fill_prf(int tp, int fp, int fn, double* p, double* r, double* f1);

// FP-Span / FP-Type percentages for one sentence's deduplicated predictions
// against its gold mentions.
ErrorBreakdown error_analysis(const std::vector<Mention>& predictions,
                              const std::vector<Mention>& gold);

EvalReport evaluate(const EpisodeDataset& data, Model& model, const EvalConfig& config);

std::string eval_report_json(const EvalReport& report);

}  // namespace spanproto
