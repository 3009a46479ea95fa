#include "spanproto/evaluator.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace spanproto {

void fill_prf(int tp, int fp, int fn, double* p, double* r, double* f1) {
  *p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
  *r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
  *f1 = *p + *r == 0.0 ? 0.0 : 2.0 * *p * *r / (*p + *r);
}

ErrorBreakdown error_analysis(const std::vector<Mention>& predictions,
                              const std::vector<Mention>& gold) {
  std::set<std::pair<std::pair<int, int>, std::string>> gold_exact;
  std::set<std::pair<int, int>> gold_bounds;
  for (const Mention& m : gold) {
    gold_exact.insert({{m.span.start, m.span.end}, m.type});
    gold_bounds.insert({m.span.start, m.span.end});
  }

  ErrorBreakdown out;
  for (const Mention& m : predictions) {
    if (gold_exact.count({{m.span.start, m.span.end}, m.type}) != 0) continue;  // TP
    if (gold_bounds.count({m.span.start, m.span.end}) != 0) {
      ++out.fp_type;
    } else {
      ++out.fp_span;
    }
  }
  const int total = out.fp_span + out.fp_type;
  out.no_false_positives = total == 0;
  if (total > 0) {
    out.fp_span_pct = 100.0 * out.fp_span / total;
    out.fp_type_pct = 100.0 * out.fp_type / total;
  }
  return out;
}

EvalReport evaluate(const EpisodeDataset& data, Model& model, const EvalConfig& config) {
  config.decode.validate();
  config.margin.validate();

  EvalReport report;
  double macro_sum = 0.0;
  for (size_t e = 0; e < data.episodes.size(); ++e) {
    const Episode& ep = data.episodes[e];
    ep.validate(static_cast<int>(e));
    const PrototypeSet prototypes = compute_prototype_values(model, ep);

    EpisodeEval ee;
    for (const LabeledSentence& q : ep.query) {
      Tape tape;
      Var hv = encode_on(tape, model, q);
      Var fv = score_pairs(tape, model, hv, project_qk(tape, model, hv));
      const Mat& H = tape.val(hv);
      const BoundaryMatrix scores{tape.val(fv), q.length()};
      const std::vector<Span> candidates = decode(scores, config.decode);

      // Deduplicated (span, type) predictions; rejected spans drop out.
      std::set<std::pair<std::pair<int, int>, std::string>> predicted;
      for (const Span& sp : candidates) {
        const Mat u = span_representation_values(H, {sp});
        const Classification c = classify(u, prototypes, config.margin);
        if (c.rejected) {
          ++report.rejected_spans;
          continue;
        }
        predicted.insert({{sp.start, sp.end},
                          prototypes.types[static_cast<size_t>(c.type_index)]});
      }

      std::vector<Mention> pred_mentions;
      for (const auto& [bounds, type] : predicted) {
        pred_mentions.push_back({{bounds.first, bounds.second}, type});
      }

      std::set<std::pair<std::pair<int, int>, std::string>> gold;
      for (const Mention& m : q.mentions) {
        gold.insert({{m.span.start, m.span.end}, m.type});
      }
      int tp = 0;
      for (const auto& pm : predicted) {
        if (gold.count(pm) != 0) ++tp;
      }
      ee.tp += tp;
      ee.fp += static_cast<int>(predicted.size()) - tp;
      ee.fn += static_cast<int>(gold.size()) - tp;

      const ErrorBreakdown eb = error_analysis(pred_mentions, q.mentions);
      report.errors.fp_span += eb.fp_span;
      report.errors.fp_type += eb.fp_type;
    }
    fill_prf(ee.tp, ee.fp, ee.fn, &ee.precision, &ee.recall, &ee.f1);
    macro_sum += ee.f1;
    report.tp += ee.tp;
    report.fp += ee.fp;
    report.fn += ee.fn;
    report.per_episode.push_back(ee);
  }

  fill_prf(report.tp, report.fp, report.fn, &report.precision, &report.recall, &report.f1);
  report.macro_f1 = report.per_episode.empty()
                        ? 0.0
                        : macro_sum / static_cast<double>(report.per_episode.size());
  const int fp_total = report.errors.fp_span + report.errors.fp_type;
  report.errors.no_false_positives = fp_total == 0;
  if (fp_total > 0) {
    report.errors.fp_span_pct = 100.0 * report.errors.fp_span / fp_total;
    report.errors.fp_type_pct = 100.0 * report.errors.fp_type / fp_total;
  } else {
    report.errors.fp_span_pct = 0.0;
    report.errors.fp_type_pct = 0.0;
  }
  return report;
}

std::string eval_report_json(const EvalReport& report) {
  nlohmann::json j;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["macro_f1"] = report.macro_f1;
  j["tp"] = report.tp;
  j["fp"] = report.fp;
  j["fn"] = report.fn;
  j["fp_span"] = report.errors.fp_span;
  j["fp_type"] = report.errors.fp_type;
  j["fp_span_pct"] = report.errors.fp_span_pct;
  j["fp_type_pct"] = report.errors.fp_type_pct;
  j["no_false_positives"] = report.errors.no_false_positives;
  j["rejected_spans"] = report.rejected_spans;
  nlohmann::json eps = nlohmann::json::array();
  for (const EpisodeEval& ee : report.per_episode) {
    eps.push_back({{"tp", ee.tp},
                   {"fp", ee.fp},
                   {"fn", ee.fn},
                   {"precision", ee.precision},
                   {"recall", ee.recall},
                   {"f1", ee.f1}});
  }
  j["per_episode"] = std::move(eps);
  return j.dump(2);
}

}  // namespace spanproto
