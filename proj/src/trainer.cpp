#include "spanproto/trainer.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "spanproto/checkpoint.hpp"
#include "spanproto/rng.hpp"

namespace spanproto {

double loss_assembly(double span_sum, double proto_sum, double margin_sum, int n_support,
                     int n_query, double lambda) {
  if (n_support < 1 || n_query < 1) throw ValidationError("loss_assembly: |S|, |Q| >= 1");
  return span_sum / n_support + lambda / n_query * (proto_sum + margin_sum);
}

std::string step_report_json(const StepReport& r) {
  nlohmann::json j;
  j["step"] = r.step;
  j["lambda"] = r.lambda;
  j["episode"] = r.episode_index;
  j["n_support"] = r.n_support;
  j["n_query"] = r.n_query;
  j["span_loss"] = r.span_loss_sum;
  j["proto_loss"] = r.proto_loss_sum;
  j["margin_loss"] = r.margin_loss_sum;
  j["fp_sizes"] = r.fp_sizes;
  j["total"] = r.total;
  return j.dump();
}

namespace {

// Builds the loss graph for one episode and fills the report. Returns the
// assembled episode loss var.
Var episode_loss(Tape& tape, Model& model, const Episode& episode, double lambda,
                 const DecodeConfig& decode_cfg, const MarginConfig& margin_cfg,
                 StepReport* report) {
  const int n_support = static_cast<int>(episode.support.size());
  const int n_query = static_cast<int>(episode.query.size());

  // Support: span losses and prototype inputs.
  std::vector<EncodedSupport> encoded_support;
  Var span_sum = tape.scalar(0.0);
  for (const LabeledSentence& s : episode.support) {
    Var H = encode_on(tape, model, s);
    Var f = score_pairs(tape, model, H, project_qk(tape, model, H));
    span_sum = add(span_sum, span_loss(tape, f, target_matrix(s)));
    encoded_support.push_back({H, &s});
  }
  PrototypeVar prototypes = compute_prototypes(tape, encoded_support, episode.types);

  // Queries: prototypical loss on gold mentions, margin loss on the false
  // positives proposed by the current extractor.
  Var proto_sum = tape.scalar(0.0);
  Var margin_sum = tape.scalar(0.0);
  for (const LabeledSentence& q : episode.query) {
    Var H = encode_on(tape, model, q);

    std::vector<Span> gold_spans;
    std::vector<int> gold_types;
    for (const Mention& m : q.mentions) {
      gold_spans.push_back(m.span);
      gold_types.push_back(episode.type_index(m.type));
    }
    if (!gold_spans.empty()) {
      Var reps = span_representations(tape, H, gold_spans);
      proto_sum = add(proto_sum, proto_loss(tape, reps, gold_types, prototypes));
    }

    // Decode is a selection over forward values; gradients flow through the
    // chosen spans' representations only.
    Var f = score_pairs(tape, model, H, project_qk(tape, model, H));
    const std::vector<Span> predicted =
        decode(BoundaryMatrix{tape.val(f), q.length()}, decode_cfg);
    const std::vector<Span> fp = false_positive_set(predicted, q.gold_spans());
    report->fp_sizes.push_back(static_cast<int>(fp.size()));
    if (!fp.empty() && margin_cfg.margin_enabled) {
      Var fp_reps = span_representations(tape, H, fp);
      margin_sum = add(margin_sum,
                       margin_loss(tape, fp_reps, static_cast<int>(fp.size()), prototypes,
                                   margin_cfg));
    }
  }

  report->n_support = n_support;
  report->n_query = n_query;
  report->span_loss_sum = tape.val(span_sum)(0, 0);
  report->proto_loss_sum = tape.val(proto_sum)(0, 0);
  report->margin_loss_sum = tape.val(margin_sum)(0, 0);

  Var total = add(scale(span_sum, 1.0 / n_support),
                  scale(add(proto_sum, margin_sum), lambda / n_query));
  report->total = tape.val(total)(0, 0);
  return total;
}

}  // namespace

TrainResult train(const EpisodeDataset& data, const TrainConfig& config) {
  config.validate();
  if (data.episodes.empty()) throw ValidationError("train: empty dataset");
  for (size_t i = 0; i < data.episodes.size(); ++i) {
    data.episodes[i].validate(static_cast<int>(i));
  }

  OptimizerConfig opt_cfg = config.optimizer;
  opt_cfg.total_steps = config.total_steps;

  TrainResult result;
  result.model = init_model(config.encoder, Vocabulary::build(data), config.seed);
  AdamW optimizer(opt_cfg);
  Rng sampler(config.seed ^ 0x9e3779b97f4a7c15ULL);

  std::ofstream log;
  if (!config.log_path.empty()) {
    log.open(config.log_path);
    if (!log) throw IoError("cannot open training log: " + config.log_path);
    if (!config.log_header.empty()) log << config.log_header << "\n";
  }

  const int n_episodes = static_cast<int>(data.episodes.size());
  for (int st = 1; st <= config.total_steps; ++st) {
    const double lambda = st < config.pretrain_steps ? 0.0 : 1.0;

    Tape tape;
    Var batch_total = tape.scalar(0.0);
    std::vector<StepReport> step_reports;
    for (int b = 0; b < config.episodes_per_step; ++b) {
      const int idx = rng_index(sampler, n_episodes);
      StepReport report;
      report.step = st;
      report.lambda = lambda;
      report.episode_index = idx;
      Var total = episode_loss(tape, result.model, data.episodes[static_cast<size_t>(idx)],
                               lambda, config.decode, config.margin, &report);
      if (!std::isfinite(report.total)) {
        throw std::runtime_error("train: non-finite loss at step " + std::to_string(st) +
                                 "; report: " + step_report_json(report));
      }
      batch_total = add(batch_total, total);
      step_reports.push_back(std::move(report));
    }
    if (config.episodes_per_step > 1) {
      batch_total = scale(batch_total, 1.0 / config.episodes_per_step);
    }

    result.model.params.zero_grads();
    tape.backward(batch_total);
    optimizer.step(result.model.params, st - 1);

    for (StepReport& r : step_reports) {
      if (log.is_open()) log << step_report_json(r) << "\n";
      result.reports.push_back(std::move(r));
    }

    if (!config.checkpoint_dir.empty() &&
        (st % config.checkpoint_every == 0 || st == config.total_steps)) {
      save_checkpoint(result.model,
                      config.checkpoint_dir + "/checkpoint_" + std::to_string(st) + ".json");
    }
  }
  return result;
}

}  // namespace spanproto
