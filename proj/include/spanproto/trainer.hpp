// Episodic training loop: span-extractor pretraining phase, joint loss
// assembly over one sampled episode per step, and optimizer stepping.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spanproto/encoder.hpp"
#include "spanproto/episode.hpp"
#include "spanproto/mention_classifier.hpp"
#include "spanproto/optimizer.hpp"
#include "spanproto/span_extractor.hpp"

namespace spanproto {

struct TrainConfig {
  int total_steps = 2000;    // T
  int pretrain_steps = 200;  // T', span extractor only while step < T'
  OptimizerConfig optimizer;
  DecodeConfig decode;
  MarginConfig margin;
  EncoderConfig encoder;
  uint64_t seed = 42;
  int episodes_per_step = 1;
  int checkpoint_every = 500;
  std::string checkpoint_dir;  // empty: no checkpoints written
  std::string log_path;        // empty: no step log written
  std::string log_header;      // written as the first log line when set

  void validate() const {
    if (total_steps < 1) throw ConfigError("total_steps must be >= 1");
    if (pretrain_steps < 0 || pretrain_steps >= total_steps) {
      throw ConfigError("pretrain_steps must satisfy 0 <= T' < T");
    }
    if (episodes_per_step < 1) throw ConfigError("episodes_per_step must be >= 1");
    if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be >= 1");
    decode.validate();
    margin.validate();
    encoder.validate();
  }
};

// One record per (step, sampled episode).
struct StepReport {
  int step = 0;       // 1-based
  double lambda = 0;  // 0 during pretraining, 1 after
  int episode_index = 0;
  int n_support = 0;
  int n_query = 0;
  double span_loss_sum = 0;    // over support sentences
  double proto_loss_sum = 0;   // over query sentences
  double margin_loss_sum = 0;  // over query sentences
  std::vector<int> fp_sizes;   // |M_q^-| per query sentence
  double total = 0;            // assembled episode loss
};

struct TrainResult {
  Model model;
  std::vector<StepReport> reports;
};

// L = (1/|S|) * sum L_span + (lambda/|Q|) * (sum L_proto + sum L_mrg)
double loss_assembly(double span_sum, double proto_sum, double margin_sum, int n_support,
                     int n_query, double lambda);

TrainResult train(const EpisodeDataset& data, const TrainConfig& config);

std::string step_report_json(const StepReport& r);

}  // namespace spanproto
