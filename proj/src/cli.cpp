#include "spanproto/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spanproto/checkpoint.hpp"
#include "spanproto/evaluator.hpp"
#include "spanproto/mention_classifier.hpp"
#include "spanproto/span_extractor.hpp"
#include "spanproto/synthetic.hpp"
#include "spanproto/trainer.hpp"

namespace spanproto::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot hash missing file: " + path);
  uint64_t h = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setfill('0') << std::setw(16) << v;
  return os.str();
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
#if defined(_WIN32)
  localtime_s(&tm, &t);
#else
  localtime_r(&t, &tm);
#endif
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%d-%H%M%S");
  return os.str();
}

fs::path make_run_dir(const std::string& parent, uint64_t seed) {
  fs::create_directories(parent);
  fs::path base = fs::path(parent) / ("run-" + timestamp_now() + "-seed" + std::to_string(seed));
  fs::path dir = base;
  for (int k = 2; fs::exists(dir); ++k) dir = base.string() + "-" + std::to_string(k);
  fs::create_directories(dir);
  return dir;
}

std::string data_dir_default() {
  const char* env = std::getenv("SPANPROTO_DATA_DIR");
  return env != nullptr ? std::string(env) : std::string("data");
}

// Every resolved knob needed to reproduce a run, plus paths/seed.
struct RunSettings {
  TrainConfig train;
  double distractor_prob = 0.3;
  std::string mode = "inter";
  int ways = 5, shots = 1, queries = 2, episodes = 50, eval_episodes = 20;

  json to_json() const {
    json j;
    j["steps"] = train.total_steps;
    j["pretrain_steps"] = train.pretrain_steps;
    j["learning_rate"] = train.optimizer.learning_rate;
    j["warmup_fraction"] = train.optimizer.warmup_fraction;
    j["weight_decay"] = train.optimizer.weight_decay;
    j["theta"] = train.decode.theta;
    j["radius"] = train.margin.radius;
    j["margin_enabled"] = train.margin.margin_enabled;
    j["embedding_dim"] = train.encoder.embedding_dim;
    j["mixing_layers"] = train.encoder.mixing_layers;
    j["max_len"] = train.encoder.max_len;
    j["seed"] = train.seed;
    j["episodes_per_step"] = train.episodes_per_step;
    j["checkpoint_every"] = train.checkpoint_every;
    return j;
  }
};

void apply_config_file(RunSettings* s, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("config parse error: " + path + ": " + e.what());
  }
  auto get = [&](const char* key, auto* out) {
    if (j.contains(key)) *out = j.at(key).get<std::remove_pointer_t<decltype(out)>>();
  };
  get("steps", &s->train.total_steps);
  get("pretrain_steps", &s->train.pretrain_steps);
  get("learning_rate", &s->train.optimizer.learning_rate);
  get("warmup_fraction", &s->train.optimizer.warmup_fraction);
  get("weight_decay", &s->train.optimizer.weight_decay);
  get("theta", &s->train.decode.theta);
  get("radius", &s->train.margin.radius);
  get("margin_enabled", &s->train.margin.margin_enabled);
  get("embedding_dim", &s->train.encoder.embedding_dim);
  get("mixing_layers", &s->train.encoder.mixing_layers);
  get("max_len", &s->train.encoder.max_len);
  get("seed", &s->train.seed);
  get("episodes_per_step", &s->train.episodes_per_step);
  get("checkpoint_every", &s->train.checkpoint_every);
}

GeneratorConfig load_pool(const std::string& path, DisjointnessMode mode) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pool file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("pool parse error: " + path + ": " + e.what());
  }
  GeneratorConfig cfg;
  cfg.mode = mode;
  for (const auto& lj : j.at("lexicons")) {
    TypeLexicon lex;
    lex.name = lj.at("name").get<std::string>();
    lex.coarse = lj.at("coarse").get<std::string>();
    for (const auto& pj : lj.at("phrases")) {
      lex.phrases.push_back(pj.get<std::vector<std::string>>());
    }
    cfg.lexicons.push_back(std::move(lex));
  }
  for (const auto& tj : j.at("templates")) {
    cfg.templates.push_back(tj.get<std::vector<std::string>>());
  }
  return cfg;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

json distractors_json(const std::vector<DistractorRecord>& records) {
  json arr = json::array();
  for (const DistractorRecord& d : records) {
    arr.push_back({{"episode", d.episode},
                   {"query_sentence", d.query_sentence},
                   {"span", {d.span.start, d.span.end}},
                   {"true_type", d.true_type}});
  }
  return arr;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

int cmd_generate(const GeneratorConfig& base, uint64_t seed, int train_episodes,
                 int eval_episodes, const std::string& out_dir, bool emit_distractors) {
  fs::create_directories(out_dir);
  json echo;
  echo["command"] = "generate";
  echo["seed"] = seed;
  echo["mode"] = mode_name(base.mode);
  echo["ways"] = base.ways;
  echo["shots"] = base.shots;
  echo["queries_per_episode"] = base.queries_per_episode;
  echo["distractor_prob"] = base.distractor_prob;
  echo["train_episodes"] = train_episodes;
  echo["eval_episodes"] = eval_episodes;

  const Split splits[3] = {Split::train, Split::dev, Split::test};
  for (int i = 0; i < 3; ++i) {
    GeneratorConfig cfg = base;
    cfg.split = splits[i];
    cfg.episodes = splits[i] == Split::train ? train_episodes : eval_episodes;
    const SyntheticBatch batch = generate_synthetic(cfg, seed + static_cast<uint64_t>(i));
    const std::string name = split_name(splits[i]);
    const fs::path path = fs::path(out_dir) / (name + ".jsonl");
    write_episodes(batch.dataset, path.string());
    echo["outputs"][name] = {{"path", path.string()},
                             {"episodes", batch.dataset.episodes.size()},
                             {"fnv1a64", hex64(fnv1a64_file(path.string()))}};
    if (emit_distractors) {
      write_text(fs::path(out_dir) / (name + ".distractors.json"),
                 distractors_json(batch.distractors).dump(2));
    }
    std::cout << "wrote " << path.string() << " (" << batch.dataset.episodes.size()
              << " episodes)\n";
  }
  write_text(fs::path(out_dir) / "generate_config.json", echo.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

json config_echo(const RunSettings& s, const std::string& train_path,
                 const std::string& eval_path) {
  json echo;
  echo["command"] = "train";
  echo["config"] = s.to_json();
  echo["inputs"]["train"] = {{"path", train_path},
                             {"fnv1a64", hex64(fnv1a64_file(train_path))}};
  if (!eval_path.empty()) {
    echo["inputs"]["eval"] = {{"path", eval_path},
                              {"fnv1a64", hex64(fnv1a64_file(eval_path))}};
  }
  return echo;
}

struct RunOutcome {
  double final_loss_avg = 0;  // 100-step moving average at T
  double eval_f1 = -1;        // -1 when no eval file given
};

RunOutcome run_one_training(RunSettings s, const std::string& train_path,
                            const std::string& eval_path, const std::string& out_parent) {
  const EpisodeDataset data = read_episodes(train_path, Split::train);
  const fs::path run_dir = make_run_dir(out_parent, s.train.seed);
  s.train.checkpoint_dir = run_dir.string();
  s.train.log_path = (run_dir / "train_log.jsonl").string();

  const json echo = config_echo(s, train_path, eval_path);
  write_text(run_dir / "config_echo.json", echo.dump(2) + "\n");

  json header;
  header["header"] = {{"T", s.train.total_steps},
                      {"T_prime", s.train.pretrain_steps},
                      {"theta", s.train.decode.theta},
                      {"r", s.train.margin.radius},
                      {"margin_enabled", s.train.margin.margin_enabled},
                      {"seed", s.train.seed}};
  std::cout << header.dump() << "\n";

  TrainConfig cfg = s.train;
  cfg.log_header = header.dump();
  TrainResult result = train(data, cfg);
  save_checkpoint(result.model, (run_dir / "checkpoint_final.json").string());

  RunOutcome outcome;
  const int window = std::min<int>(100, static_cast<int>(result.reports.size()));
  double sum = 0;
  for (int i = 0; i < window; ++i) {
    sum += result.reports[result.reports.size() - 1 - static_cast<size_t>(i)].total;
  }
  outcome.final_loss_avg = window > 0 ? sum / window : 0.0;
  std::cout << "run_dir " << run_dir.string() << "\n";
  std::cout << "final_step " << result.reports.back().step << " total "
            << result.reports.back().total << " avg100 " << outcome.final_loss_avg << "\n";

  if (!eval_path.empty()) {
    const EpisodeDataset eval_data = read_episodes(eval_path, Split::test);
    EvalConfig ec;
    ec.decode = s.train.decode;
    ec.margin = s.train.margin;
    const EvalReport report = evaluate(eval_data, result.model, ec);
    outcome.eval_f1 = report.f1;
    write_text(run_dir / "eval_report.json", eval_report_json(report) + "\n");
    std::cout << "eval P " << report.precision << " R " << report.recall << " F1 "
              << report.f1 << "\n";
  }
  return outcome;
}

int cmd_train(RunSettings s, const std::string& train_path, const std::string& eval_path,
              const std::string& out_parent, const std::vector<uint64_t>& seeds,
              const std::string& sweep_path) {
  if (!sweep_path.empty()) {
    std::ifstream in(sweep_path);
    if (!in) throw IoError("cannot open sweep grid: " + sweep_path);
    json grid;
    in >> grid;
    // Cartesian product over the grid axes, applied on top of the settings.
    std::vector<std::pair<std::string, std::vector<json>>> axes;
    for (auto it = grid.begin(); it != grid.end(); ++it) {
      axes.emplace_back(it.key(), std::vector<json>(it.value().begin(), it.value().end()));
    }
    std::vector<size_t> at(axes.size(), 0);
    bool done = axes.empty();
    int combo = 0;
    while (!done) {
      RunSettings v = s;
      std::ostringstream label;
      for (size_t i = 0; i < axes.size(); ++i) {
        const json& value = axes[i].second[at[i]];
        const std::string& key = axes[i].first;
        if (key == "learning_rate") v.train.optimizer.learning_rate = value.get<double>();
        else if (key == "theta") v.train.decode.theta = value.get<double>();
        else if (key == "radius") v.train.margin.radius = value.get<double>();
        else if (key == "pretrain_steps") v.train.pretrain_steps = value.get<int>();
        else if (key == "episodes_per_step") v.train.episodes_per_step = value.get<int>();
        else if (key == "weight_decay") v.train.optimizer.weight_decay = value.get<double>();
        else throw ConfigError("unknown sweep key: " + key);
        label << (i == 0 ? "" : " ") << key << "=" << value.dump();
      }
      std::cout << "sweep[" << combo << "] " << label.str() << "\n";
      const RunOutcome outcome = run_one_training(v, train_path, eval_path, out_parent);
      std::cout << "sweep[" << combo << "] avg100 " << outcome.final_loss_avg;
      if (outcome.eval_f1 >= 0) std::cout << " f1 " << outcome.eval_f1;
      std::cout << "\n";
      ++combo;
      for (size_t i = 0; i < axes.size(); ++i) {
        if (++at[i] < axes[i].second.size()) break;
        at[i] = 0;
        if (i + 1 == axes.size()) done = true;
      }
    }
    return 0;
  }

  if (seeds.size() <= 1) {
    if (seeds.size() == 1) s.train.seed = seeds[0];
    run_one_training(s, train_path, eval_path, out_parent);
    return 0;
  }

  std::vector<double> losses, f1s;
  for (uint64_t seed : seeds) {
    RunSettings v = s;
    v.train.seed = seed;
    std::cout << "seed " << seed << "\n";
    const RunOutcome outcome = run_one_training(v, train_path, eval_path, out_parent);
    losses.push_back(outcome.final_loss_avg);
    if (outcome.eval_f1 >= 0) f1s.push_back(outcome.eval_f1);
  }
  auto mean_std = [](const std::vector<double>& xs) {
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return std::make_pair(mean, std::sqrt(var));
  };
  const auto [lm, ls] = mean_std(losses);
  std::cout << "aggregate avg100 " << lm << " +/- " << ls << "\n";
  if (!f1s.empty()) {
    const auto [fm, fsd] = mean_std(f1s);
    std::cout << "aggregate f1 " << fm << " +/- " << fsd << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path, double theta,
             double radius, const std::string& out_path, const std::string& csv_path) {
  Model model = load_checkpoint(checkpoint_path);
  const EpisodeDataset data = read_episodes(data_path, Split::test);
  EvalConfig ec;
  ec.decode.theta = theta;
  ec.margin.radius = radius;
  const EvalReport report = evaluate(data, model, ec);

  json out = json::parse(eval_report_json(report));
  out["config"] = {{"checkpoint", checkpoint_path},
                   {"data", data_path},
                   {"theta", theta},
                   {"radius", radius},
                   {"data_fnv1a64", hex64(fnv1a64_file(data_path))}};
  if (!out_path.empty()) write_text(out_path, out.dump(2) + "\n");

  std::cout << "P " << report.precision << " R " << report.recall << " F1 " << report.f1
            << " (macro F1 " << report.macro_f1 << ", rejected " << report.rejected_spans
            << ")\n";
  std::cout << "Method          F1      FP-Span FP-Type\n";
  std::ostringstream row;
  row << std::left << std::setw(15) << "this-run" << " " << std::setw(7) << std::setprecision(4)
      << 100.0 * report.f1 << " " << std::setw(7) << report.errors.fp_span_pct << " "
      << report.errors.fp_type_pct;
  std::cout << row.str() << "\n";

  if (!csv_path.empty()) {
    std::ostringstream csv;
    csv << "episode,tp,fp,fn,precision,recall,f1\n";
    for (size_t i = 0; i < report.per_episode.size(); ++i) {
      const EpisodeEval& ee = report.per_episode[i];
      csv << i << "," << ee.tp << "," << ee.fp << "," << ee.fn << "," << ee.precision << ","
          << ee.recall << "," << ee.f1 << "\n";
    }
    write_text(csv_path, csv.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

int cmd_inspect(const std::string& checkpoint_path, const std::string& data_path, int index,
                double theta, double radius, bool dump_embeddings,
                const std::string& out_path) {
  Model model = load_checkpoint(checkpoint_path);
  const EpisodeDataset data = read_episodes(data_path, Split::test);
  if (index < 0 || index >= static_cast<int>(data.episodes.size())) {
    throw ConfigError("episode index " + std::to_string(index) + " out of range, dataset has " +
                      std::to_string(data.episodes.size()) + " episodes");
  }
  const Episode& ep = data.episodes[static_cast<size_t>(index)];
  DecodeConfig dc;
  dc.theta = theta;
  MarginConfig mc;
  mc.radius = radius;
  const PrototypeSet prototypes = compute_prototype_values(model, ep);

  json out;
  out["episode"] = index;
  out["types"] = ep.types;
  json queries = json::array();
  for (const LabeledSentence& q : ep.query) {
    Tape tape;
    Var hv = encode_on(tape, model, q);
    Var fv = score_pairs(tape, model, hv, project_qk(tape, model, hv));
    const Mat& H = tape.val(hv);
    const BoundaryMatrix scores{tape.val(fv), q.length()};

    json cells = json::array();
    for (int i = 0; i < q.length(); ++i) {
      for (int j = i; j < q.length(); ++j) {
        cells.push_back({i, j, sigmoid(scores.scores(i, j))});
      }
    }
    json decoded = json::array();
    json spans = json::array();
    for (const Span& sp : decode(scores, dc)) {
      decoded.push_back({sp.start, sp.end});
      if (dump_embeddings) {
        const Mat u = span_representation_values(H, {sp});
        const Classification c = classify(u, prototypes, mc);
        spans.push_back({{"span", {sp.start, sp.end}},
                         {"u", u.a},
                         {"verdict", c.rejected
                                         ? std::string("REJECTED")
                                         : prototypes.types[static_cast<size_t>(c.type_index)]},
                         {"min_distance", c.min_distance}});
      }
    }
    json qj;
    qj["tokens"] = q.tokens;
    qj["cells"] = std::move(cells);
    qj["decoded"] = std::move(decoded);
    if (dump_embeddings) qj["spans"] = std::move(spans);
    queries.push_back(std::move(qj));
  }
  out["queries"] = std::move(queries);

  if (dump_embeddings) {
    json protos = json::object();
    for (int t = 0; t < prototypes.type_count(); ++t) {
      std::vector<double> row(static_cast<size_t>(prototypes.centroids.cols));
      for (int k = 0; k < prototypes.centroids.cols; ++k) {
        row[static_cast<size_t>(k)] = prototypes.centroids(t, k);
      }
      protos[prototypes.types[static_cast<size_t>(t)]] = row;
    }
    out["prototypes"] = std::move(protos);
  }

  const std::string text = out.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Two-stage few-shot NER: span extraction + prototype classification"};
  app.require_subcommand(1);

  // generate ------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Write synthetic train/dev/test episode files");
  int ways = 5, shots = 1, queries = 2, episodes = 50, eval_episodes = 20;
  double distractor_prob = 0.3;
  std::string mode_str = "inter", out_dir = data_dir_default(), pool_path;
  uint64_t gen_seed = 42;
  bool emit_distractors = false;
  gen->add_option("--ways", ways, "Entity types per episode (N)");
  gen->add_option("--shots", shots, "Support mentions per type (K)");
  gen->add_option("--queries", queries, "Query sentences per episode");
  gen->add_option("--episodes", episodes, "Training episodes");
  gen->add_option("--eval-episodes", eval_episodes, "Dev and test episodes each");
  gen->add_option("--distractor-prob", distractor_prob, "Probability of an out-of-episode mention per query sentence");
  gen->add_option("--mode", mode_str, "Split disjointness: intra or inter")
      ->check(CLI::IsMember({"intra", "inter"}));
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", out_dir, "Output directory (default $SPANPROTO_DATA_DIR or ./data)");
  gen->add_option("--pool", pool_path, "Custom lexicon/template pool JSON");
  gen->add_flag("--emit-distractors", emit_distractors,
                "Also write <split>.distractors.json sidecars");

  // train ---------------------------------------------------------------
  auto* tr = app.add_subcommand("train", "Train on an episode file");
  RunSettings settings;
  std::string train_path, eval_path, out_parent = "runs", config_path, seeds_str, sweep_path;
  bool no_margin = false;
  tr->add_option("--train", train_path, "Training episode file")->required();
  tr->add_option("--eval", eval_path, "Optional eval episode file, scored after training");
  tr->add_option("--out", out_parent, "Parent directory for run outputs");
  tr->add_option("--config", config_path, "JSON config file; flags override its values");
  tr->add_option("--steps", settings.train.total_steps, "Total steps T");
  tr->add_option("--pretrain-steps", settings.train.pretrain_steps, "Extractor-only steps T'");
  tr->add_option("--lr", settings.train.optimizer.learning_rate, "Learning rate");
  tr->add_option("--warmup", settings.train.optimizer.warmup_fraction, "Warmup fraction");
  tr->add_option("--weight-decay", settings.train.optimizer.weight_decay, "Weight decay");
  tr->add_option("--theta", settings.train.decode.theta, "Decode confidence threshold");
  tr->add_option("--radius", settings.train.margin.radius, "Margin / rejection radius r");
  tr->add_flag("--no-margin-loss", no_margin, "Disable the margin objective");
  tr->add_option("--hdim", settings.train.encoder.embedding_dim, "Embedding dimension");
  tr->add_option("--mixing-layers", settings.train.encoder.mixing_layers, "Encoder mixing blocks");
  tr->add_option("--max-len", settings.train.encoder.max_len, "Maximum sentence length");
  tr->add_option("--seed", settings.train.seed, "Training seed");
  tr->add_option("--episodes-per-step", settings.train.episodes_per_step,
                 "Episodes averaged per optimizer step");
  tr->add_option("--checkpoint-every", settings.train.checkpoint_every, "Checkpoint cadence");
  tr->add_option("--seeds", seeds_str, "Comma-separated seed sweep, e.g. 12,21,42,87,100");
  tr->add_option("--sweep", sweep_path, "Grid file: JSON map of knob -> list of values");

  // eval ----------------------------------------------------------------
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on an episode file");
  std::string ev_checkpoint, ev_data, ev_out, ev_csv;
  double ev_theta = 0.8, ev_radius = 3.0;
  ev->add_option("--checkpoint", ev_checkpoint, "Checkpoint file")->required();
  ev->add_option("--data", ev_data, "Episode file")->required();
  ev->add_option("--theta", ev_theta, "Decode confidence threshold");
  ev->add_option("--radius", ev_radius, "Rejection radius");
  ev->add_option("--out", ev_out, "Report JSON path");
  ev->add_option("--csv", ev_csv, "Optional per-episode CSV path");

  // inspect -------------------------------------------------------------
  auto* ins = app.add_subcommand("inspect", "Dump boundary scores (and embeddings) for one episode");
  std::string in_checkpoint, in_data, in_out;
  int in_index = 0;
  double in_theta = 0.8, in_radius = 3.0;
  bool in_embeddings = false;
  ins->add_option("--checkpoint", in_checkpoint, "Checkpoint file")->required();
  ins->add_option("--data", in_data, "Episode file")->required();
  ins->add_option("--index", in_index, "Episode index");
  ins->add_option("--theta", in_theta, "Decode confidence threshold");
  ins->add_option("--radius", in_radius, "Rejection radius");
  ins->add_flag("--dump-embeddings", in_embeddings, "Include span/prototype vectors and verdicts");
  ins->add_option("--out", in_out, "Output path (default stdout)");

  // CLI11 wants argv-style reversed input.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) {
      GeneratorConfig base = pool_path.empty() ? default_generator_config(mode_from_name(mode_str))
                                               : load_pool(pool_path, mode_from_name(mode_str));
      base.ways = ways;
      base.shots = shots;
      base.queries_per_episode = queries;
      base.distractor_prob = distractor_prob;
      return cmd_generate(base, gen_seed, episodes, eval_episodes, out_dir, emit_distractors);
    }
    if (tr->parsed()) {
      // File values first, then any explicitly passed flag on top.
      if (!config_path.empty()) {
        RunSettings file_settings;
        apply_config_file(&file_settings, config_path);
        RunSettings merged = file_settings;
        for (const CLI::Option* opt : tr->get_options()) {
          if (opt->count() == 0) continue;
          const std::string n = opt->get_name();
          if (n == "--steps") merged.train.total_steps = settings.train.total_steps;
          else if (n == "--pretrain-steps") merged.train.pretrain_steps = settings.train.pretrain_steps;
          else if (n == "--lr") merged.train.optimizer.learning_rate = settings.train.optimizer.learning_rate;
          else if (n == "--warmup") merged.train.optimizer.warmup_fraction = settings.train.optimizer.warmup_fraction;
          else if (n == "--weight-decay") merged.train.optimizer.weight_decay = settings.train.optimizer.weight_decay;
          else if (n == "--theta") merged.train.decode.theta = settings.train.decode.theta;
          else if (n == "--radius") merged.train.margin.radius = settings.train.margin.radius;
          else if (n == "--hdim") merged.train.encoder.embedding_dim = settings.train.encoder.embedding_dim;
          else if (n == "--mixing-layers") merged.train.encoder.mixing_layers = settings.train.encoder.mixing_layers;
          else if (n == "--max-len") merged.train.encoder.max_len = settings.train.encoder.max_len;
          else if (n == "--seed") merged.train.seed = settings.train.seed;
          else if (n == "--episodes-per-step") merged.train.episodes_per_step = settings.train.episodes_per_step;
          else if (n == "--checkpoint-every") merged.train.checkpoint_every = settings.train.checkpoint_every;
        }
        settings = merged;
      }
      settings.train.margin.margin_enabled = !no_margin;
      std::vector<uint64_t> seeds;
      if (!seeds_str.empty()) {
        std::stringstream ss(seeds_str);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (!item.empty()) seeds.push_back(std::stoull(item));
        }
      }
      return cmd_train(settings, train_path, eval_path, out_parent, seeds, sweep_path);
    }
    if (ev->parsed()) {
      return cmd_eval(ev_checkpoint, ev_data, ev_theta, ev_radius, ev_out, ev_csv);
    }
    if (ins->parsed()) {
      return cmd_inspect(in_checkpoint, in_data, in_index, in_theta, in_radius, in_embeddings,
                         in_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace spanproto::cli
