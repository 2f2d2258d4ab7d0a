// wgpnn: prepare, synth, train, evaluate, predict and grid-search commands.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "wgpnn/checkpoint.hpp"
#include "wgpnn/config.hpp"
#include "wgpnn/error.hpp"
#include "wgpnn/evaluate.hpp"
#include "wgpnn/fit.hpp"
#include "wgpnn/grid_search.hpp"
#include "wgpnn/manifest.hpp"
#include "wgpnn/prepared.hpp"
#include "wgpnn/synth.hpp"

namespace fs = std::filesystem;
using namespace wgpnn;

namespace {

constexpr std::string_view kReciprocalSuffix = "^-1";

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return seconds;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::kIo, path.string() + ": cannot open for writing");
  return out;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCategory::kIo, dir.string() + ": " + ec.message());
}

std::string format_real(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

// Config assembly: defaults, then the file, then flags.
struct ConfigSources {
  std::string file;
  std::map<std::string, std::string> flags;
};

void add_config_options(CLI::App& cmd, ConfigSources& sources) {
  cmd.add_option("--config", sources.file, "Flat key = value config file")->check(CLI::ExistingFile);
  for (const auto& [key, value] : config_entries(TrainConfig{})) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    cmd.add_option("--" + flag, sources.flags[key], "Override " + key + " (default " + value + ")");
  }
}

TrainConfig resolve_config(const CLI::App& cmd, const ConfigSources& sources) {
  TrainConfig config;
  if (!sources.file.empty()) {
    std::ifstream in(sources.file);
    if (!in) throw Error(ErrorCategory::kIo, sources.file + ": cannot open");
    config = parse_config(in, config);
  }
  for (const auto& [key, value] : sources.flags) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (cmd.count("--" + flag) > 0) apply_setting(config, key, value);
  }
  config.validate();
  return config;
}

std::map<std::string, std::string> config_map(const TrainConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : config_entries(config)) out[key] = value;
  return out;
}

constexpr std::string_view kConfigPrefix = "config.";

std::map<std::string, std::string> checkpoint_metadata(const TrainConfig& config, const FitProgress& progress) {
  std::map<std::string, std::string> meta;
  for (const auto& [key, value] : config_entries(config)) meta[std::string(kConfigPrefix) + key] = value;
  meta["progress.best_valid_mrr"] = format_real(progress.best_valid_mrr);
  meta["progress.best_epoch"] = std::to_string(progress.best_epoch);
  meta["progress.stale_epochs"] = std::to_string(progress.stale_epochs);
  return meta;
}

TrainConfig config_from_metadata(const std::map<std::string, std::string>& meta) {
  TrainConfig config;
  for (const auto& [key, value] : meta) {
    if (key.starts_with(kConfigPrefix)) apply_setting(config, key.substr(kConfigPrefix.size()), value);
  }
  return config;
}

FitProgress progress_from_metadata(const std::map<std::string, std::string>& meta) {
  FitProgress progress;
  try {
    progress.best_valid_mrr = std::stod(meta.at("progress.best_valid_mrr"));
    progress.best_epoch = std::stoull(meta.at("progress.best_epoch"));
    progress.stale_epochs = std::stoull(meta.at("progress.stale_epochs"));
  } catch (const std::exception&) {
    throw Error(ErrorCategory::kCompatibility, "checkpoint lacks training progress metadata; cannot resume");
  }
  return progress;
}

void require_compatible(const ModelShape& have, const ModelShape& want, const std::string& what) {
  std::ostringstream diff;
  const auto compare = [&](const char* name, std::size_t a, std::size_t b) {
    if (a != b) diff << ' ' << name << ' ' << a << " vs " << b << ';';
  };
  compare("entities", have.num_entities, want.num_entities);
  compare("predicates", have.num_predicates, want.num_predicates);
  compare("embedding_dim", have.embedding_dim, want.embedding_dim);
  compare("hidden_dim", have.hidden_dim, want.hidden_dim);
  compare("pseudo_points", have.pseudo_points, want.pseudo_points);
  if (!diff.str().empty()) {
    throw Error(ErrorCategory::kCompatibility, what + " does not match (checkpoint vs expected):" + diff.str());
  }
}

Checkpoint load_compatible_checkpoint(const fs::path& path, const Dataset& data) {
  auto ck = load_checkpoint(path);
  auto want = ck.state.params.shape;
  want.num_entities = data.meta.num_entities;
  want.num_predicates = data.num_predicates();
  require_compatible(ck.state.params.shape, want, path.string() + " vs prepared dictionaries");
  return ck;
}

RunManifest start_manifest(const std::string& command, int argc, char** argv) {
  RunManifest m;
  m.command = command;
  for (int i = 1; i < argc; ++i) m.arguments.emplace_back(argv[i]);
  return m;
}

void write_timings(const fs::path& path, const std::string& command, const nlohmann::json& phases) {
  write_json(path, {{"command", command}, {"seconds", phases}});
}

EntityId resolve_entity(const Dataset& data, const std::string& token) {
  if (const auto id = data.entities.find(token)) return *id;
  std::string hint;
  for (const auto& near : data.entities.nearest(token)) hint += (hint.empty() ? "" : ", ") + near;
  throw Error(ErrorCategory::kDictionary, "unknown entity '" + token + "'; nearest: " + hint);
}

PredicateId resolve_predicate(const Dataset& data, const std::string& token) {
  std::string base = token;
  bool inverse = false;
  if (base.size() > kReciprocalSuffix.size() && base.ends_with(kReciprocalSuffix)) {
    base.resize(base.size() - kReciprocalSuffix.size());
    inverse = true;
  }
  if (const auto id = data.predicates.find(base)) return inverse ? *id + data.meta.num_raw_predicates : *id;
  std::string hint;
  for (const auto& near : data.predicates.nearest(base)) hint += (hint.empty() ? "" : ", ") + near;
  throw Error(ErrorCategory::kDictionary, "unknown predicate '" + base + "'; nearest: " + hint);
}

std::string predicate_token(const Dataset& data, PredicateId p) {
  const auto raw = data.meta.num_raw_predicates;
  return p < raw ? data.predicates.token(p) : data.predicates.token(p - raw) + std::string(kReciprocalSuffix);
}

// ---------------------------------------------------------------- prepare

struct PrepareArgs {
  std::vector<std::string> inputs;
  std::string out;
};

void run_prepare(const PrepareArgs& args, RunManifest manifest) {
  Stopwatch clock;
  std::vector<fs::path> inputs(args.inputs.begin(), args.inputs.end());
  const auto data = prepare_from_files(inputs);
  const double build_seconds = clock.lap();
  const fs::path out = args.out;
  ensure_directory(out);
  const auto written = write_prepared(data, out);
  for (const auto& input : inputs) manifest.add_input(input);
  for (const auto& [name, digest] : written) manifest.outputs[(out / name).generic_string()] = digest;
  manifest.config = {{"num_entities", std::to_string(data.meta.num_entities)},
                     {"num_predicates", std::to_string(data.meta.num_raw_predicates)},
                     {"num_slices", std::to_string(data.meta.num_slices)},
                     {"time_unit", std::to_string(data.meta.time_unit)},
                     {"tau_max", format_real(data.meta.tau_max)}};
  write_json(out / "manifest.json", manifest.to_json());
  write_timings(out / "timings.json", "prepare", {{"build", build_seconds}, {"write", clock.lap()}});

  std::cout << "entities\t" << data.meta.num_entities << '\n'
            << "predicates\t" << data.meta.num_raw_predicates << '\n'
            << "slices\t" << data.meta.num_slices << '\n'
            << "train\t" << data.raw.train.size() << '\n'
            << "valid\t" << data.raw.valid.size() << '\n'
            << "test\t" << data.raw.test.size() << '\n'
            << "time_unit\t" << data.meta.time_unit << '\n'
            << "tau_max\t" << data.meta.tau_max << '\n';
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  SynthSpec spec;
  std::string out;
};

void run_synth(const SynthArgs& args, RunManifest manifest) {
  Stopwatch clock;
  const SyntheticGenerator generator(args.spec);
  {
    auto out = open_output(args.out);
    generator.write_tsv(out);
    if (!out) throw Error(ErrorCategory::kIo, args.out + ": write failed");
  }
  const auto& s = args.spec;
  manifest.seed = s.seed;
  manifest.config = {{"entities", std::to_string(s.entities)}, {"predicates", std::to_string(s.predicates)},
                     {"period", std::to_string(s.period)},     {"horizon", std::to_string(s.horizon)},
                     {"noise", format_real(s.noise)},          {"time_unit", std::to_string(s.time_unit)}};
  manifest.add_output(args.out);
  write_json(args.out + ".manifest.json", manifest.to_json());
  write_timings(args.out + ".timings.json", "synth", {{"generate", clock.lap()}});
  std::cout << "wrote " << static_cast<std::uint64_t>(s.entities) * s.predicates * s.horizon << " events to "
            << args.out << '\n';
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string out;
  ConfigSources sources;
  bool resume = false;
};

void run_train(const CLI::App& cmd, const TrainArgs& args, RunManifest manifest) {
  Stopwatch clock;
  const auto data = load_prepared(args.data);
  auto config = resolve_config(cmd, args.sources);
  if (config.tau_max <= 0.0) config.tau_max = data.meta.tau_max;
  const auto shape = model_shape(config, data.meta.num_entities, data.num_predicates());
  const fs::path out = args.out;
  ensure_directory(out);
  const auto best_path = out / "checkpoint.bin";
  const auto last_path = out / "last.bin";
  const auto log_path = out / "train_log.tsv";

  TrainerState state;
  FitProgress progress;
  const bool resuming = args.resume && fs::exists(last_path);
  if (resuming) {
    auto ck = load_checkpoint(last_path);
    require_compatible(ck.state.params.shape, shape, last_path.string() + " vs resolved config");
    if (ck.seed != config.seed) {
      throw Error(ErrorCategory::kCompatibility, "resume: checkpoint seed " + std::to_string(ck.seed) +
                                                     " differs from configured seed " + std::to_string(config.seed));
    }
    progress = progress_from_metadata(ck.metadata);
    state = std::move(ck.state);
    std::cout << "resuming at epoch " << state.epoch << '\n';
  } else {
    state = initial_trainer_state(shape, config.seed);
  }
  const double setup_seconds = clock.lap();

  std::ofstream log(log_path, resuming ? std::ios::app : std::ios::trunc);
  if (!log) throw Error(ErrorCategory::kIo, log_path.string() + ": cannot open for writing");
  if (!resuming) log << "epoch\tloss\tvalid_mrr\timproved\n";
  log.precision(10);
  nlohmann::json epoch_seconds = nlohmann::json::array();

  progress = fit(state, data, config, progress, [&](const TrainerState& s, const EpochLog& e, const FitProgress& p) {
    log << e.epoch << '\t' << e.loss << '\t' << e.valid_mrr << '\t' << (e.improved ? 1 : 0) << '\n';
    log.flush();
    std::cout << "epoch " << e.epoch << "  loss " << e.loss << "  valid_mrr " << e.valid_mrr
              << (e.improved ? "  *" : "") << std::endl;
    const Checkpoint ck{s, config.seed, checkpoint_metadata(config, p)};
    save_checkpoint(last_path, ck);
    if (e.improved) save_checkpoint(best_path, ck);
    epoch_seconds.push_back(clock.lap());
  });
  if (!fs::exists(best_path)) save_checkpoint(best_path, {state, config.seed, checkpoint_metadata(config, progress)});
  log.close();
  {
    auto cfg = open_output(out / "config.txt");
    write_config(cfg, config);
  }

  manifest.seed = config.seed;
  manifest.config = config_map(config);
  manifest.add_input(args.data);
  if (!args.sources.file.empty()) manifest.add_input(args.sources.file);
  for (const auto& path : {best_path, last_path, log_path, out / "config.txt"}) {
    if (fs::exists(path)) manifest.add_output(path);
  }
  write_json(out / "manifest.json", manifest.to_json());
  write_timings(out / "timings.json", "train",
                {{"setup", setup_seconds}, {"epochs", epoch_seconds}, {"finish", clock.lap()}});
  std::cout << "best epoch " << progress.best_epoch << "  valid_mrr " << progress.best_valid_mrr << '\n';
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string data;
  std::string checkpoint;
  std::string out;
  std::string split = "test";
  std::string protocol = "both";
  std::string ties = "mean";
  std::size_t threads = 1;
};

void run_evaluate(const EvaluateArgs& args, RunManifest manifest) {
  Stopwatch clock;
  const auto data = load_prepared(args.data);
  const auto ck = load_compatible_checkpoint(args.checkpoint, data);
  const auto config = config_from_metadata(ck.metadata);
  const auto forward = forward_config(config, data.meta.time_unit, data.meta.tau_max);
  const std::map<std::string, const std::vector<Quadruple>*> splits = {
      {"train", &data.events.train}, {"valid", &data.events.valid}, {"test", &data.events.test}};
  EvaluateOptions options;
  options.num_raw_predicates = data.meta.num_raw_predicates;
  options.threads = args.threads;
  options.ties = args.ties == "pessimistic" ? TiePolicy::kPessimistic : TiePolicy::kMean;
  ReportProtocols protocols{args.protocol != "time_aware", args.protocol != "raw"};
  const double load_seconds = clock.lap();

  const auto report = evaluate(ck.state.params, data.store, *splits.at(args.split), data.filter, forward, options);
  const double eval_seconds = clock.lap();

  const fs::path out = args.out;
  ensure_directory(out);
  auto metrics = metrics_json(report, protocols);
  metrics["split"] = args.split;
  metrics["ties"] = args.ties;
  metrics["seed"] = ck.seed;
  metrics["epoch"] = ck.state.epoch;
  metrics["config"] = config_map(config);
  write_json(out / "metrics.json", metrics);
  {
    auto tsv = open_output(out / "metrics.tsv");
    write_metrics_tsv(tsv, report, protocols);
  }
  {
    auto tsv = open_output(out / "ranks.tsv");
    write_ranks_tsv(tsv, report, protocols);
  }

  manifest.seed = ck.seed;
  manifest.config = config_map(config);
  manifest.config["split"] = args.split;
  manifest.config["protocol"] = args.protocol;
  manifest.config["ties"] = args.ties;
  manifest.add_input(args.data);
  manifest.add_input(args.checkpoint);
  for (const char* name : {"metrics.json", "metrics.tsv", "ranks.tsv"}) manifest.add_output(out / name);
  write_json(out / "manifest.json", manifest.to_json());
  write_timings(out / "timings.json", "evaluate",
                {{"load", load_seconds}, {"evaluate", eval_seconds}, {"write", clock.lap()}});
  write_metrics_tsv(std::cout, report, protocols);
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string data;
  std::string checkpoint;
  std::string subject;
  std::string predicate;
  Timestamp time = 0;
  std::size_t top_k = 10;
  std::string out = ".";
  std::string curve;
  std::size_t curve_points = 64;
  double curve_max = 0.0;
};

void run_predict(const PredictArgs& args, RunManifest manifest) {
  Stopwatch clock;
  const auto data = load_prepared(args.data);
  const auto ck = load_compatible_checkpoint(args.checkpoint, data);
  const auto config = config_from_metadata(ck.metadata);
  const auto forward = forward_config(config, data.meta.time_unit, data.meta.tau_max);
  if (args.time < 0) throw Error(ErrorCategory::kConfig, "predict: time must be >= 0");
  const Query query{resolve_entity(data, args.subject), resolve_predicate(data, args.predicate), args.time};
  const auto prediction = predict(ck.state.params, data.store, query, forward);

  const auto& scores = prediction.scores;
  std::vector<std::size_t> order(scores.mean.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores.mean[a] > scores.mean[b]; });
  order.resize(std::min(args.top_k, order.size()));

  const fs::path out = args.out;
  ensure_directory(out);
  std::ostringstream table;
  table.precision(10);
  table << "# query " << args.subject << ' ' << predicate_token(data, query.predicate) << " ? " << query.time
        << "  tau_star " << prediction.tau_star << "  history_slices " << prediction.window.entries.size() << '\n';
  table << "rank\tcandidate\tcandidate_id\tmean\tvariance\tprobability\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto c = order[i];
    table << i + 1 << '\t' << data.entities.token(static_cast<EntityId>(c)) << '\t' << c << '\t' << scores.mean[c]
          << '\t' << scores.variance[c] << '\t' << scores.probability[c] << '\n';
  }
  {
    auto f = open_output(out / "predictions.tsv");
    f << table.str();
  }
  std::cout << table.str();
  manifest.add_output(out / "predictions.tsv");

  if (!args.curve.empty()) {
    if (args.curve_points < 2) throw Error(ErrorCategory::kConfig, "predict: --curve-points must be >= 2");
    const double upper = args.curve_max > 0.0 ? args.curve_max : forward.regularizer.tau_max;
    const auto kernel = forward.kernel(ck.state.params);
    auto f = open_output(args.curve);
    f.precision(10);
    f << "tau\tcandidate_id\tmean\tvariance\n";
    std::vector<WeightedGp> processes;
    for (const auto c : order) processes.emplace_back(prediction.points.candidate(c), kernel);
    for (std::size_t k = 0; k < args.curve_points; ++k) {
      const double tau = upper * static_cast<double>(k) / static_cast<double>(args.curve_points - 1);
      for (std::size_t i = 0; i < order.size(); ++i) {
        const auto m = processes[i].predict(tau);
        f << tau << '\t' << order[i] << '\t' << m.mean << '\t' << m.variance << '\n';
      }
    }
    f.close();
    manifest.add_output(args.curve);
  }

  manifest.seed = ck.seed;
  manifest.config = config_map(config);
  manifest.config["query"] = args.subject + ' ' + args.predicate + ' ' + std::to_string(args.time);
  manifest.config["top_k"] = std::to_string(args.top_k);
  manifest.add_input(args.data);
  manifest.add_input(args.checkpoint);
  write_json(out / "predict_manifest.json", manifest.to_json());
  write_timings(out / "predict_timings.json", "predict", {{"total", clock.lap()}});
}

// ---------------------------------------------------------------- grid-search

struct GridArgs {
  std::string data;
  std::string out;
  ConfigSources sources;
  std::size_t budget = 5;
  GridSpec spec = GridSpec::full_space();
};

void run_grid(const CLI::App& cmd, const GridArgs& args, RunManifest manifest) {
  Stopwatch clock;
  const auto data = load_prepared(args.data);
  const auto base = resolve_config(cmd, args.sources);
  const auto configs = args.spec.expand(base);
  std::cout << "grid points: " << configs.size() << '\n';
  const auto result = grid_search(data, configs, args.budget);
  const double search_seconds = clock.lap();

  const fs::path out = args.out;
  ensure_directory(out);
  {
    auto f = open_output(out / "grid.tsv");
    write_grid_tsv(f, result);
  }
  {
    auto f = open_output(out / "best_config.txt");
    write_config(f, result.best());
  }
  write_grid_tsv(std::cout, result);

  manifest.seed = base.seed;
  manifest.config = config_map(base);
  manifest.config["budget_epochs"] = std::to_string(args.budget);
  manifest.add_input(args.data);
  if (!args.sources.file.empty()) manifest.add_input(args.sources.file);
  manifest.add_output(out / "grid.tsv");
  manifest.add_output(out / "best_config.txt");
  write_json(out / "manifest.json", manifest.to_json());
  write_timings(out / "timings.json", "grid-search", {{"search", search_seconds}, {"write", clock.lap()}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal knowledge graph link forecasting with weighted Gaussian process pseudo-points"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  PrepareArgs prepare;
  auto* prepare_cmd = app.add_subcommand("prepare", "Build dictionaries, slices, splits and filter index");
  prepare_cmd->add_option("-i,--input", prepare.inputs, "One TSV (split 80/10/10 by time) or three (train valid test)")
      ->required()
      ->check(CLI::ExistingFile)
      ->expected(1, 3);
  prepare_cmd->add_option("-o,--out", prepare.out, "Output directory")->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a periodic synthetic dataset");
  synth_cmd->add_option("-o,--out", synth.out, "Output TSV file")->required();
  synth_cmd->add_option("--entities", synth.spec.entities)->capture_default_str();
  synth_cmd->add_option("--predicates", synth.spec.predicates)->capture_default_str();
  synth_cmd->add_option("--period", synth.spec.period)->capture_default_str();
  synth_cmd->add_option("--horizon", synth.spec.horizon, "Number of timestamps")->capture_default_str();
  synth_cmd->add_option("--noise", synth.spec.noise, "Probability a line is replaced by a random triple")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed)->capture_default_str();
  synth_cmd->add_option("--time-unit", synth.spec.time_unit)->capture_default_str();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model with early stopping on validation MRR");
  train_cmd->add_option("-d,--data", train.data, "Prepared dataset directory")->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("-o,--out", train.out, "Run directory")->required();
  train_cmd->add_flag("--resume", train.resume, "Continue from <out>/last.bin if present");
  add_config_options(*train_cmd, train.sources);

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Rank queries under the raw and time-aware filtered protocols");
  eval_cmd->add_option("-d,--data", eval.data, "Prepared dataset directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("-c,--checkpoint", eval.checkpoint)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("-o,--out", eval.out, "Report directory")->required();
  eval_cmd->add_option("--split", eval.split)->check(CLI::IsMember({"train", "valid", "test"}))->capture_default_str();
  eval_cmd->add_option("--protocol", eval.protocol)
      ->check(CLI::IsMember({"both", "raw", "time_aware"}))
      ->capture_default_str();
  eval_cmd->add_option("--ties", eval.ties)->check(CLI::IsMember({"mean", "pessimistic"}))->capture_default_str();
  eval_cmd->add_option("--threads", eval.threads, "Worker threads; reports do not depend on it")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  PredictArgs pred;
  auto* predict_cmd = app.add_subcommand("predict", "Score all objects for one (subject, predicate, ?, time) query");
  predict_cmd->add_option("-d,--data", pred.data, "Prepared dataset directory")->required()->check(CLI::ExistingDirectory);
  predict_cmd->add_option("-c,--checkpoint", pred.checkpoint)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("-s,--subject", pred.subject)->required();
  predict_cmd->add_option("-p,--predicate", pred.predicate, "Predicate token; append ^-1 for the inverse")->required();
  predict_cmd->add_option("-t,--time", pred.time)->required();
  predict_cmd->add_option("-k,--top-k", pred.top_k)->check(CLI::PositiveNumber)->capture_default_str();
  predict_cmd->add_option("-o,--out", pred.out, "Directory for predictions.tsv and the manifest")->capture_default_str();
  predict_cmd->add_option("--curve", pred.curve, "Write tau/candidate_id/mean/variance samples for the top-k");
  predict_cmd->add_option("--curve-points", pred.curve_points)->capture_default_str();
  predict_cmd->add_option("--curve-max", pred.curve_max, "Upper tau of the curve (default tau_max)");

  GridArgs grid;
  auto* grid_cmd = app.add_subcommand("grid-search", "Train every grid point briefly and rank by validation MRR");
  grid_cmd->add_option("-d,--data", grid.data, "Prepared dataset directory")->required()->check(CLI::ExistingDirectory);
  grid_cmd->add_option("-o,--out", grid.out, "Output directory")->required();
  grid_cmd->add_option("--budget", grid.budget, "Epochs per grid point")->capture_default_str();
  grid_cmd->add_option("--window-sizes", grid.spec.window_sizes)->delimiter(',');
  grid_cmd->add_option("--pseudo-point-values", grid.spec.pseudo_points)->delimiter(',');
  grid_cmd->add_option("--embedding-dims", grid.spec.embedding_dims)->delimiter(',');
  grid_cmd->add_option("--batch-sizes", grid.spec.batch_sizes)->delimiter(',');
  add_config_options(*grid_cmd, grid.sources);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*prepare_cmd) {
      if (prepare.inputs.size() == 2) throw Error(ErrorCategory::kConfig, "prepare: give one or three input files");
      run_prepare(prepare, start_manifest("prepare", argc, argv));
    } else if (*synth_cmd) {
      run_synth(synth, start_manifest("synth", argc, argv));
    } else if (*train_cmd) {
      run_train(*train_cmd, train, start_manifest("train", argc, argv));
    } else if (*eval_cmd) {
      run_evaluate(eval, start_manifest("evaluate", argc, argv));
    } else if (*predict_cmd) {
      run_predict(pred, start_manifest("predict", argc, argv));
    } else if (*grid_cmd) {
      run_grid(*grid_cmd, grid, start_manifest("grid-search", argc, argv));
    }
  } catch (const Error& e) {
    std::cerr << "error [" << category_name(e.category()) << "]: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
