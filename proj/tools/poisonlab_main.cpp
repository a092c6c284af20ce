// poisonlab: synthetic graph-classification poisoning lab.
//
//   gen-data    generate the 8-class synthetic dataset
//   train       train the victim GNN on a generated dataset
//   attack      run the poisoning attack (on given artifacts)
//   analyze     regression + plots from attack records
//   reproduce   full pipeline with the reference experiment defaults

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "poisonlab/analysis.hpp"
#include "poisonlab/checkpoint.hpp"
#include "poisonlab/dataset.hpp"
#include "poisonlab/gnn.hpp"
#include "poisonlab/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace poisonlab;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CliOptions {
  std::uint64_t seed = 1;
  int train_size = 180;
  int test_size = 30;
  int min_nodes = 15;
  int max_nodes = 35;
  int epochs = 70;
  int batch_size = 32;
  double gnn_lr = 1e-2;
  int episodes = 175;
  int poison_points = 10;
  int runs = 10;
  std::string policy = "both";
  int jobs = 1;
  std::string outdir;
  bool extended_actions = false;
  bool smoke = false;
  bool pool_runs = false;
  double policy_lr = 1e-2;
  double gamma = 0.99;
  std::string data_dir;
  std::string checkpoint_dir;
  std::string records_dir;
  std::string experiment = "small";
};

json resolved_config(const CliOptions& o) {
  return json{{"seed", o.seed},
              {"train_size", o.train_size},
              {"test_size", o.test_size},
              {"min_nodes", o.min_nodes},
              {"max_nodes", o.max_nodes},
              {"epochs", o.epochs},
              {"batch_size", o.batch_size},
              {"gnn_lr", o.gnn_lr},
              {"episodes", o.episodes},
              {"poison_points", o.poison_points},
              {"runs", o.runs},
              {"policy", o.policy},
              {"jobs", o.jobs},
              {"outdir", o.outdir},
              {"extended_actions", o.extended_actions},
              {"smoke", o.smoke},
              {"pool_runs", o.pool_runs},
              {"policy_lr", o.policy_lr},
              {"gamma", o.gamma},
              {"experiment", o.experiment}};
}

void apply_json_config(CliOptions& o, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("bad config file " + path + ": " + e.what());
  }
  o.seed = j.value("seed", o.seed);
  o.train_size = j.value("train_size", o.train_size);
  o.test_size = j.value("test_size", o.test_size);
  o.min_nodes = j.value("min_nodes", o.min_nodes);
  o.max_nodes = j.value("max_nodes", o.max_nodes);
  o.epochs = j.value("epochs", o.epochs);
  o.batch_size = j.value("batch_size", o.batch_size);
  o.gnn_lr = j.value("gnn_lr", o.gnn_lr);
  o.episodes = j.value("episodes", o.episodes);
  o.poison_points = j.value("poison_points", o.poison_points);
  o.runs = j.value("runs", o.runs);
  o.policy = j.value("policy", o.policy);
  o.jobs = j.value("jobs", o.jobs);
  o.outdir = j.value("outdir", o.outdir);
  o.extended_actions = j.value("extended_actions", o.extended_actions);
  o.smoke = j.value("smoke", o.smoke);
  o.pool_runs = j.value("pool_runs", o.pool_runs);
  o.policy_lr = j.value("policy_lr", o.policy_lr);
  o.gamma = j.value("gamma", o.gamma);
  o.experiment = j.value("experiment", o.experiment);
}

std::string fnv1a64_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::string iso_timestamp(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Every artifact-writing command emits a manifest: version, resolved config,
// seeds, timestamps and an FNV-1a hash per output file.
void write_manifest(const std::string& outdir, const std::string& command,
                    const CliOptions& opts, const std::vector<std::uint64_t>& seeds,
                    std::chrono::system_clock::time_point started) {
  json outputs = json::object();
  for (const auto& entry : fs::recursive_directory_iterator(outdir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename() == "manifest.json") continue;
    outputs[fs::relative(entry.path(), outdir).generic_string()] = fnv1a64_hex(entry.path());
  }
  const json manifest{{"tool", "poisonlab"},
                      {"version", kVersion},
                      {"command", command},
                      {"config", resolved_config(opts)},
                      {"seeds", seeds},
                      {"started_utc", iso_timestamp(started)},
                      {"finished_utc", iso_timestamp(std::chrono::system_clock::now())},
                      {"outputs", outputs}};
  std::ofstream out(fs::path(outdir) / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + outdir);
  out << manifest.dump(2) << '\n';
}

DatasetConfig dataset_config(const CliOptions& o) {
  DatasetConfig cfg;
  cfg.train_size = o.train_size;
  cfg.test_size = o.test_size;
  cfg.min_nodes = o.min_nodes;
  cfg.max_nodes = o.max_nodes;
  cfg.seed = o.seed;
  return cfg;
}

TrainConfig train_config(const CliOptions& o) {
  TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch_size;
  cfg.opt.lr = o.gnn_lr;
  cfg.seed = o.seed;
  return cfg;
}

AttackConfig attack_config(const CliOptions& o) {
  AttackConfig cfg;
  cfg.dataset = dataset_config(o);
  cfg.train = train_config(o);
  cfg.env.poison_points = o.poison_points;
  cfg.env.extended_actions = o.extended_actions;
  cfg.env.retrain_batch_size = o.batch_size;
  cfg.n_episodes = o.episodes;
  cfg.n_runs = o.runs;
  cfg.base_seed = o.seed;
  cfg.policy_lr = o.policy_lr;
  cfg.gamma = o.gamma;
  cfg.jobs = o.jobs;
  return cfg;
}

void apply_smoke(CliOptions& o) {
  if (!o.smoke) return;
  o.runs = 1;
  o.episodes = 5;
  o.poison_points = 2;
}

void require_no_failures(const std::vector<RunRecord>& records) {
  std::string errors;
  for (const auto& rec : records)
    if (rec.failed())
      errors += "run " + std::to_string(rec.run_index) + ": " + rec.error + "\n";
  if (!errors.empty()) throw std::runtime_error("runs failed:\n" + errors);
}

double tail_mean(const std::vector<double>& curve, int window) {
  const auto n = static_cast<int>(curve.size());
  const int w = std::min(window, n);
  double sum = 0.0;
  for (int i = n - w; i < n; ++i) sum += curve[static_cast<std::size_t>(i)];
  return w > 0 ? sum / w : 0.0;
}

// --- commands --------------------------------------------------------------

int cmd_gen_data(CliOptions o) {
  const auto started = std::chrono::system_clock::now();
  if (o.outdir.empty()) o.outdir = "data";
  fs::create_directories(o.outdir);
  const DatasetConfig cfg = dataset_config(o);
  const auto [train, test] = generate_dataset(cfg);
  save_dataset(train, (fs::path(o.outdir) / "train.jsonl").string(), &cfg);
  save_dataset(test, (fs::path(o.outdir) / "test.jsonl").string(), &cfg);
  write_manifest(o.outdir, "gen-data", o, {o.seed}, started);
  std::printf("wrote %d train / %d test graphs to %s\n", train.size(), test.size(),
              o.outdir.c_str());
  return 0;
}

int cmd_train(CliOptions o) {
  const auto started = std::chrono::system_clock::now();
  if (o.data_dir.empty()) throw CLI::ValidationError("train", "--data is required");
  if (o.outdir.empty()) o.outdir = "model";
  fs::create_directories(o.outdir);

  const Dataset train = load_dataset((fs::path(o.data_dir) / "train.jsonl").string());
  const Dataset test = load_dataset((fs::path(o.data_dir) / "test.jsonl").string());
  const auto prepared_train = prepare_all(train);
  const auto prepared_test = prepare_all(test);
  const auto train_ptrs = as_pointers(prepared_train);
  const auto test_ptrs = as_pointers(prepared_test);

  GnnModel model(64, kNumGraphClasses);
  Rng run_rng(o.seed);
  Rng init_rng = run_rng.child({kTagGnnInit});
  model.init_weights(init_rng);
  TrainConfig cfg = train_config(o);
  cfg.seed = run_rng.child({kTagGnnTrain}).seed();

  std::ofstream metrics(fs::path(o.outdir) / "metrics.csv", std::ios::binary);
  if (!metrics) throw std::runtime_error("cannot write metrics.csv");
  metrics << "epoch,loss,train_acc,test_acc\n";
  train_gnn(model, train_ptrs, cfg, [&](int epoch, double loss) {
    char row[128];
    std::snprintf(row, sizeof(row), "%d,%.17g,%.17g,%.17g\n", epoch, loss,
                  evaluate(model, train_ptrs), evaluate(model, test_ptrs));
    metrics << row;
    metrics.flush();
  });
  metrics.close();

  save_gnn_checkpoint(model, (fs::path(o.outdir) / "checkpoint").string());
  write_manifest(o.outdir, "train", o, {o.seed}, started);
  std::printf("final train acc %.4f, test acc %.4f; checkpoint in %s\n",
              evaluate(model, train_ptrs), evaluate(model, test_ptrs), o.outdir.c_str());
  return 0;
}

int cmd_attack(CliOptions o) {
  const auto started = std::chrono::system_clock::now();
  apply_smoke(o);
  if (o.outdir.empty()) o.outdir = "attack";
  fs::create_directories(o.outdir);
  AttackConfig cfg = attack_config(o);

  const bool have_artifacts = !o.data_dir.empty() || !o.checkpoint_dir.empty();
  if (have_artifacts && (o.data_dir.empty() || o.checkpoint_dir.empty()))
    throw CLI::ValidationError("attack", "--data and --checkpoint must be given together");

  CompareResult result;
  if (have_artifacts) {
    const Dataset train = load_dataset((fs::path(o.data_dir) / "train.jsonl").string());
    const Dataset test = load_dataset((fs::path(o.data_dir) / "test.jsonl").string());
    const GnnModel model = load_gnn_checkpoint(o.checkpoint_dir);
    write_config_json(cfg, (fs::path(o.outdir) / "config.json").string());
    if (o.policy == "both" || o.policy == "reinforce") {
      cfg.policy_kind = PolicyKind::Reinforce;
      result.reinforce = run_attack_on(train, test, model, cfg, o.outdir);
      require_no_failures(result.reinforce);
      result.mean_reward_reinforce = mean_reward_curve(result.reinforce);
    }
    if (o.policy == "both" || o.policy == "random") {
      cfg.policy_kind = PolicyKind::Random;
      result.random = run_attack_on(train, test, model, cfg, o.outdir);
      require_no_failures(result.random);
      result.mean_reward_random = mean_reward_curve(result.random);
    }
    if (o.policy == "both")
      write_summary_csv(result, cfg.summary_window,
                        (fs::path(o.outdir) / "summary.csv").string());
  } else if (o.policy == "both") {
    result = compare_policies(cfg, o.outdir);
    require_no_failures(result.reinforce);
    require_no_failures(result.random);
  } else {
    cfg.policy_kind = policy_kind_from_string(o.policy);
    write_config_json(cfg, (fs::path(o.outdir) / "config.json").string());
    const auto records = run_attack(cfg, o.outdir);
    require_no_failures(records);
  }
  write_manifest(o.outdir, "attack", o, cfg.resolved_seeds(), started);
  std::printf("attack records written to %s\n", o.outdir.c_str());
  return 0;
}

int cmd_analyze(CliOptions o) {
  const auto started = std::chrono::system_clock::now();
  if (o.records_dir.empty()) throw CLI::ValidationError("analyze", "--records is required");
  if (o.outdir.empty()) o.outdir = (fs::path(o.records_dir) / "analysis").string();
  const AnalysisInput input = load_analysis_input(o.records_dir);
  const AnalysisOutputs outputs = emit_reports(input, o.outdir, o.pool_runs);
  for (const auto& pa : outputs.policies) {
    std::printf("[%s] pooled r^2 = %.4f\n", to_string(pa.kind), pa.pooled_fit.r_squared);
    std::printf("[%s] class coefficient sums:", to_string(pa.kind));
    for (int c = 0; c < kNumGraphClasses; ++c)
      std::printf(" %s=%.4g", to_string(static_cast<GraphClass>(c)),
                  pa.class_sums.sums[static_cast<std::size_t>(c)]);
    std::printf("\n");
  }
  write_manifest(o.outdir, "analyze", o, {}, started);
  return 0;
}

int cmd_reproduce(CliOptions o) {
  const auto started = std::chrono::system_clock::now();
  if (o.experiment == "large") {
    o.min_nodes = 1500;
    o.max_nodes = 2000;
  } else if (o.experiment != "small") {
    throw CLI::ValidationError("reproduce", "experiment must be 'small' or 'large'");
  }
  apply_smoke(o);
  if (o.outdir.empty()) o.outdir = "reproduce_" + o.experiment + (o.smoke ? "_smoke" : "");
  const AttackConfig cfg = attack_config(o);

  const std::string records_dir = (fs::path(o.outdir) / "records").string();
  std::string stage = "attack";
  CompareResult result;
  try {
    result = compare_policies(cfg, records_dir);
    require_no_failures(result.reinforce);
    require_no_failures(result.random);
    stage = "analyze";
    const AnalysisInput input = load_analysis_input(records_dir);
    emit_reports(input, (fs::path(o.outdir) / "analysis").string(), o.pool_runs);
  } catch (const std::exception& e) {
    throw std::runtime_error("stage '" + stage + "' failed (partial outputs kept in " +
                             o.outdir + "): " + e.what());
  }

  const int tail = std::min(20, o.episodes);
  std::printf("\n=== %s experiment: mean episodic reward (REINFORCE vs random) ===\n",
              o.experiment.c_str());
  std::printf("overall:  reinforce %+.5f   random %+.5f\n",
              tail_mean(result.mean_reward_reinforce, o.episodes),
              tail_mean(result.mean_reward_random, o.episodes));
  std::printf("final %d: reinforce %+.5f   random %+.5f\n", tail,
              tail_mean(result.mean_reward_reinforce, tail),
              tail_mean(result.mean_reward_random, tail));
  write_manifest(o.outdir, "reproduce", o, cfg.resolved_seeds(), started);
  return 0;
}

void add_common_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--seed", o.seed, "Base seed for all derived random streams");
  cmd->add_option("--train-size", o.train_size, "Training graphs per dataset");
  cmd->add_option("--test-size", o.test_size, "Test graphs per dataset");
  cmd->add_option("--min-nodes", o.min_nodes, "Minimum drawn node count");
  cmd->add_option("--max-nodes", o.max_nodes, "Maximum drawn node count");
  cmd->add_option("--epochs", o.epochs, "Victim training epochs");
  cmd->add_option("--batch-size", o.batch_size, "Victim mini-batch size");
  cmd->add_option("--gnn-lr", o.gnn_lr, "Victim learning rate");
  cmd->add_option("--episodes", o.episodes, "Episodes per run");
  cmd->add_option("--poison-points", o.poison_points, "Poison points per episode");
  cmd->add_option("--runs", o.runs, "Independent seeded runs");
  cmd->add_option("--policy", o.policy, "Policy: reinforce, random or both");
  cmd->add_option("--policy-lr", o.policy_lr, "REINFORCE learning rate");
  cmd->add_option("--gamma", o.gamma, "Return discount factor");
  cmd->add_option("--jobs", o.jobs, "Parallel workers at run granularity");
  cmd->add_option("--outdir", o.outdir, "Output directory");
  cmd->add_flag("--extended-actions", o.extended_actions,
                "Expose node/edge edit actions next to subgraph insertion");
  cmd->add_flag("--smoke", o.smoke, "CI scale: 1 run, 5 episodes, p=2");
  cmd->add_flag("--pool-runs", o.pool_runs, "Average regression rows over runs per episode");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"poisonlab: poisoning attacks on a graph classifier"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CliOptions opts;

  // Config file values load first; explicit flags override them.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    try {
      if (arg == "--config" && i + 1 < argc) apply_json_config(opts, argv[i + 1]);
      else if (arg.rfind("--config=", 0) == 0) apply_json_config(opts, arg.substr(9));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
  }
  std::string config_path;

  CLI::App* gen = app.add_subcommand("gen-data", "Generate the synthetic dataset");
  CLI::App* train = app.add_subcommand("train", "Train the victim GNN");
  CLI::App* attack = app.add_subcommand("attack", "Run the poisoning attack");
  CLI::App* analyze = app.add_subcommand("analyze", "Analyze attack records");
  CLI::App* reproduce = app.add_subcommand("reproduce", "Full pipeline with reference defaults");

  for (CLI::App* cmd : {gen, train, attack, analyze, reproduce}) {
    add_common_options(cmd, opts);
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
  }
  train->add_option("--data", opts.data_dir, "Dataset directory from gen-data");
  attack->add_option("--data", opts.data_dir, "Dataset directory (with --checkpoint)");
  attack->add_option("--checkpoint", opts.checkpoint_dir, "Victim checkpoint directory");
  analyze->add_option("--records", opts.records_dir, "Attack output directory");
  reproduce->add_option("experiment", opts.experiment, "small or large");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::printf("resolved config: %s\n", resolved_config(opts).dump().c_str());
    if (gen->parsed()) return cmd_gen_data(opts);
    if (train->parsed()) return cmd_train(opts);
    if (attack->parsed()) return cmd_attack(opts);
    if (analyze->parsed()) return cmd_analyze(opts);
    if (reproduce->parsed()) return cmd_reproduce(opts);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
