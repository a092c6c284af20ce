#include "poisonlab/runner.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "poisonlab/checkpoint.hpp"

namespace poisonlab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::mutex g_log_mutex;

void log_line(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::fprintf(stderr, "%s\n", msg.c_str());
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Incremental per-run CSV writer; one row per poison point.
class RecordWriter {
 public:
  RecordWriter() = default;
  explicit RecordWriter(const std::string& run_dir) {
    if (run_dir.empty()) return;
    fs::create_directories(run_dir);
    path_ = (fs::path(run_dir) / "records.csv").string();
    out_.open(path_, std::ios::binary);
    if (!out_) throw std::runtime_error("cannot open for writing: " + path_);
    out_ << "episode,step,action,acc_after,reward\n";
    out_.flush();
  }

  void append(int episode, const EpisodeRecord& rec) {
    if (!out_.is_open()) return;
    for (std::size_t t = 0; t < rec.actions.size(); ++t) {
      out_ << episode << ',' << t << ',' << rec.actions[t] << ','
           << format_double(rec.acc_after[t]) << ',' << format_double(rec.rewards[t]) << '\n';
    }
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

void write_run_meta(const std::string& run_dir, const RunRecord& rec, const AttackConfig& cfg,
                    const Dataset& train, int num_actions) {
  if (run_dir.empty()) return;
  json labels = json::array();
  for (const Graph& g : train.graphs) labels.push_back(g.label.value_or(-1));
  const json meta{
      {"run_index", rec.run_index},
      {"seed", rec.seed},
      {"policy", to_string(rec.policy)},
      {"baseline_accuracy", rec.baseline_acc},
      {"n_episodes", cfg.n_episodes},
      {"poison_points", cfg.env.poison_points},
      {"train_size", train.size()},
      {"num_actions", num_actions},
      {"n_action_kinds", cfg.env.extended_actions ? kNumActionKinds : 1},
      {"action_encoding", "graph_index * n_action_kinds + kind"},
      {"labels", labels},
  };
  std::ofstream out(fs::path(run_dir) / "meta.json");
  if (!out) throw std::runtime_error("cannot write run meta in " + run_dir);
  out << meta.dump(2) << '\n';
}

std::string run_dir_for(const std::string& outdir, PolicyKind kind, int run_index) {
  if (outdir.empty()) return "";
  char name[32];
  std::snprintf(name, sizeof(name), "run_%03d", run_index);
  return (fs::path(outdir) / to_string(kind) / name).string();
}

// Episode loop for one policy on fixed artifacts, with incremental writes.
RunRecord run_policy_loop(const AttackConfig& cfg, PolicyKind kind, int run_index,
                          std::uint64_t seed, const Dataset& train, const Dataset& test,
                          const GnnModel& model, const std::string& run_dir) {
  RunRecord rec;
  rec.run_index = run_index;
  rec.seed = seed;
  rec.policy = kind;

  EnvConfig env_cfg = cfg.env;
  PoisonEnv env(env_cfg);
  env.reset(train, model, test);  // establish baseline + action space
  rec.baseline_acc = env.baseline_accuracy();

  RecordWriter writer(run_dir);
  write_run_meta(run_dir, rec, cfg, train, env.num_actions());

  std::unique_ptr<PolicyModel> policy;
  if (kind == PolicyKind::Reinforce) {
    policy = std::make_unique<PolicyModel>(env.state_dim(), cfg.policy_hidden,
                                           env.num_actions());
    Rng init_rng = Rng(seed).child({kTagPolicyInit, static_cast<std::uint64_t>(kind)});
    policy->init_weights(init_rng);
    policy->opt.lr = cfg.policy_lr;
    policy->opt.plain_sgd = cfg.policy_plain_sgd;
  }

  rec.episodes.reserve(static_cast<std::size_t>(cfg.n_episodes));
  for (int e = 0; e < cfg.n_episodes; ++e) {
    EpisodeRecord ep = run_episode(env, train, model, test, policy.get(), kind, seed, e,
                                   cfg.gamma);
    writer.append(e, ep);
    rec.episodes.push_back(std::move(ep));
  }
  if (policy && !run_dir.empty())
    save_policy_checkpoint(*policy, (fs::path(run_dir) / "policy_final").string());
  return rec;
}

struct RunArtifacts {
  Dataset train;
  Dataset test;
  GnnModel model{};
};

// Per-seed artifacts of the paired design: dataset and trained victim.
RunArtifacts build_artifacts(const AttackConfig& cfg, std::uint64_t seed) {
  RunArtifacts art;
  DatasetConfig ds_cfg = cfg.dataset;
  ds_cfg.seed = seed;
  std::tie(art.train, art.test) = generate_dataset(ds_cfg);
  art.model = GnnModel(64, kNumGraphClasses);
  Rng run_rng(seed);
  Rng init_rng = run_rng.child({kTagGnnInit});
  art.model.init_weights(init_rng);
  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = run_rng.child({kTagGnnTrain}).seed();
  train_gnn(art.model, art.train, train_cfg);
  return art;
}

// Executes fn(run_index) for every run, with up to `jobs` worker threads.
// Runs are fully independent, so execution order cannot change any record.
void for_each_run(int n_runs, int jobs, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(jobs, n_runs));
  if (workers == 1) {
    for (int i = 0; i < n_runs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

const char* to_string(PolicyKind kind) {
  return kind == PolicyKind::Reinforce ? "reinforce" : "random";
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "reinforce") return PolicyKind::Reinforce;
  if (s == "random") return PolicyKind::Random;
  throw std::invalid_argument("unknown policy kind: " + s);
}

Rng env_step_rng(std::uint64_t run_seed, PolicyKind policy, int episode, int step) {
  return Rng(run_seed).child({kTagEnvStep, static_cast<std::uint64_t>(policy),
                              static_cast<std::uint64_t>(episode),
                              static_cast<std::uint64_t>(step)});
}

Rng agent_step_rng(std::uint64_t run_seed, PolicyKind policy, int episode, int step) {
  return Rng(run_seed).child({kTagAgent, static_cast<std::uint64_t>(policy),
                              static_cast<std::uint64_t>(episode),
                              static_cast<std::uint64_t>(step)});
}

std::vector<std::uint64_t> AttackConfig::resolved_seeds() const {
  if (!seeds.empty()) {
    if (static_cast<int>(seeds.size()) != n_runs)
      throw std::invalid_argument("attack config: need one seed per run");
    return seeds;
  }
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(n_runs));
  for (int i = 0; i < n_runs; ++i)
    out.push_back(mix64(base_seed ^ mix64(static_cast<std::uint64_t>(i))));
  return out;
}

void AttackConfig::validate() const {
  if (n_episodes < 1 || n_runs < 1 || env.poison_points < 1)
    throw std::invalid_argument("attack config: counts must be >= 1");
  if (jobs < 1) throw std::invalid_argument("attack config: jobs must be >= 1");
  dataset.validate();
  (void)resolved_seeds();
}

EpisodeRecord run_episode(PoisonEnv& env, const Dataset& train, const GnnModel& model,
                          const Dataset& test, PolicyModel* policy, PolicyKind kind,
                          std::uint64_t run_seed, int episode_index, double gamma) {
  EnvState state = env.reset(train, model, test);
  EpisodeRecord rec;
  Trajectory traj;
  for (int step = 0; step < env.poison_budget(); ++step) {
    Rng agent_rng = agent_step_rng(run_seed, kind, episode_index, step);
    int action;
    double log_prob = 0.0;
    if (policy) {
      std::tie(action, log_prob) = select_action(*policy, state.encoding, agent_rng);
    } else {
      action = random_select(env.num_actions(), agent_rng);
    }
    StepOutcome out =
        env.step(env.decode_action(action), env_step_rng(run_seed, kind, episode_index, step));
    rec.actions.push_back(action);
    rec.acc_after.push_back(out.acc_after);
    rec.rewards.push_back(out.reward);
    rec.episode_reward += out.reward;
    traj.push(std::move(state.encoding), action, log_prob, out.reward);
    state = std::move(out.next_state);
  }
  if (policy) policy_update(*policy, traj, gamma);
  return rec;
}

std::vector<RunRecord> run_attack(const AttackConfig& cfg, const std::string& outdir) {
  cfg.validate();
  const auto seeds = cfg.resolved_seeds();
  std::vector<RunRecord> records(static_cast<std::size_t>(cfg.n_runs));
  for_each_run(cfg.n_runs, cfg.jobs, [&](int i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      const RunArtifacts art = build_artifacts(cfg, seeds[idx]);
      records[idx] = run_policy_loop(cfg, cfg.policy_kind, i, seeds[idx], art.train, art.test,
                                     art.model, run_dir_for(outdir, cfg.policy_kind, i));
    } catch (const std::exception& e) {
      records[idx].run_index = i;
      records[idx].seed = seeds[idx];
      records[idx].policy = cfg.policy_kind;
      records[idx].error = e.what();
      log_line("run " + std::to_string(i) + " failed: " + records[idx].error);
    }
  });
  return records;
}

std::vector<RunRecord> run_attack_on(const Dataset& train, const Dataset& test,
                                     const GnnModel& model, const AttackConfig& cfg,
                                     const std::string& outdir) {
  cfg.validate();
  const auto seeds = cfg.resolved_seeds();
  std::vector<RunRecord> records(static_cast<std::size_t>(cfg.n_runs));
  for_each_run(cfg.n_runs, cfg.jobs, [&](int i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      records[idx] = run_policy_loop(cfg, cfg.policy_kind, i, seeds[idx], train, test, model,
                                     run_dir_for(outdir, cfg.policy_kind, i));
    } catch (const std::exception& e) {
      records[idx].run_index = i;
      records[idx].seed = seeds[idx];
      records[idx].policy = cfg.policy_kind;
      records[idx].error = e.what();
      log_line("run " + std::to_string(i) + " failed: " + records[idx].error);
    }
  });
  return records;
}

CompareResult compare_policies(const AttackConfig& cfg, const std::string& outdir) {
  cfg.validate();
  const auto seeds = cfg.resolved_seeds();
  CompareResult result;
  result.reinforce.resize(static_cast<std::size_t>(cfg.n_runs));
  result.random.resize(static_cast<std::size_t>(cfg.n_runs));
  if (!outdir.empty()) {
    fs::create_directories(outdir);
    write_config_json(cfg, (fs::path(outdir) / "config.json").string());
  }
  for_each_run(cfg.n_runs, cfg.jobs, [&](int i) {
    const auto idx = static_cast<std::size_t>(i);
    const std::uint64_t seed = seeds[idx];
    try {
      log_line("[run " + std::to_string(i) + "] seed " + std::to_string(seed) +
               ": generating data and training baseline");
      const RunArtifacts art = build_artifacts(cfg, seed);
      for (const PolicyKind kind : {PolicyKind::Reinforce, PolicyKind::Random}) {
        auto& slot = kind == PolicyKind::Reinforce ? result.reinforce[idx] : result.random[idx];
        slot = run_policy_loop(cfg, kind, i, seed, art.train, art.test, art.model,
                               run_dir_for(outdir, kind, i));
        log_line("[run " + std::to_string(i) + "] " + to_string(kind) + " done, baseline acc " +
                 format_double(slot.baseline_acc));
      }
    } catch (const std::exception& e) {
      for (auto* slot : {&result.reinforce[idx], &result.random[idx]}) {
        slot->run_index = i;
        slot->seed = seed;
        slot->error = e.what();
      }
      result.random[idx].policy = PolicyKind::Random;
      log_line("run " + std::to_string(i) + " failed: " + std::string(e.what()));
    }
  });
  result.mean_reward_reinforce = mean_reward_curve(result.reinforce);
  result.mean_reward_random = mean_reward_curve(result.random);
  if (!outdir.empty())
    write_summary_csv(result, cfg.summary_window, (fs::path(outdir) / "summary.csv").string());
  return result;
}

std::vector<double> mean_reward_curve(const std::vector<RunRecord>& runs) {
  std::size_t n_episodes = 0;
  int counted = 0;
  for (const auto& r : runs)
    if (!r.failed()) {
      if (counted > 0 && r.episodes.size() != n_episodes)
        throw std::invalid_argument("mean_reward_curve: runs disagree on episode count");
      n_episodes = r.episodes.size();
      ++counted;
    }
  std::vector<double> curve(n_episodes, 0.0);
  if (counted == 0) return curve;
  for (const auto& r : runs) {
    if (r.failed()) continue;
    for (std::size_t e = 0; e < n_episodes; ++e) curve[e] += r.episodes[e].episode_reward;
  }
  for (double& v : curve) v /= counted;
  return curve;
}

std::vector<double> windowed_mean(const std::vector<double>& curve, int window) {
  std::vector<double> out(curve.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    acc += curve[i];
    if (i >= static_cast<std::size_t>(window)) acc -= curve[i - static_cast<std::size_t>(window)];
    out[i] = acc / static_cast<double>(std::min<std::size_t>(i + 1, static_cast<std::size_t>(window)));
  }
  return out;
}

void write_config_json(const AttackConfig& cfg, const std::string& path) {
  json j{
      {"dataset",
       {{"train_size", cfg.dataset.train_size},
        {"test_size", cfg.dataset.test_size},
        {"min_nodes", cfg.dataset.min_nodes},
        {"max_nodes", cfg.dataset.max_nodes}}},
      {"train",
       {{"epochs", cfg.train.epochs},
        {"batch_size", cfg.train.batch_size},
        {"lr", cfg.train.opt.lr},
        {"plain_sgd", cfg.train.opt.plain_sgd}}},
      {"env",
       {{"poison_points", cfg.env.poison_points},
        {"gnp_nodes", cfg.env.gnp_nodes},
        {"gnp_edge_prob", cfg.env.gnp_edge_prob},
        {"extended_actions", cfg.env.extended_actions},
        {"differential_reward", cfg.env.differential_reward},
        {"carry_optimizer_state", cfg.env.carry_optimizer_state},
        {"retrain_batch_size", cfg.env.retrain_batch_size}}},
      {"n_episodes", cfg.n_episodes},
      {"n_runs", cfg.n_runs},
      {"policy_kind", to_string(cfg.policy_kind)},
      {"base_seed", cfg.base_seed},
      {"seeds", cfg.resolved_seeds()},
      {"policy_hidden", cfg.policy_hidden},
      {"policy_lr", cfg.policy_lr},
      {"gamma", cfg.gamma},
      {"jobs", cfg.jobs},
      {"summary_window", cfg.summary_window},
      {"paired_seeding", true},
  };
  if (cfg.env.retrain_lr) j["env"]["retrain_lr"] = *cfg.env.retrain_lr;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_summary_csv(const CompareResult& result, int window, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "episode,policy,mean_reward,mean_reward_windowed\n";
  const auto emit = [&](const std::vector<double>& curve, const char* name) {
    const auto smoothed = windowed_mean(curve, window);
    for (std::size_t e = 0; e < curve.size(); ++e)
      out << e << ',' << name << ',' << format_double(curve[e]) << ','
          << format_double(smoothed[e]) << '\n';
  };
  emit(result.mean_reward_reinforce, "reinforce");
  emit(result.mean_reward_random, "random");
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace poisonlab
