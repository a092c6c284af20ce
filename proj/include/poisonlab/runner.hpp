#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "poisonlab/agent.hpp"
#include "poisonlab/dataset.hpp"
#include "poisonlab/env.hpp"
#include "poisonlab/gnn.hpp"

namespace poisonlab {

enum class PolicyKind : int { Reinforce = 0, Random = 1 };
const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& s);

// Stream tags: every random draw of a run derives from Rng(run_seed) and one
// of these tag paths, so any draw can be replayed from the logged seed.
//   gnn init     child({kTagGnnInit})
//   gnn train    seed of child({kTagGnnTrain})
//   policy init  child({kTagPolicyInit, policy})
//   agent step   child({kTagAgent, policy, episode, step})
//   env step     child({kTagEnvStep, policy, episode, step})
inline constexpr std::uint64_t kTagGnnInit = 2;
inline constexpr std::uint64_t kTagGnnTrain = 3;
inline constexpr std::uint64_t kTagPolicyInit = 4;
inline constexpr std::uint64_t kTagAgent = 5;
inline constexpr std::uint64_t kTagEnvStep = 6;

Rng env_step_rng(std::uint64_t run_seed, PolicyKind policy, int episode, int step);
Rng agent_step_rng(std::uint64_t run_seed, PolicyKind policy, int episode, int step);

struct AttackConfig {
  DatasetConfig dataset{};
  TrainConfig train{};
  EnvConfig env{};
  int n_episodes = 175;
  int n_runs = 10;
  PolicyKind policy_kind = PolicyKind::Reinforce;
  std::uint64_t base_seed = 1;
  std::vector<std::uint64_t> seeds;  // one per run; derived from base_seed when empty
  int policy_hidden = 128;
  double policy_lr = 1e-2;
  bool policy_plain_sgd = false;
  double gamma = 0.99;
  int jobs = 1;
  int summary_window = 10;

  std::vector<std::uint64_t> resolved_seeds() const;
  void validate() const;
};

struct EpisodeRecord {
  double episode_reward = 0.0;
  std::vector<int> actions;
  std::vector<double> acc_after;
  std::vector<double> rewards;
};

struct RunRecord {
  int run_index = 0;
  std::uint64_t seed = 0;
  PolicyKind policy = PolicyKind::Reinforce;
  double baseline_acc = 0.0;
  std::vector<EpisodeRecord> episodes;
  std::string error;  // non-empty when the run failed

  bool failed() const { return !error.empty(); }
};

// One episode of the poison attack: reset, p steps, one policy update when a
// learned policy is attached (policy == nullptr means the uniform baseline).
EpisodeRecord run_episode(PoisonEnv& env, const Dataset& train, const GnnModel& model,
                          const Dataset& test, PolicyModel* policy, PolicyKind kind,
                          std::uint64_t run_seed, int episode_index, double gamma);

// Full single-policy experiment; per run: generate a dataset from the run
// seed, train a fresh victim, run n_episodes episodes. Records are persisted
// incrementally under outdir/<policy>/run_XXX/ when outdir is non-empty.
// A failing run is recorded (RunRecord::error) without affecting the others.
std::vector<RunRecord> run_attack(const AttackConfig& cfg, const std::string& outdir = "");

// Same episode loop on externally supplied artifacts (dataset + trained
// victim shared by every run); only the RL streams vary per run.
std::vector<RunRecord> run_attack_on(const Dataset& train, const Dataset& test,
                                     const GnnModel& model, const AttackConfig& cfg,
                                     const std::string& outdir = "");

struct CompareResult {
  std::vector<RunRecord> reinforce;
  std::vector<RunRecord> random;
  // Per-episode mean episodic reward over runs.
  std::vector<double> mean_reward_reinforce;
  std::vector<double> mean_reward_random;
};

// Paired comparison: both policies attack the same per-seed dataset and
// baseline model. Parallel over runs (cfg.jobs workers).
CompareResult compare_policies(const AttackConfig& cfg, const std::string& outdir = "");

// Mean episodic reward per episode index over successful runs.
std::vector<double> mean_reward_curve(const std::vector<RunRecord>& runs);
// Trailing moving average of a curve.
std::vector<double> windowed_mean(const std::vector<double>& curve, int window);

void write_config_json(const AttackConfig& cfg, const std::string& path);
void write_summary_csv(const CompareResult& result, int window, const std::string& path);

}  // namespace poisonlab
