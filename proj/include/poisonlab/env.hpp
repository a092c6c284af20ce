#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "poisonlab/dataset.hpp"
#include "poisonlab/gnn.hpp"

namespace poisonlab {

// Kinds of perturbation an action can request. The default action space
// exposes SubgraphAdd only; the extended space adds the single-element
// edits in this order.
enum class ActionKind : int {
  SubgraphAdd = 0,
  NodeDelete = 1,
  NodeAdd = 2,
  EdgeDelete = 3,
  EdgeAdd = 4,
};

inline constexpr int kNumActionKinds = 5;

struct ActionSpec {
  int graph_index = 0;
  ActionKind kind = ActionKind::SubgraphAdd;
};

struct EnvState {
  std::vector<double> encoding;  // 5 * |train| standardized stats
  int poison_step = 0;           // in [0, p]
};

struct StepOutcome {
  double reward = 0.0;  // acc_prev - acc_after
  EnvState next_state;
  double acc_after = 0.0;
};

struct EnvConfig {
  int poison_points = 10;
  int gnp_nodes = 10;
  double gnp_edge_prob = 0.75;
  bool extended_actions = false;
  // Reward baseline: fixed at episode start (default) or updated after each
  // step so rewards become per-step deltas.
  bool differential_reward = false;
  // Carry Adam moments and step count into retraining (true warm start).
  bool carry_optimizer_state = true;
  int retrain_batch_size = 32;
  // When set, overrides the victim's learning rate during retraining.
  std::optional<double> retrain_lr;
};

// Raw state encoding: per graph, in dataset order,
// [num_nodes, num_edges, mean_degree, max_degree, min_degree].
std::vector<double> encode_state(const Dataset& train);

// Number of actions the environment exposes for a training set of this size.
int action_space_size(int train_size, bool extended_actions);

// The poisoning MDP. reset() clones the training set and the trained victim,
// step() perturbs one clone graph, retrains the victim clone for one epoch,
// and rewards the drop of test accuracy relative to the episode baseline.
// Originals passed to reset() are never mutated.
class PoisonEnv {
 public:
  explicit PoisonEnv(EnvConfig cfg) : cfg_(cfg) {}

  // Throws std::invalid_argument on an untrained model or empty sets.
  EnvState reset(const Dataset& train, const GnnModel& model, const Dataset& test);

  // Applies the action, retrains one epoch and scores. rng must be a fresh
  // per-step stream; children {0} and {1} of it drive the perturbation and
  // the retrain shuffle respectively. Throws std::logic_error once
  // poison_points steps were taken.
  StepOutcome step(const ActionSpec& action, const Rng& rng);

  int num_actions() const;
  ActionSpec decode_action(int action_id) const;
  int encode_action(const ActionSpec& a) const;

  int train_size() const { return static_cast<int>(clone_graphs_.size()); }
  int state_dim() const { return 5 * train_size(); }
  int poison_step() const { return step_idx_; }
  int poison_budget() const { return cfg_.poison_points; }
  double baseline_accuracy() const { return baseline_acc_; }

  // Read-only views of the episode clone, for logging and verification.
  const Graph& train_graph(int index) const { return *clone_graphs_.at(static_cast<std::size_t>(index)); }
  const GnnModel& victim() const;

 private:
  EnvState make_state() const;
  void rebuild_channel_stats();

  EnvConfig cfg_;
  // Pristine copies shared across episodes; rebuilt only when reset() sees a
  // different training set object.
  const Dataset* train_src_ = nullptr;
  const GnnModel* model_src_ = nullptr;
  const Dataset* test_src_ = nullptr;
  std::vector<std::shared_ptr<const Graph>> pristine_graphs_;
  std::vector<std::shared_ptr<const PreparedGraph>> pristine_prepared_;
  std::vector<std::array<double, 5>> pristine_stats_;
  std::vector<PreparedGraph> prepared_test_;
  double baseline_acc_ = 0.0;
  std::array<double, 5> ch_mean_{};
  std::array<double, 5> ch_std_{};

  // Episode state.
  std::vector<std::shared_ptr<const Graph>> clone_graphs_;
  std::vector<std::shared_ptr<const PreparedGraph>> clone_prepared_;
  std::vector<std::array<double, 5>> clone_stats_;
  std::optional<GnnModel> victim_;
  double acc_prev_ = 0.0;
  int step_idx_ = 0;
  bool episode_open_ = false;
};

}  // namespace poisonlab
