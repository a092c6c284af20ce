#pragma once

#include <span>
#include <utility>
#include <vector>

#include "poisonlab/matrix.hpp"
#include "poisonlab/rng.hpp"

namespace poisonlab {

// One-hidden-layer policy network: softmax(relu(s W1) W2).
struct PolicyModel {
  int state_dim = 0;
  int hidden_dim = 128;
  int num_actions = 0;
  ParamTensor layer1;  // state_dim x hidden
  ParamTensor layer2;  // hidden x |A|
  OptimizerConfig opt{};
  std::int64_t step_count = 0;

  PolicyModel(int state_dim_, int hidden, int actions)
      : state_dim(state_dim_), hidden_dim(hidden), num_actions(actions),
        layer1(state_dim_, hidden), layer2(hidden, actions) {}

  void init_weights(Rng& rng);
};

// Action distribution for a state. Throws on a dimension mismatch.
std::vector<double> policy_probs(const PolicyModel& policy, std::span<const double> state);

// Samples an action from the policy distribution; returns (action, log-prob).
std::pair<int, double> select_action(const PolicyModel& policy, std::span<const double> state,
                                     Rng& rng);

// Uniform-random baseline policy.
int random_select(int num_actions, Rng& rng);

// G_t = r_t + gamma * G_{t+1}; plain discounted returns, no standardization.
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma);

// Discounted returns standardized to zero mean / unit variance (sample std,
// floored at 1e-8). Throws on empty rewards.
std::vector<double> compute_returns(std::span<const double> rewards, double gamma);

struct Trajectory {
  std::vector<std::vector<double>> states;
  std::vector<int> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;

  std::size_t size() const { return actions.size(); }
  void push(std::vector<double> state, int action, double log_prob, double reward);
};

// Fills the grad buffers with the gradient of
//   loss = -sum_t log pi(a_t | s_t) * G_t
// for the given standardized returns. Does not touch parameter values.
void policy_gradients(PolicyModel& policy, const Trajectory& traj,
                      std::span<const double> returns);

// One REINFORCE update from a complete trajectory. No-op when every
// standardized return is exactly zero (the gradient vanishes identically).
void policy_update(PolicyModel& policy, const Trajectory& traj, double gamma);

}  // namespace poisonlab
