#include "poisonlab/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace poisonlab {

namespace {

struct PolicyCache {
  std::vector<double> pre;     // hidden pre-activation
  std::vector<double> hidden;  // relu(pre)
  std::vector<double> logits;
};

std::vector<double> forward(const PolicyModel& p, std::span<const double> state,
                            PolicyCache& cache) {
  if (static_cast<int>(state.size()) != p.state_dim)
    throw std::invalid_argument("policy: state dimension mismatch: got " +
                                std::to_string(state.size()) + ", expected " +
                                std::to_string(p.state_dim));
  const int H = p.hidden_dim;
  const int A = p.num_actions;
  cache.pre.assign(static_cast<std::size_t>(H), 0.0);
  for (int i = 0; i < p.state_dim; ++i) {
    const double si = state[static_cast<std::size_t>(i)];
    if (si == 0.0) continue;
    const double* w_row = p.layer1.value.row(i);
    for (int j = 0; j < H; ++j) cache.pre[static_cast<std::size_t>(j)] += si * w_row[j];
  }
  cache.hidden = cache.pre;
  for (double& v : cache.hidden) v = v > 0.0 ? v : 0.0;
  cache.logits.assign(static_cast<std::size_t>(A), 0.0);
  for (int j = 0; j < H; ++j) {
    const double hj = cache.hidden[static_cast<std::size_t>(j)];
    if (hj == 0.0) continue;
    const double* w_row = p.layer2.value.row(j);
    for (int a = 0; a < A; ++a) cache.logits[static_cast<std::size_t>(a)] += hj * w_row[a];
  }
  return softmax(cache.logits);
}

}  // namespace

void PolicyModel::init_weights(Rng& rng) {
  for (double& w : layer1.value.data) w = rng.normal(0.0, std::sqrt(2.0 / state_dim));
  // Output layer starts at zero so the initial distribution is uniform.
  layer2.value.fill(0.0);
}

std::vector<double> policy_probs(const PolicyModel& policy, std::span<const double> state) {
  PolicyCache cache;
  return forward(policy, state, cache);
}

std::pair<int, double> select_action(const PolicyModel& policy, std::span<const double> state,
                                     Rng& rng) {
  const auto probs = policy_probs(policy, state);
  const double r = rng.uniform_real();
  double cum = 0.0;
  int chosen = -1;
  for (int a = 0; a < policy.num_actions; ++a) {
    const double pa = probs[static_cast<std::size_t>(a)];
    if (pa > 0.0) chosen = a;
    cum += pa;
    if (r < cum) return {a, std::log(probs[static_cast<std::size_t>(a)])};
  }
  // r landed beyond the accumulated sum (rounding); take the last action
  // that had any mass.
  return {chosen, std::log(probs[static_cast<std::size_t>(chosen)])};
}

int random_select(int num_actions, Rng& rng) {
  if (num_actions < 1) throw std::invalid_argument("random_select: need at least one action");
  return rng.uniform_int(num_actions);
}

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  if (rewards.empty()) throw std::invalid_argument("discounted_returns: empty rewards");
  std::vector<double> g(rewards.size());
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    g[i] = acc;
  }
  return g;
}

std::vector<double> compute_returns(std::span<const double> rewards, double gamma) {
  std::vector<double> g = discounted_returns(rewards, gamma);
  const auto n = static_cast<double>(g.size());
  double mean = 0.0;
  for (double v : g) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : g) var += (v - mean) * (v - mean);
  const double std_dev = g.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  const double denom = std::max(std_dev, 1e-8);
  for (double& v : g) v = (v - mean) / denom;
  return g;
}

void Trajectory::push(std::vector<double> state, int action, double log_prob, double reward) {
  states.push_back(std::move(state));
  actions.push_back(action);
  log_probs.push_back(log_prob);
  rewards.push_back(reward);
}

void policy_gradients(PolicyModel& policy, const Trajectory& traj,
                      std::span<const double> returns) {
  if (traj.size() != returns.size())
    throw std::invalid_argument("policy_gradients: trajectory/returns length mismatch");
  policy.layer1.zero_grad();
  policy.layer2.zero_grad();
  const int H = policy.hidden_dim;
  const int A = policy.num_actions;
  PolicyCache cache;
  std::vector<double> dlogits(static_cast<std::size_t>(A));
  std::vector<double> dhidden(static_cast<std::size_t>(H));
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto& state = traj.states[t];
    const auto probs = forward(policy, state, cache);
    const double gt = returns[t];
    // d(-log pi(a)) / dlogits = probs - onehot(a), scaled by the return.
    for (int a = 0; a < A; ++a) dlogits[static_cast<std::size_t>(a)] = probs[static_cast<std::size_t>(a)] * gt;
    dlogits[static_cast<std::size_t>(traj.actions[t])] -= gt;

    std::fill(dhidden.begin(), dhidden.end(), 0.0);
    for (int j = 0; j < H; ++j) {
      const double hj = cache.hidden[static_cast<std::size_t>(j)];
      double* g_row = policy.layer2.grad.row(j);
      const double* w_row = policy.layer2.value.row(j);
      double acc = 0.0;
      for (int a = 0; a < A; ++a) {
        g_row[a] += hj * dlogits[static_cast<std::size_t>(a)];
        acc += dlogits[static_cast<std::size_t>(a)] * w_row[a];
      }
      dhidden[static_cast<std::size_t>(j)] = cache.pre[static_cast<std::size_t>(j)] > 0.0 ? acc : 0.0;
    }
    for (int i = 0; i < policy.state_dim; ++i) {
      const double si = state[static_cast<std::size_t>(i)];
      if (si == 0.0) continue;
      double* g_row = policy.layer1.grad.row(i);
      for (int j = 0; j < H; ++j) g_row[j] += si * dhidden[static_cast<std::size_t>(j)];
    }
  }
}

void policy_update(PolicyModel& policy, const Trajectory& traj, double gamma) {
  if (traj.size() == 0) throw std::invalid_argument("policy_update: empty trajectory");
  const auto returns = compute_returns(traj.rewards, gamma);
  if (std::all_of(returns.begin(), returns.end(), [](double g) { return g == 0.0; })) return;
  policy_gradients(policy, traj, returns);
  const std::int64_t t = ++policy.step_count;
  adam_step(policy.layer1, policy.opt, t);
  adam_step(policy.layer2, policy.opt, t);
}

}  // namespace poisonlab
