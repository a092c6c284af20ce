#include "doctest.h"
#include "poisonlab/agent.hpp"

#include <cmath>

using namespace poisonlab;

namespace {

PolicyModel make_policy(int state_dim, int hidden, int actions, std::uint64_t seed) {
  PolicyModel p(state_dim, hidden, actions);
  Rng rng(seed);
  p.init_weights(rng);
  return p;
}

double traj_loss(const PolicyModel& policy, const Trajectory& traj,
                 std::span<const double> returns) {
  double loss = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto probs = policy_probs(policy, traj.states[t]);
    loss -= std::log(probs[static_cast<std::size_t>(traj.actions[t])]) * returns[t];
  }
  return loss;
}

}  // namespace

TEST_CASE("zero weights sample uniformly") {
  PolicyModel policy(4, 8, 5);  // zero init
  const std::vector<double> state{0.2, -1.0, 0.5, 3.0};
  const auto probs = policy_probs(policy, state);
  for (double p : probs) CHECK(p == doctest::Approx(0.2).epsilon(1e-15));

  Rng rng(5);
  std::array<int, 5> counts{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    counts[static_cast<std::size_t>(select_action(policy, state, rng).first)]++;
  // Multinomial 3-sigma band around p = 0.2.
  const double sigma = std::sqrt(draws * 0.2 * 0.8);
  for (int c = 0; c < 5; ++c)
    CHECK(std::abs(counts[static_cast<std::size_t>(c)] - draws * 0.2) < 3.0 * sigma);
}

TEST_CASE("a dominant logit is chosen almost surely") {
  PolicyModel policy(1, 1, 3);
  policy.layer1.value.at(0, 0) = 1.0;               // hidden = state
  policy.layer2.value.at(0, 0) = 100.0;             // logits = [100, 0, 0]
  const std::vector<double> state{1.0};
  const auto probs = policy_probs(policy, state);
  CHECK(probs[0] > 0.9999999);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto [action, log_prob] = select_action(policy, state, rng);
    CHECK(action == 0);
    CHECK(log_prob == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_CASE("sampling frequencies track the distribution within 3 sigma") {
  PolicyModel policy = make_policy(6, 16, 8, 3);
  std::vector<double> state(6);
  Rng s_rng(7);
  for (double& v : state) v = s_rng.normal();
  const auto probs = policy_probs(policy, state);

  Rng rng(11);
  std::array<int, 8> counts{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    counts[static_cast<std::size_t>(select_action(policy, state, rng).first)]++;
  for (int a = 0; a < 8; ++a) {
    const double p = probs[static_cast<std::size_t>(a)];
    const double sigma = std::sqrt(draws * p * (1.0 - p));
    CHECK(std::abs(counts[static_cast<std::size_t>(a)] - draws * p) <= 3.0 * sigma + 1.0);
  }
}

TEST_CASE("random_select is uniform (chi-squared at alpha 0.01)") {
  Rng rng(13);
  const int k = 10, draws = 100000;
  std::array<int, 10> counts{};
  for (int i = 0; i < draws; ++i) counts[static_cast<std::size_t>(random_select(k, rng))]++;
  double chi2 = 0.0;
  const double expected = static_cast<double>(draws) / k;
  for (int c = 0; c < k; ++c) {
    const double d = counts[static_cast<std::size_t>(c)] - expected;
    chi2 += d * d / expected;
  }
  CHECK(chi2 < 21.666);  // chi2_{0.99, df=9}

  CHECK(random_select(1, rng) == 0);
  Rng a(3), b(3);
  for (int i = 0; i < 100; ++i) CHECK(random_select(17, a) == random_select(17, b));
  CHECK_THROWS_AS(random_select(0, rng), std::invalid_argument);
}

TEST_CASE("discounted returns follow the recursion") {
  const std::vector<double> rewards{1.0, 0.0, 1.0};
  const auto g = discounted_returns(rewards, 0.99);
  CHECK(g[0] == doctest::Approx(1.9801).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(g[2] == doctest::Approx(1.0).epsilon(1e-12));

  const auto g0 = discounted_returns(rewards, 0.0);
  CHECK(g0 == rewards);

  CHECK_THROWS_AS(discounted_returns(std::vector<double>{}, 0.9), std::invalid_argument);
}

TEST_CASE("constant returns standardize to zero") {
  const std::vector<double> rewards{0.5, 0.5, 0.5, 0.5};
  for (double v : compute_returns(rewards, 0.0)) CHECK(v == 0.0);
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  for (double v : compute_returns(zeros, 0.99)) CHECK(v == 0.0);
}

TEST_CASE("standardized returns have zero mean and unit variance") {
  const std::vector<double> rewards{0.3, -0.1, 0.7, 0.0, 0.2};
  const auto g = compute_returns(rewards, 0.99);
  double mean = 0.0;
  for (double v : g) mean += v;
  mean /= static_cast<double>(g.size());
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
  double var = 0.0;
  for (double v : g) var += v * v;
  CHECK(var / (static_cast<double>(g.size()) - 1.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("all-zero returns leave the policy unchanged") {
  PolicyModel policy = make_policy(3, 4, 3, 17);
  const Matrix w1 = policy.layer1.value;
  const Matrix w2 = policy.layer2.value;
  Trajectory traj;
  Rng rng(5);
  for (int t = 0; t < 4; ++t) {
    std::vector<double> state{rng.normal(), rng.normal(), rng.normal()};
    const auto [a, lp] = select_action(policy, state, rng);
    traj.push(std::move(state), a, lp, 0.0);  // all rewards zero
  }
  policy_update(policy, traj, 0.99);
  CHECK(policy.layer1.value == w1);
  CHECK(policy.layer2.value == w2);
  CHECK(policy.step_count == 0);
}

TEST_CASE("nonzero returns change the policy") {
  PolicyModel policy = make_policy(3, 4, 3, 19);
  const Matrix w2 = policy.layer2.value;
  Trajectory traj;
  Rng rng(6);
  for (int t = 0; t < 4; ++t) {
    std::vector<double> state{rng.normal(), rng.normal(), rng.normal()};
    const auto [a, lp] = select_action(policy, state, rng);
    traj.push(std::move(state), a, lp, t == 0 ? 1.0 : 0.0);
  }
  policy_update(policy, traj, 0.99);
  CHECK(policy.layer2.value != w2);
  CHECK(policy.step_count == 1);
}

TEST_CASE("policy objective gradient matches finite differences") {
  PolicyModel policy = make_policy(5, 8, 6, 23);
  Trajectory traj;
  Rng rng(9);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> state(5);
    for (double& v : state) v = rng.normal();
    const auto [a, lp] = select_action(policy, state, rng);
    traj.push(std::move(state), a, lp, rng.normal(0.0, 0.3));
  }
  const auto returns = compute_returns(traj.rewards, 0.99);
  policy_gradients(policy, traj, returns);

  ParamTensor* params[] = {&policy.layer1, &policy.layer2};
  const double err = finite_diff_check([&] { return traj_loss(policy, traj, returns); },
                                       params, 1e-5);
  CHECK(err < 1e-4);
}

TEST_CASE("positive returns sharpen the chosen action") {
  // 2-action toy: repeated +1 returns on a fixed state must strictly
  // increase the probability of the reinforced action.
  PolicyModel policy = make_policy(2, 4, 2, 29);
  const std::vector<double> state{1.0, -0.5};
  const int action = 0;
  double prev = policy_probs(policy, state)[static_cast<std::size_t>(action)];
  for (int iter = 0; iter < 100; ++iter) {
    Trajectory traj;
    // Two steps with different rewards so standardized returns are nonzero;
    // the first step carries the larger return.
    traj.push(state, action, 0.0, 1.0);
    traj.push(state, 1 - action, 0.0, -1.0);
    policy_update(policy, traj, 0.0);
    const double cur = policy_probs(policy, state)[static_cast<std::size_t>(action)];
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK(prev > 0.9);
}

TEST_CASE("bandit smoke test: best arm found within 200 episodes") {
  PolicyModel policy = make_policy(1, 8, 2, 31);
  policy.opt.lr = 1e-2;
  const std::vector<double> state{1.0};
  Rng rng(41);
  for (int episode = 0; episode < 200; ++episode) {
    Trajectory traj;
    for (int t = 0; t < 5; ++t) {
      const auto [a, lp] = select_action(policy, state, rng);
      traj.push(state, a, lp, a == 0 ? 1.0 : -1.0);
    }
    policy_update(policy, traj, 0.99);
  }
  CHECK(policy_probs(policy, state)[0] > 0.9);
}

TEST_CASE("agent is deterministic given seeds") {
  const auto run = [] {
    PolicyModel policy = make_policy(3, 4, 4, 37);
    Rng rng(43);
    std::vector<int> actions;
    for (int e = 0; e < 5; ++e) {
      Trajectory traj;
      for (int t = 0; t < 3; ++t) {
        std::vector<double> state{rng.normal(), rng.normal(), rng.normal()};
        const auto [a, lp] = select_action(policy, state, rng);
        actions.push_back(a);
        traj.push(std::move(state), a, lp, rng.normal());
      }
      policy_update(policy, traj, 0.99);
    }
    return std::make_pair(actions, policy.layer2.value);
  };
  const auto [a1, w1] = run();
  const auto [a2, w2] = run();
  CHECK(a1 == a2);
  CHECK(w1 == w2);
}

TEST_CASE("state dimension mismatches are rejected") {
  PolicyModel policy = make_policy(4, 4, 3, 41);
  const std::vector<double> bad{1.0, 2.0};
  CHECK_THROWS_AS(policy_probs(policy, bad), std::invalid_argument);
}
