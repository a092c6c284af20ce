#include "doctest.h"
#include "poisonlab/env.hpp"
#include "poisonlab/runner.hpp"

#include <cmath>

using namespace poisonlab;

namespace {

struct Fixture {
  Dataset train, test;
  GnnModel model{8, 8};

  explicit Fixture(std::uint64_t seed = 1, int train_size = 12, int epochs = 4) {
    DatasetConfig cfg;
    cfg.train_size = train_size;
    cfg.test_size = 6;
    cfg.min_nodes = 8;
    cfg.max_nodes = 14;
    cfg.seed = seed;
    std::tie(train, test) = generate_dataset(cfg);
    Rng rng(seed);
    model.init_weights(rng);
    TrainConfig tc;
    tc.epochs = epochs;
    tc.batch_size = 4;
    tc.seed = seed;
    train_gnn(model, train, tc);
  }
};

EnvConfig fast_env(int p = 3) {
  EnvConfig cfg;
  cfg.poison_points = p;
  cfg.retrain_batch_size = 4;
  return cfg;
}

}  // namespace

TEST_CASE("reset encodes 5 stats per graph and is repeatable") {
  Fixture fx;
  PoisonEnv env(fast_env());
  const EnvState s1 = env.reset(fx.train, fx.model, fx.test);
  CHECK(static_cast<int>(s1.encoding.size()) == 5 * fx.train.size());
  CHECK(s1.poison_step == 0);
  const EnvState s2 = env.reset(fx.train, fx.model, fx.test);
  CHECK(s1.encoding == s2.encoding);
  CHECK(env.baseline_accuracy() == evaluate(fx.model, fx.test));
}

TEST_CASE("reset rejects an untrained model") {
  Fixture fx;
  GnnModel fresh(8, 8);
  PoisonEnv env(fast_env());
  CHECK_THROWS_AS(env.reset(fx.train, fresh, fx.test), std::invalid_argument);
}

TEST_CASE("raw encode_state changes only the perturbed slot") {
  Fixture fx;
  const auto before = encode_state(fx.train);
  Dataset perturbed = fx.train;
  Rng rng(4);
  const Graph sub = generate_gnp(10, 0.75, rng);
  const std::size_t k = 5;
  perturbed.graphs[k] = insert_subgraph(perturbed.graphs[k], sub, rng);
  const auto after = encode_state(perturbed);
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (i >= 5 * k && i < 5 * (k + 1)) continue;
    CHECK(before[i] == after[i]);
  }
  CHECK(before[5 * k] != after[5 * k]);  // node count moved

  CHECK(encode_state(fx.train) == before);  // identical datasets encode identically
}

TEST_CASE("identical graphs standardize to the zero vector") {
  Rng gen(0);
  Dataset train;
  train.role = "train";
  for (int i = 0; i < 6; ++i) {
    Rng g_rng(1);
    train.graphs.push_back(generate_class_graph(GraphClass::Cycle, 10, g_rng));
  }
  Fixture fx;  // provides a trained model and a test set
  PoisonEnv env(fast_env());
  const EnvState st = env.reset(train, fx.model, fx.test);
  for (double v : st.encoding) CHECK(v == 0.0);
}

TEST_CASE("lr=0 retraining makes every reward exactly zero") {
  Fixture fx;
  EnvConfig cfg = fast_env(4);
  cfg.retrain_lr = 0.0;
  PoisonEnv env(cfg);
  env.reset(fx.train, fx.model, fx.test);
  for (int t = 0; t < 4; ++t) {
    const auto out = env.step({t % fx.train.size(), ActionKind::SubgraphAdd},
                              env_step_rng(1, PolicyKind::Random, 0, t));
    CHECK(out.reward == 0.0);
    CHECK(out.acc_after == env.baseline_accuracy());
  }
}

TEST_CASE("rewards are bounded and exact accuracy differences") {
  Fixture fx;
  PoisonEnv env(fast_env(3));
  env.reset(fx.train, fx.model, fx.test);
  for (int t = 0; t < 3; ++t) {
    const auto out = env.step({2, ActionKind::SubgraphAdd},
                              env_step_rng(7, PolicyKind::Random, 0, t));
    CHECK(out.reward >= -1.0);
    CHECK(out.reward <= 1.0);
    CHECK(out.reward == env.baseline_accuracy() - out.acc_after);
    CHECK(out.next_state.poison_step == t + 1);
  }
}

TEST_CASE("the chosen graph grows by exactly gnp_nodes per application") {
  Fixture fx;
  PoisonEnv env(fast_env(3));
  env.reset(fx.train, fx.model, fx.test);
  const int target = 4;
  const int before = fx.train.graphs[target].node_count;
  for (int t = 0; t < 3; ++t)
    env.step({target, ActionKind::SubgraphAdd}, env_step_rng(3, PolicyKind::Random, 0, t));
  CHECK(env.train_graph(target).node_count == before + 3 * 10);
  CHECK(fx.train.graphs[target].node_count == before);  // original untouched
}

TEST_CASE("episode is exhausted after p steps") {
  Fixture fx;
  PoisonEnv env(fast_env(2));
  env.reset(fx.train, fx.model, fx.test);
  env.step({0, ActionKind::SubgraphAdd}, env_step_rng(1, PolicyKind::Random, 0, 0));
  env.step({1, ActionKind::SubgraphAdd}, env_step_rng(1, PolicyKind::Random, 0, 1));
  CHECK_THROWS_AS(
      env.step({2, ActionKind::SubgraphAdd}, env_step_rng(1, PolicyKind::Random, 0, 2)),
      std::logic_error);
}

TEST_CASE("step is deterministic given state, action and seed") {
  Fixture fx;
  const auto run_once = [&] {
    PoisonEnv env(fast_env(2));
    env.reset(fx.train, fx.model, fx.test);
    const auto o1 = env.step({3, ActionKind::SubgraphAdd}, env_step_rng(11, PolicyKind::Reinforce, 0, 0));
    const auto o2 = env.step({3, ActionKind::SubgraphAdd}, env_step_rng(11, PolicyKind::Reinforce, 0, 1));
    return std::make_pair(o1, o2);
  };
  const auto [a1, a2] = run_once();
  const auto [b1, b2] = run_once();
  CHECK(a1.reward == b1.reward);
  CHECK(a1.acc_after == b1.acc_after);
  CHECK(a1.next_state.encoding == b1.next_state.encoding);
  CHECK(a2.reward == b2.reward);
  CHECK(a2.next_state.encoding == b2.next_state.encoding);
}

TEST_CASE("originals survive any number of episodes") {
  Fixture fx;
  const Dataset train_copy = fx.train;
  const Matrix conv1 = fx.model.conv1.value;
  const Matrix head = fx.model.head.value;
  PoisonEnv env(fast_env(2));
  for (int e = 0; e < 3; ++e) {
    env.reset(fx.train, fx.model, fx.test);
    for (int t = 0; t < 2; ++t)
      env.step({e, ActionKind::SubgraphAdd}, env_step_rng(5, PolicyKind::Random, e, t));
  }
  CHECK(fx.train == train_copy);
  CHECK(fx.model.conv1.value == conv1);
  CHECK(fx.model.head.value == head);
}

TEST_CASE("extended action space exposes 5 kinds per graph") {
  Fixture fx;
  EnvConfig cfg = fast_env(5);
  cfg.extended_actions = true;
  PoisonEnv env(cfg);
  env.reset(fx.train, fx.model, fx.test);
  CHECK(env.num_actions() == 5 * fx.train.size());

  const ActionSpec spec = env.decode_action(8);
  CHECK(spec.graph_index == 1);
  CHECK(spec.kind == ActionKind::EdgeDelete);
  CHECK(env.encode_action(spec) == 8);

  // Drain a clique's missing pairs so edge_add turns infeasible: a no-op
  // step rather than a crash.
  Dataset clique_train;
  clique_train.role = "train";
  Rng g_rng(1);
  for (int i = 0; i < 4; ++i)
    clique_train.graphs.push_back(generate_class_graph(GraphClass::Clique, 7, g_rng));
  PoisonEnv env2(cfg);
  env2.reset(clique_train, fx.model, fx.test);
  const int edges_before = env2.train_graph(0).edge_count();
  const auto out = env2.step({0, ActionKind::EdgeAdd}, env_step_rng(2, PolicyKind::Random, 0, 0));
  CHECK(env2.train_graph(0).edge_count() == edges_before);
  CHECK(std::isfinite(out.reward));
}

TEST_CASE("default mode rejects extended kinds") {
  Fixture fx;
  PoisonEnv env(fast_env(2));
  env.reset(fx.train, fx.model, fx.test);
  CHECK_THROWS_AS(env.step({0, ActionKind::NodeAdd}, env_step_rng(1, PolicyKind::Random, 0, 0)),
                  std::invalid_argument);
}

TEST_CASE("differential reward telescopes to the total degradation") {
  Fixture fx;
  EnvConfig plain_cfg = fast_env(3);
  EnvConfig diff_cfg = fast_env(3);
  diff_cfg.differential_reward = true;

  PoisonEnv plain(plain_cfg), diff(diff_cfg);
  plain.reset(fx.train, fx.model, fx.test);
  diff.reset(fx.train, fx.model, fx.test);
  double last_plain = 0.0, diff_sum = 0.0;
  for (int t = 0; t < 3; ++t) {
    const auto op = plain.step({1, ActionKind::SubgraphAdd}, env_step_rng(9, PolicyKind::Random, 0, t));
    const auto od = diff.step({1, ActionKind::SubgraphAdd}, env_step_rng(9, PolicyKind::Random, 0, t));
    CHECK(op.acc_after == od.acc_after);
    last_plain = op.reward;
    diff_sum += od.reward;
  }
  CHECK(diff_sum == doctest::Approx(last_plain).epsilon(1e-12));
}
