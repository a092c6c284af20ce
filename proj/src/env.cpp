#include "poisonlab/env.hpp"

#include <cmath>
#include <stdexcept>

namespace poisonlab {

std::vector<double> encode_state(const Dataset& train) {
  if (train.graphs.empty()) throw std::invalid_argument("encode_state: empty dataset");
  std::vector<double> out;
  out.reserve(train.graphs.size() * 5);
  for (const Graph& g : train.graphs) {
    const GraphStats s = summary_stats(g);
    out.push_back(static_cast<double>(s.num_nodes));
    out.push_back(static_cast<double>(s.num_edges));
    out.push_back(s.mean_degree);
    out.push_back(s.max_degree);
    out.push_back(s.min_degree);
  }
  return out;
}

int action_space_size(int train_size, bool extended_actions) {
  return extended_actions ? train_size * kNumActionKinds : train_size;
}

namespace {

// Same five channels as encode_state, computed from the already-validated
// prepared form (degree sequence is in pg.x).
std::array<double, 5> stats_of(const PreparedGraph& pg) {
  double sum = 0.0, mx = pg.x[0], mn = pg.x[0];
  for (double d : pg.x) {
    sum += d;
    mx = std::max(mx, d);
    mn = std::min(mn, d);
  }
  return {static_cast<double>(pg.n), sum / 2.0, sum / pg.n, mx, mn};
}

}  // namespace

EnvState PoisonEnv::reset(const Dataset& train, const GnnModel& model, const Dataset& test) {
  if (train.graphs.empty() || test.graphs.empty())
    throw std::invalid_argument("PoisonEnv::reset: empty dataset");
  if (!model.trained())
    throw std::invalid_argument("PoisonEnv::reset: model has not been trained");

  const bool same_sources = train_src_ == &train && model_src_ == &model && test_src_ == &test;
  if (!same_sources) {
    pristine_graphs_.clear();
    pristine_prepared_.clear();
    pristine_stats_.clear();
    pristine_graphs_.reserve(train.graphs.size());
    pristine_prepared_.reserve(train.graphs.size());
    pristine_stats_.reserve(train.graphs.size());
    for (const Graph& g : train.graphs) {
      auto gp = std::make_shared<const Graph>(g);
      auto pp = std::make_shared<const PreparedGraph>(prepare_graph(*gp));
      pristine_stats_.push_back(stats_of(*pp));
      pristine_prepared_.push_back(std::move(pp));
      pristine_graphs_.push_back(std::move(gp));
    }
    prepared_test_ = prepare_all(test);
    const auto test_ptrs = as_pointers(prepared_test_);
    baseline_acc_ = evaluate(model, test_ptrs);
    rebuild_channel_stats();
    train_src_ = &train;
    model_src_ = &model;
    test_src_ = &test;
  }

  clone_graphs_ = pristine_graphs_;
  clone_prepared_ = pristine_prepared_;
  clone_stats_ = pristine_stats_;
  victim_ = clone_model(model);
  if (cfg_.retrain_lr) victim_->opt.lr = *cfg_.retrain_lr;
  if (!cfg_.carry_optimizer_state) {
    for (ParamTensor* p : victim_->params()) {
      p->m.fill(0.0);
      p->v.fill(0.0);
    }
  }
  acc_prev_ = baseline_acc_;
  step_idx_ = 0;
  episode_open_ = true;
  return make_state();
}

StepOutcome PoisonEnv::step(const ActionSpec& action, const Rng& rng) {
  if (!episode_open_) throw std::logic_error("PoisonEnv::step: call reset() first");
  if (step_idx_ >= cfg_.poison_points)
    throw std::logic_error("PoisonEnv::step: episode exhausted after " +
                           std::to_string(cfg_.poison_points) + " poison points");
  const auto idx = static_cast<std::size_t>(action.graph_index);
  if (action.graph_index < 0 || idx >= clone_graphs_.size())
    throw std::invalid_argument("PoisonEnv::step: graph index out of range");
  if (!cfg_.extended_actions && action.kind != ActionKind::SubgraphAdd)
    throw std::invalid_argument("PoisonEnv::step: extended actions are disabled");

  Rng perturb_rng = rng.child({0});
  Rng retrain_rng = rng.child({1});

  const Graph& target = *clone_graphs_[idx];
  std::optional<Graph> perturbed;
  switch (action.kind) {
    case ActionKind::SubgraphAdd: {
      const Graph sub = generate_gnp(cfg_.gnp_nodes, cfg_.gnp_edge_prob, perturb_rng);
      perturbed = insert_subgraph(target, sub, perturb_rng);
      break;
    }
    case ActionKind::NodeDelete: perturbed = node_delete(target, perturb_rng); break;
    case ActionKind::NodeAdd: perturbed = node_add(target); break;
    case ActionKind::EdgeDelete: perturbed = edge_delete(target, perturb_rng); break;
    case ActionKind::EdgeAdd: perturbed = edge_add(target, perturb_rng); break;
  }
  if (perturbed) {  // infeasible edits leave the graph as is
    auto gp = std::make_shared<const Graph>(std::move(*perturbed));
    auto pp = std::make_shared<const PreparedGraph>(prepare_graph(*gp));
    clone_stats_[idx] = stats_of(*pp);
    clone_prepared_[idx] = std::move(pp);
    clone_graphs_[idx] = std::move(gp);
  }

  std::vector<const PreparedGraph*> train_ptrs;
  train_ptrs.reserve(clone_prepared_.size());
  for (const auto& pg : clone_prepared_) train_ptrs.push_back(pg.get());
  retrain_one_epoch(*victim_, train_ptrs, cfg_.retrain_batch_size, retrain_rng);

  const auto test_ptrs = as_pointers(prepared_test_);
  StepOutcome out;
  out.acc_after = evaluate(*victim_, test_ptrs);
  out.reward = acc_prev_ - out.acc_after;
  if (cfg_.differential_reward) acc_prev_ = out.acc_after;
  ++step_idx_;
  out.next_state = make_state();
  return out;
}

int PoisonEnv::num_actions() const {
  return action_space_size(train_size(), cfg_.extended_actions);
}

ActionSpec PoisonEnv::decode_action(int action_id) const {
  if (action_id < 0 || action_id >= num_actions())
    throw std::invalid_argument("decode_action: id out of range");
  if (!cfg_.extended_actions) return {action_id, ActionKind::SubgraphAdd};
  return {action_id / kNumActionKinds, static_cast<ActionKind>(action_id % kNumActionKinds)};
}

int PoisonEnv::encode_action(const ActionSpec& a) const {
  return cfg_.extended_actions ? a.graph_index * kNumActionKinds + static_cast<int>(a.kind)
                               : a.graph_index;
}

const GnnModel& PoisonEnv::victim() const {
  if (!victim_) throw std::logic_error("PoisonEnv::victim: no episode started");
  return *victim_;
}

void PoisonEnv::rebuild_channel_stats() {
  const auto n = static_cast<double>(pristine_stats_.size());
  ch_mean_.fill(0.0);
  ch_std_.fill(0.0);
  for (const auto& s : pristine_stats_)
    for (std::size_t c = 0; c < 5; ++c) ch_mean_[c] += s[c];
  for (double& m : ch_mean_) m /= n;
  for (const auto& s : pristine_stats_)
    for (std::size_t c = 0; c < 5; ++c) {
      const double d = s[c] - ch_mean_[c];
      ch_std_[c] += d * d;
    }
  for (double& v : ch_std_) v = std::max(std::sqrt(v / n), 1e-8);
}

EnvState PoisonEnv::make_state() const {
  EnvState st;
  st.poison_step = step_idx_;
  st.encoding.reserve(clone_stats_.size() * 5);
  for (const auto& s : clone_stats_)
    for (std::size_t c = 0; c < 5; ++c)
      st.encoding.push_back((s[c] - ch_mean_[c]) / ch_std_[c]);
  return st;
}

}  // namespace poisonlab
