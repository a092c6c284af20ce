#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "poisonlab/dataset.hpp"
#include "poisonlab/graph.hpp"
#include "poisonlab/matrix.hpp"
#include "poisonlab/rng.hpp"

namespace poisonlab {

// Graph preprocessed for convolution: CSR structure of A + I with the
// symmetric normalization kept as per-node scales (entry weight is
// inv_sqrt_deg[i] * inv_sqrt_deg[j]), plus the in-degree feature column.
// Complete graphs get a rank-1 fast path: every row of the propagation is
// identical, so no adjacency is stored at all.
struct PreparedGraph {
  int n = 0;
  bool complete = false;
  std::vector<int> offsets;            // size n+1 (empty when complete)
  std::vector<int> cols;               // sorted per row, includes diagonal
  std::vector<double> inv_sqrt_deg;    // (deg_i + 1)^(-1/2)
  std::vector<double> x;               // in-degree features
  int label = -1;                      // -1 when unlabeled
};

PreparedGraph prepare_graph(const Graph& g);

// Dense normalized propagation matrix D~^(-1/2) (A + I) D~^(-1/2).
// Reference route for tests and small graphs; training uses the CSR form.
Matrix propagation_matrix(const Graph& g);

// out = A_hat * in, where in/out are n x width row-major buffers (distinct).
// scratch is resized as needed and reused across calls.
void propagate(const PreparedGraph& pg, const double* in, double* out, int width,
               std::vector<double>& scratch);

// Two graph-convolution layers (ReLU), mean readout, linear head, softmax.
// Each layer carries a bias row (z = A_hat X W + b); with the nonnegative
// scalar degree feature a bias-free ReLU stack is positively homogeneous and
// collapses to a single-class predictor.
struct GnnModel {
  int hidden_dim = 64;
  int num_classes = 8;
  ParamTensor conv1;       // 1 x H
  ParamTensor conv1_bias;  // 1 x H
  ParamTensor conv2;       // H x H
  ParamTensor conv2_bias;  // 1 x H
  ParamTensor head;        // H x C
  ParamTensor head_bias;   // 1 x C
  OptimizerConfig opt{};
  std::int64_t step_count = 0;  // optimizer steps taken; > 0 means trained

  GnnModel(int hidden = 64, int classes = 8)
      : hidden_dim(hidden), num_classes(classes),
        conv1(1, hidden), conv1_bias(1, hidden),
        conv2(hidden, hidden), conv2_bias(1, hidden),
        head(hidden, classes), head_bias(1, classes) {}

  void init_weights(Rng& rng);  // normal weights, zero biases
  bool trained() const { return step_count > 0; }

  std::array<ParamTensor*, 6> params() {
    return {&conv1, &conv1_bias, &conv2, &conv2_bias, &head, &head_bias};
  }
  std::array<const ParamTensor*, 6> params() const {
    return {&conv1, &conv1_bias, &conv2, &conv2_bias, &head, &head_bias};
  }
};

// Deep, independent copy (value semantics make this a plain copy; the
// explicit name mirrors its role in the attack loop).
GnnModel clone_model(const GnnModel& model);

struct TrainConfig {
  int epochs = 70;
  int batch_size = 32;
  OptimizerConfig opt{};
  std::uint64_t seed = 0;
};

// Class distribution for one graph. Always sums to 1.
std::vector<double> gnn_forward(const GnnModel& model, const PreparedGraph& pg);
std::vector<double> gnn_forward(const GnnModel& model, const Graph& g);

// Mini-batch training; records the mean per-graph loss of each epoch and
// returns the per-epoch history. Deterministic given cfg.seed. Stores
// cfg.opt on the model so later retraining uses the same optimizer.
// on_epoch, when set, is called after each epoch with (epoch, mean_loss).
std::vector<double> train_gnn(GnnModel& model, std::span<const PreparedGraph* const> train,
                              const TrainConfig& cfg,
                              const std::function<void(int, double)>& on_epoch = {});
std::vector<double> train_gnn(GnnModel& model, const Dataset& train, const TrainConfig& cfg,
                              const std::function<void(int, double)>& on_epoch = {});

// One warm-start epoch on the (possibly perturbed) set; optimizer state and
// step count carry over. rng drives the batch shuffle.
void retrain_one_epoch(GnnModel& model, std::span<const PreparedGraph* const> train,
                       int batch_size, Rng& rng);

int predict(const GnnModel& model, const PreparedGraph& pg);

// Fraction of graphs whose argmax class equals the label; argmax ties break
// to the lowest class index. Throws on an empty set.
double evaluate(const GnnModel& model, std::span<const PreparedGraph* const> set);
double evaluate(const GnnModel& model, const Dataset& set);

// Mean cross-entropy of the set under the current parameters (no updates).
double dataset_loss(const GnnModel& model, std::span<const PreparedGraph* const> set);

std::vector<const PreparedGraph*> as_pointers(const std::vector<PreparedGraph>& prepared);
std::vector<PreparedGraph> prepare_all(const Dataset& ds);

}  // namespace poisonlab
