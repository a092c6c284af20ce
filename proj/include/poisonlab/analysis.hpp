#pragma once

#include <array>
#include <string>
#include <vector>

#include "poisonlab/dataset.hpp"
#include "poisonlab/matrix.hpp"
#include "poisonlab/runner.hpp"

namespace poisonlab {

struct RegressionResult {
  std::vector<double> coefficients;  // one per feature column (graph id)
  double intercept = 0.0;
  double r_squared = 0.0;  // defined as 0 for a constant target
};

// Least squares with intercept via complete orthogonal decomposition;
// rank-deficient directions (e.g. never-selected graphs) get the
// minimum-norm solution, so all-zero columns map to coefficient 0.
// Throws std::invalid_argument with fewer than 2 rows.
RegressionResult ols_fit(const Matrix& features, const std::vector<double>& target);

struct ClassAggregate {
  std::array<double, kNumGraphClasses> sums{};
};

// Sums coefficients over the label partition of the training set.
ClassAggregate group_by_class(const RegressionResult& result, const std::vector<int>& labels);
ClassAggregate group_by_class(const RegressionResult& result, const Dataset& train);

// Gaussian kernel density estimate with Silverman bandwidth, evaluated on a
// grid padded 8 bandwidths beyond the sample range (trapezoid area ~ 1).
struct KdeCurve {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;
};
KdeCurve gaussian_kde(std::span<const double> samples, int grid_points = 2048);

// Run records of one policy, as loaded back from an attack output directory.
struct PolicyRuns {
  PolicyKind kind = PolicyKind::Reinforce;
  int train_size = 0;
  int num_actions = 0;
  int n_action_kinds = 1;
  std::vector<RunRecord> runs;
  std::vector<std::vector<int>> labels;  // per run, label of each graph id
};

struct AnalysisInput {
  std::vector<PolicyRuns> policies;
};

// Reads <records_root>/{reinforce,random}/run_*/{meta.json,records.csv}.
AnalysisInput load_analysis_input(const std::string& records_root);

// Feature matrix for the regression: one row per (run, episode), one column
// per graph id, entries = times that graph was perturbed in the episode.
// pool_runs averages rows (and rewards) over runs at each episode index.
Matrix action_count_matrix(const PolicyRuns& pr, bool pool_runs);
std::vector<double> episode_reward_vector(const PolicyRuns& pr, bool pool_runs);

struct PolicyAnalysis {
  PolicyKind kind;
  RegressionResult pooled_fit;
  ClassAggregate class_sums;  // per-run fits grouped by that run's labels, summed
};

struct AnalysisOutputs {
  std::vector<PolicyAnalysis> policies;
  std::vector<std::string> files_written;
};

// Emits, under outdir:
//   reward_curve.csv/.svg    per-episode mean reward per policy (raw + windowed)
//   reward_density.csv/.svg  KDE of episodic rewards per policy
// and per policy subdirectory:
//   coefficients.csv/.svg, class_sums.csv/.svg, r2.txt
// Throws (before writing anything) when there are no episodes.
AnalysisOutputs emit_reports(const AnalysisInput& input, const std::string& outdir,
                             bool pool_runs = false, int window = 10);

}  // namespace poisonlab
