#include "doctest.h"
#include "poisonlab/analysis.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace poisonlab;
namespace fs = std::filesystem;

namespace {

// Independent oracle for the OLS route: normal equations solved by plain
// Gaussian elimination with partial pivoting (full-rank designs only).
std::vector<double> normal_equations_fit(const Matrix& x_in, const std::vector<double>& y) {
  const int m = x_in.rows, n = x_in.cols;
  Matrix x(m, n + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) x.at(i, j) = x_in.at(i, j);
    x.at(i, n) = 1.0;  // intercept column
  }
  const int k = n + 1;
  std::vector<std::vector<double>> a(static_cast<std::size_t>(k),
                                     std::vector<double>(static_cast<std::size_t>(k + 1), 0.0));
  for (int p = 0; p < k; ++p) {
    for (int q = 0; q < k; ++q) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += x.at(i, p) * x.at(i, q);
      a[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = s;
    }
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += x.at(i, p) * y[static_cast<std::size_t>(i)];
    a[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)] = s;
  }
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
          std::abs(a[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)]))
        pivot = r;
    std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(pivot)]);
    for (int r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                       a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
      for (int q = col; q <= k; ++q)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)] -=
            f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(q)];
    }
  }
  std::vector<double> beta(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r)
    beta[static_cast<std::size_t>(r)] = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] /
                                        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
  return beta;  // slopes..., intercept last
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("exact linear data is recovered exactly") {
  Rng rng(1);
  Matrix x(30, 2);
  std::vector<double> y(30);
  for (int i = 0; i < 30; ++i) {
    x.at(i, 0) = rng.normal();
    x.at(i, 1) = rng.normal();
    y[static_cast<std::size_t>(i)] = 2.0 * x.at(i, 0) - x.at(i, 1);
  }
  const auto res = ols_fit(x, y);
  CHECK(res.coefficients[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(res.coefficients[1] == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(res.intercept == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(res.r_squared == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("constant targets yield zero slopes and r2 = 0") {
  Rng rng(2);
  Matrix x(10, 3);
  for (double& v : x.data) v = rng.normal();
  const std::vector<double> y(10, 4.5);
  const auto res = ols_fit(x, y);
  for (double c : res.coefficients) CHECK(c == 0.0);
  CHECK(res.intercept == doctest::Approx(4.5));
  CHECK(res.r_squared == 0.0);
}

TEST_CASE("ols matches the normal-equations oracle on a random 50x10 system") {
  Rng rng(3);
  Matrix x(50, 10);
  std::vector<double> y(50);
  for (double& v : x.data) v = rng.normal();
  for (double& v : y) v = rng.normal(0.0, 2.0);
  const auto res = ols_fit(x, y);
  const auto oracle = normal_equations_fit(x, y);
  for (int j = 0; j < 10; ++j)
    CHECK(res.coefficients[static_cast<std::size_t>(j)] ==
          doctest::Approx(oracle[static_cast<std::size_t>(j)]).epsilon(1e-8));
  CHECK(res.intercept == doctest::Approx(oracle[10]).epsilon(1e-8));
}

TEST_CASE("rank-deficient columns get the minimum-norm coefficient 0") {
  Rng rng(4);
  Matrix x(20, 3);
  std::vector<double> y(20);
  for (int i = 0; i < 20; ++i) {
    x.at(i, 0) = rng.normal();
    x.at(i, 1) = 0.0;  // never-selected action column
    x.at(i, 2) = rng.normal();
    y[static_cast<std::size_t>(i)] = x.at(i, 0) + 0.5 * x.at(i, 2) + rng.normal(0.0, 0.01);
  }
  const auto res = ols_fit(x, y);
  CHECK(res.coefficients[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("residuals are orthogonal to the fitted columns") {
  Rng rng(5);
  Matrix x(40, 4);
  std::vector<double> y(40);
  for (double& v : x.data) v = rng.normal();
  for (double& v : y) v = rng.normal();
  const auto res = ols_fit(x, y);
  for (int j = 0; j < 4; ++j) {
    double col_mean = 0.0;
    for (int i = 0; i < 40; ++i) col_mean += x.at(i, j);
    col_mean /= 40.0;
    double dot = 0.0;
    for (int i = 0; i < 40; ++i) {
      double fit = res.intercept;
      for (int q = 0; q < 4; ++q)
        fit += res.coefficients[static_cast<std::size_t>(q)] * x.at(i, q);
      dot += (y[static_cast<std::size_t>(i)] - fit) * (x.at(i, j) - col_mean);
    }
    CHECK(std::abs(dot) < 1e-8);
  }
  CHECK(res.r_squared >= 0.0);
  CHECK(res.r_squared <= 1.0);
}

TEST_CASE("column reordering permutes coefficients") {
  Rng rng(6);
  Matrix x(25, 3);
  std::vector<double> y(25);
  for (double& v : x.data) v = rng.normal();
  for (int i = 0; i < 25; ++i)
    y[static_cast<std::size_t>(i)] = 3.0 * x.at(i, 0) - 2.0 * x.at(i, 1) + 0.5 * x.at(i, 2);
  const auto res = ols_fit(x, y);

  Matrix xp(25, 3);
  for (int i = 0; i < 25; ++i) {
    xp.at(i, 0) = x.at(i, 2);
    xp.at(i, 1) = x.at(i, 0);
    xp.at(i, 2) = x.at(i, 1);
  }
  const auto resp = ols_fit(xp, y);
  CHECK(resp.coefficients[0] == doctest::Approx(res.coefficients[2]).epsilon(1e-9));
  CHECK(resp.coefficients[1] == doctest::Approx(res.coefficients[0]).epsilon(1e-9));
  CHECK(resp.coefficients[2] == doctest::Approx(res.coefficients[1]).epsilon(1e-9));
  CHECK(resp.r_squared == doctest::Approx(res.r_squared).epsilon(1e-9));
}

TEST_CASE("ols needs at least two rows") {
  Matrix x(1, 2);
  CHECK_THROWS_AS(ols_fit(x, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("group_by_class sums over the label partition") {
  RegressionResult res;
  res.coefficients = {1.0, -0.5, 2.0, 0.25};
  const std::vector<int> labels{0, 2, 0, 7};
  const auto agg = group_by_class(res, labels);
  CHECK(agg.sums[0] == doctest::Approx(3.0));
  CHECK(agg.sums[2] == doctest::Approx(-0.5));
  CHECK(agg.sums[7] == doctest::Approx(0.25));
  CHECK(agg.sums[1] == 0.0);

  double total = 0.0;
  for (double s : agg.sums) total += s;
  CHECK(total == doctest::Approx(1.0 + -0.5 + 2.0 + 0.25));

  RegressionResult zeros;
  zeros.coefficients = {0.0, 0.0};
  const auto zero_agg = group_by_class(zeros, std::vector<int>{3, 3});
  for (double s : zero_agg.sums) CHECK(s == 0.0);

  // single class present: its sum equals the total
  RegressionResult single;
  single.coefficients = {0.5, 1.5};
  const auto single_agg = group_by_class(single, std::vector<int>{4, 4});
  CHECK(single_agg.sums[4] == doctest::Approx(2.0));
}

TEST_CASE("class sums are invariant to relabeling within a class") {
  RegressionResult res;
  res.coefficients = {1.0, 2.0, 3.0};
  const auto a = group_by_class(res, std::vector<int>{1, 1, 5});
  RegressionResult swapped;
  swapped.coefficients = {2.0, 1.0, 3.0};  // swap the two class-1 graphs
  const auto b = group_by_class(swapped, std::vector<int>{1, 1, 5});
  for (std::size_t c = 0; c < a.sums.size(); ++c) CHECK(a.sums[c] == b.sums[c]);
}

TEST_CASE("kde integrates to 1 (trapezoid)") {
  Rng rng(7);
  std::vector<double> samples(200);
  for (double& v : samples) v = rng.normal(0.5, 0.2);
  const KdeCurve kde = gaussian_kde(samples);
  double area = 0.0;
  for (std::size_t i = 1; i < kde.x.size(); ++i)
    area += 0.5 * (kde.density[i] + kde.density[i - 1]) * (kde.x[i] - kde.x[i - 1]);
  CHECK(std::abs(area - 1.0) < 1e-6);

  // degenerate: identical samples still integrate to ~1
  const std::vector<double> flat(50, 0.25);
  const KdeCurve dkde = gaussian_kde(flat);
  double darea = 0.0;
  for (std::size_t i = 1; i < dkde.x.size(); ++i)
    darea += 0.5 * (dkde.density[i] + dkde.density[i - 1]) * (dkde.x[i] - dkde.x[i - 1]);
  CHECK(std::abs(darea - 1.0) < 1e-6);
}

TEST_CASE("emit_reports writes parseable files and fails on empty input") {
  TempDir dir("poisonlab_analysis_emit");

  // Build a tiny synthetic input: 2 runs, 3 episodes, 4 graphs.
  AnalysisInput input;
  PolicyRuns pr;
  pr.kind = PolicyKind::Reinforce;
  pr.train_size = 4;
  pr.num_actions = 4;
  pr.n_action_kinds = 1;
  Rng rng(8);
  for (int r = 0; r < 2; ++r) {
    RunRecord run;
    run.run_index = r;
    for (int e = 0; e < 3; ++e) {
      EpisodeRecord ep;
      for (int t = 0; t < 2; ++t) {
        const int a = rng.uniform_int(4);
        ep.actions.push_back(a);
        const double reward = 0.1 * a + rng.normal(0.0, 0.02);
        ep.rewards.push_back(reward);
        ep.acc_after.push_back(0.8 - reward);
        ep.episode_reward += reward;
      }
      run.episodes.push_back(ep);
    }
    pr.runs.push_back(run);
    pr.labels.push_back({0, 1, 2, 3});
  }
  input.policies.push_back(pr);

  const auto outputs = emit_reports(input, dir.path.string());
  CHECK(outputs.policies.size() == 1);
  CHECK(fs::exists(dir.path / "reward_curve.csv"));
  CHECK(fs::exists(dir.path / "reward_curve.svg"));
  CHECK(fs::exists(dir.path / "reward_density.csv"));
  CHECK(fs::exists(dir.path / "reward_density.svg"));
  CHECK(fs::exists(dir.path / "reinforce" / "coefficients.csv"));
  CHECK(fs::exists(dir.path / "reinforce" / "class_sums.csv"));
  CHECK(fs::exists(dir.path / "reinforce" / "r2.txt"));
  CHECK(fs::exists(dir.path / "reinforce" / "coefficients.svg"));
  CHECK(fs::exists(dir.path / "reinforce" / "class_sums.svg"));

  // coefficients.csv parses back: one row per graph id.
  std::ifstream in(dir.path / "reinforce" / "coefficients.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "graph_id,class,coefficient");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4);

  // empty input: error before any file is written
  AnalysisInput empty;
  PolicyRuns bad;
  bad.kind = PolicyKind::Random;
  bad.runs.emplace_back();  // run with no episodes
  empty.policies.push_back(bad);
  TempDir dir2("poisonlab_analysis_empty");
  CHECK_THROWS_AS(emit_reports(empty, dir2.path.string()), std::invalid_argument);
  CHECK_FALSE(fs::exists(dir2.path / "reward_curve.csv"));
}
