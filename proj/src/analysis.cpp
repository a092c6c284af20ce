#include "poisonlab/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace poisonlab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RegressionResult ols_fit(const Matrix& features, const std::vector<double>& target) {
  if (features.rows < 2) throw std::invalid_argument("ols_fit: need at least 2 rows");
  if (static_cast<int>(target.size()) != features.rows)
    throw std::invalid_argument("ols_fit: one target per row required");

  const int m = features.rows;
  const int n = features.cols;
  RegressionResult res;
  res.coefficients.assign(static_cast<std::size_t>(n), 0.0);

  double y_mean = 0.0;
  for (double y : target) y_mean += y;
  y_mean /= m;
  double ss_tot = 0.0;
  for (double y : target) ss_tot += (y - y_mean) * (y - y_mean);
  if (ss_tot <= 0.0) {  // constant target: zero slopes by convention
    res.intercept = y_mean;
    res.r_squared = 0.0;
    return res;
  }

  // Center columns and target; fit slopes minimum-norm, recover intercept.
  Eigen::MatrixXd x_c(m, n);
  Eigen::VectorXd col_mean(n);
  for (int j = 0; j < n; ++j) {
    double mu = 0.0;
    for (int i = 0; i < m; ++i) mu += features.at(i, j);
    mu /= m;
    col_mean(j) = mu;
    for (int i = 0; i < m; ++i) x_c(i, j) = features.at(i, j) - mu;
  }
  Eigen::VectorXd y_c(m);
  for (int i = 0; i < m; ++i) y_c(i) = target[static_cast<std::size_t>(i)] - y_mean;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x_c);
  const Eigen::VectorXd beta = cod.solve(y_c);

  const Eigen::VectorXd residual = y_c - x_c * beta;
  const double ss_res = residual.squaredNorm();
  res.r_squared = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  res.intercept = y_mean - col_mean.dot(beta);
  for (int j = 0; j < n; ++j) res.coefficients[static_cast<std::size_t>(j)] = beta(j);
  return res;
}

ClassAggregate group_by_class(const RegressionResult& result, const std::vector<int>& labels) {
  if (labels.size() != result.coefficients.size())
    throw std::invalid_argument("group_by_class: one label per coefficient required");
  ClassAggregate agg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label < 0 || label >= kNumGraphClasses)
      throw std::invalid_argument("group_by_class: label out of range");
    agg.sums[static_cast<std::size_t>(label)] += result.coefficients[i];
  }
  return agg;
}

ClassAggregate group_by_class(const RegressionResult& result, const Dataset& train) {
  std::vector<int> labels;
  labels.reserve(train.graphs.size());
  for (const Graph& g : train.graphs) labels.push_back(g.label.value_or(-1));
  return group_by_class(result, labels);
}

KdeCurve gaussian_kde(std::span<const double> samples, int grid_points) {
  if (samples.empty()) throw std::invalid_argument("gaussian_kde: no samples");
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / std::max(1.0, n - 1.0));

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double q) {
    const double pos = q * (n - 1.0);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  double bw = 0.9 * spread * std::pow(n, -0.2);
  if (!(bw > 0.0)) bw = std::max(1e-9, 1e-9 * std::abs(mean));  // degenerate samples

  KdeCurve curve;
  curve.bandwidth = bw;
  const double lo = sorted.front() - 8.0 * bw;
  const double hi = sorted.back() + 8.0 * bw;
  curve.x.resize(static_cast<std::size_t>(grid_points));
  curve.density.resize(static_cast<std::size_t>(grid_points));
  const double step = (hi - lo) / (grid_points - 1);
  const double norm = 1.0 / (n * bw * std::sqrt(2.0 * 3.14159265358979323846));
  for (int i = 0; i < grid_points; ++i) {
    const double x = lo + step * i;
    double dens = 0.0;
    for (double s : samples) {
      const double z = (x - s) / bw;
      dens += std::exp(-0.5 * z * z);
    }
    curve.x[static_cast<std::size_t>(i)] = x;
    curve.density[static_cast<std::size_t>(i)] = dens * norm;
  }
  return curve;
}

namespace {

// --- records loading -----------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

PolicyRuns load_policy_dir(const fs::path& dir, PolicyKind kind) {
  PolicyRuns pr;
  pr.kind = kind;
  std::vector<fs::path> run_dirs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory() && entry.path().filename().string().starts_with("run_"))
      run_dirs.push_back(entry.path());
  std::sort(run_dirs.begin(), run_dirs.end());

  for (const auto& run_dir : run_dirs) {
    std::ifstream meta_in(run_dir / "meta.json");
    if (!meta_in) throw std::runtime_error("missing meta.json in " + run_dir.string());
    json meta;
    meta_in >> meta;

    RunRecord rec;
    rec.run_index = meta.value("run_index", 0);
    rec.seed = meta.value("seed", std::uint64_t{0});
    rec.policy = kind;
    rec.baseline_acc = meta.value("baseline_accuracy", 0.0);
    pr.train_size = meta.value("train_size", 0);
    pr.num_actions = meta.value("num_actions", pr.train_size);
    pr.n_action_kinds = meta.value("n_action_kinds", 1);
    std::vector<int> labels;
    for (const auto& l : meta.value("labels", json::array())) labels.push_back(l.get<int>());

    std::ifstream csv(run_dir / "records.csv");
    if (!csv) throw std::runtime_error("missing records.csv in " + run_dir.string());
    std::string line;
    std::getline(csv, line);  // header
    int line_no = 1;
    while (std::getline(csv, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto fields = split_csv_line(line);
      if (fields.size() != 5)
        throw std::runtime_error(run_dir.string() + "/records.csv:" + std::to_string(line_no) +
                                 ": expected 5 fields");
      const auto episode = static_cast<std::size_t>(std::stol(fields[0]));
      while (rec.episodes.size() <= episode) rec.episodes.emplace_back();
      EpisodeRecord& ep = rec.episodes[episode];
      ep.actions.push_back(std::stoi(fields[2]));
      ep.acc_after.push_back(std::stod(fields[3]));
      const double reward = std::stod(fields[4]);
      ep.rewards.push_back(reward);
      ep.episode_reward += reward;
    }
    pr.runs.push_back(std::move(rec));
    pr.labels.push_back(std::move(labels));
  }
  return pr;
}

}  // namespace

AnalysisInput load_analysis_input(const std::string& records_root) {
  AnalysisInput input;
  for (const PolicyKind kind : {PolicyKind::Reinforce, PolicyKind::Random}) {
    const fs::path dir = fs::path(records_root) / to_string(kind);
    if (fs::is_directory(dir)) input.policies.push_back(load_policy_dir(dir, kind));
  }
  if (input.policies.empty())
    throw std::runtime_error("no run records found under " + records_root);
  return input;
}

Matrix action_count_matrix(const PolicyRuns& pr, bool pool_runs) {
  const int n_runs = static_cast<int>(pr.runs.size());
  if (n_runs == 0) throw std::invalid_argument("action_count_matrix: no runs");
  const auto n_episodes = pr.runs.front().episodes.size();
  const int cols = pr.train_size;
  const int kinds = std::max(1, pr.n_action_kinds);

  if (!pool_runs) {
    Matrix x(static_cast<int>(pr.runs.size() * n_episodes), cols);
    int row = 0;
    for (const auto& run : pr.runs)
      for (const auto& ep : run.episodes) {
        for (int a : ep.actions) x.at(row, a / kinds) += 1.0;
        ++row;
      }
    return x;
  }
  Matrix x(static_cast<int>(n_episodes), cols);
  for (const auto& run : pr.runs)
    for (std::size_t e = 0; e < n_episodes; ++e)
      for (int a : run.episodes[e].actions)
        x.at(static_cast<int>(e), a / kinds) += 1.0 / n_runs;
  return x;
}

std::vector<double> episode_reward_vector(const PolicyRuns& pr, bool pool_runs) {
  const auto n_episodes = pr.runs.empty() ? 0 : pr.runs.front().episodes.size();
  if (!pool_runs) {
    std::vector<double> y;
    for (const auto& run : pr.runs)
      for (const auto& ep : run.episodes) y.push_back(ep.episode_reward);
    return y;
  }
  std::vector<double> y(n_episodes, 0.0);
  for (const auto& run : pr.runs)
    for (std::size_t e = 0; e < n_episodes; ++e) y[e] += run.episodes[e].episode_reward;
  for (double& v : y) v /= static_cast<double>(pr.runs.size());
  return y;
}

// --- report emission ------------------------------------------------------

namespace {

constexpr const char* kSeriesColors[] = {"#e66101", "#5e3c99", "#1b9e77", "#d95f02"};

struct SvgCanvas {
  static constexpr int width = 720;
  static constexpr int height = 440;
  static constexpr int margin_left = 70;
  static constexpr int margin_right = 20;
  static constexpr int margin_top = 30;
  static constexpr int margin_bottom = 50;

  double x_min, x_max, y_min, y_max;
  std::ostringstream body;

  SvgCanvas(double x_lo, double x_hi, double y_lo, double y_hi)
      : x_min(x_lo), x_max(x_hi), y_min(y_lo), y_max(y_hi) {
    if (x_max <= x_min) x_max = x_min + 1.0;
    if (y_max <= y_min) y_max = y_min + 1.0;
  }

  double px(double x) const {
    return margin_left + (x - x_min) / (x_max - x_min) * (width - margin_left - margin_right);
  }
  double py(double y) const {
    return height - margin_bottom -
           (y - y_min) / (y_max - y_min) * (height - margin_top - margin_bottom);
  }

  void axes(const std::string& title, const std::string& x_label, const std::string& y_label) {
    body << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    body << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
         << title << "</text>\n";
    const double x0 = margin_left, x1 = width - margin_right;
    const double y0 = height - margin_bottom, y1 = margin_top;
    body << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
         << "\" stroke=\"black\"/>\n";
    body << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
         << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double fx = x_min + (x_max - x_min) * i / 4.0;
      const double fy = y_min + (y_max - y_min) * i / 4.0;
      char bx[32], by[32];
      std::snprintf(bx, sizeof(bx), "%.4g", fx);
      std::snprintf(by, sizeof(by), "%.4g", fy);
      body << "<text x=\"" << px(fx) << "\" y=\"" << y0 + 18
           << "\" text-anchor=\"middle\" font-size=\"11\">" << bx << "</text>\n";
      body << "<text x=\"" << x0 - 6 << "\" y=\"" << py(fy) + 4
           << "\" text-anchor=\"end\" font-size=\"11\">" << by << "</text>\n";
      body << "<line x1=\"" << px(fx) << "\" y1=\"" << y0 << "\" x2=\"" << px(fx) << "\" y2=\""
           << y0 + 4 << "\" stroke=\"black\"/>\n";
      body << "<line x1=\"" << x0 - 4 << "\" y1=\"" << py(fy) << "\" x2=\"" << x0 << "\" y2=\""
           << py(fy) << "\" stroke=\"black\"/>\n";
    }
    body << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << height - 10
         << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    body << "<text x=\"16\" y=\"" << (y0 + y1) / 2
         << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
         << (y0 + y1) / 2 << ")\">" << y_label << "</text>\n";
  }

  void polyline(std::span<const double> xs, std::span<const double> ys, const char* color,
                const char* dash = nullptr) {
    body << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (dash) body << " stroke-dasharray=\"" << dash << "\"";
    body << " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) body << px(xs[i]) << ',' << py(ys[i]) << ' ';
    body << "\"/>\n";
  }

  void bar(double x_center, double bar_width, double y_value, const char* color) {
    const double x0 = px(x_center - bar_width / 2.0);
    const double x1 = px(x_center + bar_width / 2.0);
    const double y_base = py(std::max(y_min, std::min(0.0, y_max)));
    const double y_val = py(y_value);
    body << "<rect x=\"" << x0 << "\" y=\"" << std::min(y_base, y_val) << "\" width=\""
         << x1 - x0 << "\" height=\"" << std::abs(y_base - y_val) << "\" fill=\"" << color
         << "\"/>\n";
  }

  void legend_entry(int slot, const char* color, const std::string& name) {
    const double y = margin_top + 16 + 16 * slot;
    body << "<line x1=\"" << width - 170 << "\" y1=\"" << y << "\" x2=\"" << width - 146
         << "\" y2=\"" << y << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    body << "<text x=\"" << width - 140 << "\" y=\"" << y + 4 << "\" font-size=\"11\">" << name
         << "</text>\n";
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << body.str() << "</svg>\n";
    if (!out) throw std::runtime_error("write failed: " + path);
  }
};

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

AnalysisOutputs emit_reports(const AnalysisInput& input, const std::string& outdir,
                             bool pool_runs, int window) {
  for (const auto& pr : input.policies) {
    if (pr.runs.empty()) throw std::invalid_argument("emit_reports: a policy has no runs");
    for (const auto& run : pr.runs)
      if (run.episodes.empty())
        throw std::invalid_argument("emit_reports: run without episodes");
  }

  fs::create_directories(outdir);
  AnalysisOutputs outputs;
  const auto note = [&](const std::string& p) { outputs.files_written.push_back(p); };

  // Reward curves (raw + windowed), all policies on one plot.
  {
    double y_lo = 0.0, y_hi = 0.0;
    std::size_t n_episodes = 0;
    std::vector<std::pair<std::string, std::vector<double>>> curves;
    for (const auto& pr : input.policies) {
      auto curve = mean_reward_curve(pr.runs);
      n_episodes = std::max(n_episodes, curve.size());
      for (double v : curve) {
        y_lo = std::min(y_lo, v);
        y_hi = std::max(y_hi, v);
      }
      curves.emplace_back(to_string(pr.kind), std::move(curve));
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& [name, curve] : curves) {
      const auto smoothed = windowed_mean(curve, window);
      for (std::size_t e = 0; e < curve.size(); ++e)
        rows.push_back({std::to_string(e), name, format_double(curve[e]),
                        format_double(smoothed[e])});
    }
    const std::string csv_path = (fs::path(outdir) / "reward_curve.csv").string();
    write_csv(csv_path, "episode,policy,mean_reward,mean_reward_windowed", rows);
    note(csv_path);

    SvgCanvas svg(0.0, static_cast<double>(n_episodes > 1 ? n_episodes - 1 : 1), y_lo, y_hi);
    svg.axes("Mean episodic reward per episode", "episode", "mean episodic reward");
    int slot = 0;
    for (const auto& [name, curve] : curves) {
      std::vector<double> xs(curve.size());
      for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
      const auto smoothed = windowed_mean(curve, window);
      svg.polyline(xs, curve, kSeriesColors[slot % 4], "2,3");
      svg.polyline(xs, smoothed, kSeriesColors[slot % 4]);
      svg.legend_entry(slot, kSeriesColors[slot % 4], name);
      ++slot;
    }
    const std::string svg_path = (fs::path(outdir) / "reward_curve.svg").string();
    svg.save(svg_path);
    note(svg_path);
  }

  // Episodic reward densities.
  {
    std::vector<std::pair<std::string, KdeCurve>> kdes;
    double x_lo = 0.0, x_hi = 0.0, y_hi = 0.0;
    bool first = true;
    for (const auto& pr : input.policies) {
      std::vector<double> samples;
      for (const auto& run : pr.runs)
        if (!run.failed())
          for (const auto& ep : run.episodes) samples.push_back(ep.episode_reward);
      KdeCurve kde = gaussian_kde(samples);
      if (first) {
        x_lo = kde.x.front();
        x_hi = kde.x.back();
        first = false;
      } else {
        x_lo = std::min(x_lo, kde.x.front());
        x_hi = std::max(x_hi, kde.x.back());
      }
      for (double d : kde.density) y_hi = std::max(y_hi, d);
      kdes.emplace_back(to_string(pr.kind), std::move(kde));
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& [name, kde] : kdes)
      for (std::size_t i = 0; i < kde.x.size(); ++i)
        rows.push_back({name, format_double(kde.x[i]), format_double(kde.density[i])});
    const std::string csv_path = (fs::path(outdir) / "reward_density.csv").string();
    write_csv(csv_path, "policy,reward,density", rows);
    note(csv_path);

    SvgCanvas svg(x_lo, x_hi, 0.0, y_hi);
    svg.axes("Episodic reward density", "episodic reward", "density");
    int slot = 0;
    for (const auto& [name, kde] : kdes) {
      svg.polyline(kde.x, kde.density, kSeriesColors[slot % 4]);
      svg.legend_entry(slot, kSeriesColors[slot % 4], name);
      ++slot;
    }
    const std::string svg_path = (fs::path(outdir) / "reward_density.svg").string();
    svg.save(svg_path);
    note(svg_path);
  }

  // Per-policy regression reports.
  for (const auto& pr : input.policies) {
    PolicyAnalysis pa;
    pa.kind = pr.kind;
    const fs::path pol_dir = fs::path(outdir) / to_string(pr.kind);
    fs::create_directories(pol_dir);

    const Matrix x = action_count_matrix(pr, pool_runs);
    const auto y = episode_reward_vector(pr, pool_runs);
    pa.pooled_fit = ols_fit(x, y);

    // Class sums: fit each run against its own dataset labels, then add up.
    for (std::size_t r = 0; r < pr.runs.size(); ++r) {
      if (pr.runs[r].failed() || pr.labels[r].empty()) continue;
      PolicyRuns single;
      single.kind = pr.kind;
      single.train_size = pr.train_size;
      single.num_actions = pr.num_actions;
      single.n_action_kinds = pr.n_action_kinds;
      single.runs.push_back(pr.runs[r]);
      const Matrix xr = action_count_matrix(single, false);
      const auto yr = episode_reward_vector(single, false);
      const ClassAggregate agg = group_by_class(ols_fit(xr, yr), pr.labels[r]);
      for (std::size_t c = 0; c < agg.sums.size(); ++c) pa.class_sums.sums[c] += agg.sums[c];
    }

    {
      std::vector<std::vector<std::string>> rows;
      for (std::size_t g = 0; g < pa.pooled_fit.coefficients.size(); ++g) {
        // Label column only meaningful when all runs agree on it.
        int label = -1;
        bool consistent = true;
        for (const auto& labels : pr.labels) {
          if (labels.empty()) continue;
          if (label == -1) label = labels[g];
          else if (label != labels[g]) consistent = false;
        }
        rows.push_back({std::to_string(g),
                        consistent && label >= 0 ? to_string(graph_class_from_index(label))
                                                 : "mixed",
                        format_double(pa.pooled_fit.coefficients[g])});
      }
      const std::string path = (pol_dir / "coefficients.csv").string();
      write_csv(path, "graph_id,class,coefficient", rows);
      note(path);
    }
    {
      std::ofstream out(pol_dir / "r2.txt");
      out << "r_squared " << format_double(pa.pooled_fit.r_squared) << '\n'
          << "rows " << x.rows << '\n'
          << "cols " << x.cols << '\n'
          << "pooling " << (pool_runs ? "mean_over_runs" : "per_run_episode") << '\n';
      note((pol_dir / "r2.txt").string());
    }
    {
      std::vector<std::vector<std::string>> rows;
      for (int c = 0; c < kNumGraphClasses; ++c)
        rows.push_back({to_string(static_cast<GraphClass>(c)),
                        format_double(pa.class_sums.sums[static_cast<std::size_t>(c)])});
      const std::string path = (pol_dir / "class_sums.csv").string();
      write_csv(path, "class,coefficient_sum", rows);
      note(path);
    }

    {  // coefficient bars by graph id
      double lo = 0.0, hi = 0.0;
      for (double c : pa.pooled_fit.coefficients) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      SvgCanvas svg(-0.5, static_cast<double>(pa.pooled_fit.coefficients.size()) - 0.5, lo, hi);
      svg.axes(std::string("Action coefficients (") + to_string(pr.kind) + ")", "graph id",
               "regression coefficient");
      for (std::size_t g = 0; g < pa.pooled_fit.coefficients.size(); ++g)
        svg.bar(static_cast<double>(g), 0.8, pa.pooled_fit.coefficients[g], kSeriesColors[0]);
      const std::string path = (pol_dir / "coefficients.svg").string();
      svg.save(path);
      note(path);
    }
    {  // class sum bars
      double lo = 0.0, hi = 0.0;
      for (double c : pa.class_sums.sums) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      SvgCanvas svg(-0.5, kNumGraphClasses - 0.5, lo, hi);
      svg.axes(std::string("Class-grouped coefficient sums (") + to_string(pr.kind) + ")",
               "class (0=cycle .. 7=circular_ladder)", "coefficient sum");
      for (int c = 0; c < kNumGraphClasses; ++c)
        svg.bar(static_cast<double>(c), 0.7, pa.class_sums.sums[static_cast<std::size_t>(c)],
                kSeriesColors[1]);
      const std::string path = (pol_dir / "class_sums.svg").string();
      svg.save(path);
      note(path);
    }
    outputs.policies.push_back(std::move(pa));
  }
  return outputs;
}

}  // namespace poisonlab
