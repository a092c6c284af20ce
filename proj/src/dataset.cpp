#include "poisonlab/dataset.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace poisonlab {

namespace {

constexpr std::uint64_t kTrainStream = 101;
constexpr std::uint64_t kTestStream = 102;

int hardest_class_minimum() {
  int m = 1;
  for (int c = 0; c < kNumGraphClasses; ++c)
    m = std::max(m, min_feasible_nodes(static_cast<GraphClass>(c)));
  return m;
}

Dataset generate_split(const DatasetConfig& cfg, int count, const Rng& stream,
                       const char* role) {
  Dataset out;
  out.role = role;
  out.graphs.reserve(static_cast<std::size_t>(count));
  const auto span = static_cast<std::uint64_t>(cfg.max_nodes - cfg.min_nodes + 1);
  for (int i = 0; i < count; ++i) {
    Rng g_rng = stream.child({static_cast<std::uint64_t>(i)});
    const auto cls = static_cast<GraphClass>(g_rng.uniform_int(kNumGraphClasses));
    const int n = cfg.min_nodes + static_cast<int>(g_rng.uniform_index(span));
    out.graphs.push_back(generate_class_graph(cls, n, g_rng));
  }
  return out;
}

}  // namespace

void DatasetConfig::validate() const {
  if (train_size < 1 || test_size < 1)
    throw std::invalid_argument("dataset sizes must be >= 1");
  if (min_nodes > max_nodes)
    throw std::invalid_argument("min_nodes must not exceed max_nodes");
  const int feasible = hardest_class_minimum();
  if (min_nodes < feasible)
    throw std::invalid_argument("min_nodes must be >= " + std::to_string(feasible) +
                                " so every class is generable");
}

std::pair<Dataset, Dataset> generate_dataset(const DatasetConfig& config) {
  config.validate();
  Rng root(config.seed);
  Dataset train = generate_split(config, config.train_size, root.child({kTrainStream}), "train");
  Dataset test = generate_split(config, config.test_size, root.child({kTestStream}), "test");
  return {std::move(train), std::move(test)};
}

void save_dataset(const Dataset& dataset, const std::string& path,
                  const DatasetConfig* config_echo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  nlohmann::json header{
      {"kind", "poisonlab-dataset"},
      {"version", 1},
      {"role", dataset.role},
      {"count", dataset.size()},
  };
  if (config_echo) {
    header["config"] = {{"train_size", config_echo->train_size},
                        {"test_size", config_echo->test_size},
                        {"min_nodes", config_echo->min_nodes},
                        {"max_nodes", config_echo->max_nodes},
                        {"seed", config_echo->seed}};
  }
  out << header.dump() << '\n';
  for (const Graph& g : dataset.graphs) out << graph_to_json_line(g) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file, missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ":1: bad header: " + e.what());
  }
  if (header.value("kind", "") != "poisonlab-dataset")
    throw std::runtime_error(path + ":1: not a poisonlab dataset file");
  const int count = header.value("count", -1);
  if (count < 0) throw std::runtime_error(path + ":1: header missing count");

  Dataset out;
  out.role = header.value("role", "");
  out.graphs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int line_no = i + 2;
    if (!std::getline(in, line))
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": truncated file, expected " + std::to_string(count) +
                               " graph records");
    try {
      out.graphs.push_back(graph_from_json_line(line));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace poisonlab
