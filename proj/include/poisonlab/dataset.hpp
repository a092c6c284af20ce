#pragma once

#include <string>
#include <utility>
#include <vector>

#include "poisonlab/graph.hpp"

namespace poisonlab {

struct DatasetConfig {
  int train_size = 180;
  int test_size = 30;
  int min_nodes = 15;
  int max_nodes = 35;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on infeasible bounds. min_nodes must be at
  // least 6 so every class generator accepts every drawn node count.
  void validate() const;
};

struct Dataset {
  std::vector<Graph> graphs;
  std::string role;  // "train" or "test"

  int size() const { return static_cast<int>(graphs.size()); }
  bool operator==(const Dataset&) const = default;
};

// Draws train_size + test_size graphs: class uniform over the 8 classes,
// node count uniform in [min_nodes, max_nodes]. Train and test come from
// disjoint RNG streams derived from config.seed; generation is
// bit-reproducible per seed.
std::pair<Dataset, Dataset> generate_dataset(const DatasetConfig& config);

// Newline-delimited file: a JSON header line, then one graph record per
// line (graph-core format).
void save_dataset(const Dataset& dataset, const std::string& path,
                  const DatasetConfig* config_echo = nullptr);
// Throws std::runtime_error with a line number on malformed input; never
// returns a partially read dataset.
Dataset load_dataset(const std::string& path);

}  // namespace poisonlab
