#pragma once

#include <string>

#include "poisonlab/agent.hpp"
#include "poisonlab/gnn.hpp"

namespace poisonlab {

// Checkpoint layout: a directory holding manifest.json (shapes, offsets,
// step count, hyperparameters) and tensors.bin (raw little-endian 64-bit
// floats; per tensor the value, first-moment and second-moment arrays are
// stored back to back, row-major).
void save_gnn_checkpoint(const GnnModel& model, const std::string& dir);
GnnModel load_gnn_checkpoint(const std::string& dir);

void save_policy_checkpoint(const PolicyModel& policy, const std::string& dir);
PolicyModel load_policy_checkpoint(const std::string& dir);

}  // namespace poisonlab
