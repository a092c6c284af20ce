#include "poisonlab/checkpoint.hpp"

#include <bit>
#include <filesystem>
#include <fstream>
#include <vector>

#include "json.hpp"

namespace poisonlab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(sizeof(double) == 8, "checkpoint format assumes 8-byte doubles");

void require_little_endian() {
  if constexpr (std::endian::native != std::endian::little)
    throw std::runtime_error("checkpoint format requires a little-endian host");
}

struct NamedTensor {
  const char* name;
  const ParamTensor* tensor;
};

void write_checkpoint(const std::string& dir, json manifest,
                      const std::vector<NamedTensor>& tensors) {
  require_little_endian();
  fs::create_directories(dir);
  std::ofstream bin(fs::path(dir) / "tensors.bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write checkpoint: " + dir);

  json tensor_meta = json::array();
  std::int64_t offset = 0;  // in doubles
  for (const auto& [name, t] : tensors) {
    tensor_meta.push_back({{"name", name},
                           {"rows", t->value.rows},
                           {"cols", t->value.cols},
                           {"offset", offset}});
    for (const Matrix* m : {&t->value, &t->m, &t->v}) {
      bin.write(reinterpret_cast<const char*>(m->data.data()),
                static_cast<std::streamsize>(m->data.size() * sizeof(double)));
      offset += static_cast<std::int64_t>(m->data.size());
    }
  }
  if (!bin) throw std::runtime_error("write failed: " + dir + "/tensors.bin");
  bin.close();

  manifest["format"] = "poisonlab-checkpoint";
  manifest["version"] = 1;
  manifest["tensors"] = tensor_meta;
  std::ofstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw std::runtime_error("cannot write checkpoint manifest: " + dir);
  mf << manifest.dump(2) << '\n';
}

json read_manifest(const std::string& dir, const std::string& expected_kind) {
  std::ifstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw std::runtime_error("cannot open checkpoint manifest in " + dir);
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw std::runtime_error("bad checkpoint manifest in " + dir + ": " + e.what());
  }
  if (manifest.value("format", "") != "poisonlab-checkpoint")
    throw std::runtime_error(dir + ": not a poisonlab checkpoint");
  if (manifest.value("kind", "") != expected_kind)
    throw std::runtime_error(dir + ": checkpoint kind is '" + manifest.value("kind", "") +
                             "', expected '" + expected_kind + "'");
  return manifest;
}

void read_tensors(const std::string& dir, const json& manifest,
                  const std::vector<std::pair<const char*, ParamTensor*>>& tensors) {
  require_little_endian();
  std::ifstream bin(fs::path(dir) / "tensors.bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + dir + "/tensors.bin");
  for (auto& [name, t] : tensors) {
    const json* meta = nullptr;
    for (const auto& tm : manifest.at("tensors"))
      if (tm.value("name", "") == name) meta = &tm;
    if (!meta) throw std::runtime_error(dir + ": tensor '" + std::string(name) + "' missing");
    const int rows = meta->at("rows").get<int>();
    const int cols = meta->at("cols").get<int>();
    if (rows != t->value.rows || cols != t->value.cols)
      throw std::runtime_error(dir + ": tensor '" + std::string(name) + "' has shape " +
                               std::to_string(rows) + "x" + std::to_string(cols) +
                               ", expected " + std::to_string(t->value.rows) + "x" +
                               std::to_string(t->value.cols));
    bin.seekg(meta->at("offset").get<std::int64_t>() * static_cast<std::int64_t>(sizeof(double)));
    for (Matrix* m : {&t->value, &t->m, &t->v}) {
      bin.read(reinterpret_cast<char*>(m->data.data()),
               static_cast<std::streamsize>(m->data.size() * sizeof(double)));
    }
    if (!bin) throw std::runtime_error(dir + ": tensors.bin truncated");
  }
}

}  // namespace

void save_gnn_checkpoint(const GnnModel& model, const std::string& dir) {
  json manifest{{"kind", "gnn"},
                {"hidden_dim", model.hidden_dim},
                {"num_classes", model.num_classes},
                {"step_count", model.step_count},
                {"optimizer",
                 {{"lr", model.opt.lr},
                  {"beta1", model.opt.beta1},
                  {"beta2", model.opt.beta2},
                  {"eps", model.opt.eps},
                  {"plain_sgd", model.opt.plain_sgd}}}};
  write_checkpoint(dir, std::move(manifest),
                   {{"conv1", &model.conv1},
                    {"conv1_bias", &model.conv1_bias},
                    {"conv2", &model.conv2},
                    {"conv2_bias", &model.conv2_bias},
                    {"head", &model.head},
                    {"head_bias", &model.head_bias}});
}

GnnModel load_gnn_checkpoint(const std::string& dir) {
  const json manifest = read_manifest(dir, "gnn");
  GnnModel model(manifest.at("hidden_dim").get<int>(), manifest.at("num_classes").get<int>());
  model.step_count = manifest.value("step_count", std::int64_t{0});
  const auto& opt = manifest.at("optimizer");
  model.opt.lr = opt.at("lr").get<double>();
  model.opt.beta1 = opt.at("beta1").get<double>();
  model.opt.beta2 = opt.at("beta2").get<double>();
  model.opt.eps = opt.at("eps").get<double>();
  model.opt.plain_sgd = opt.at("plain_sgd").get<bool>();
  read_tensors(dir, manifest,
               {{"conv1", &model.conv1},
                {"conv1_bias", &model.conv1_bias},
                {"conv2", &model.conv2},
                {"conv2_bias", &model.conv2_bias},
                {"head", &model.head},
                {"head_bias", &model.head_bias}});
  return model;
}

void save_policy_checkpoint(const PolicyModel& policy, const std::string& dir) {
  json manifest{{"kind", "policy"},
                {"state_dim", policy.state_dim},
                {"hidden_dim", policy.hidden_dim},
                {"num_actions", policy.num_actions},
                {"step_count", policy.step_count},
                {"optimizer",
                 {{"lr", policy.opt.lr},
                  {"beta1", policy.opt.beta1},
                  {"beta2", policy.opt.beta2},
                  {"eps", policy.opt.eps},
                  {"plain_sgd", policy.opt.plain_sgd}}}};
  write_checkpoint(dir, std::move(manifest),
                   {{"layer1", &policy.layer1}, {"layer2", &policy.layer2}});
}

PolicyModel load_policy_checkpoint(const std::string& dir) {
  const json manifest = read_manifest(dir, "policy");
  PolicyModel policy(manifest.at("state_dim").get<int>(), manifest.at("hidden_dim").get<int>(),
                     manifest.at("num_actions").get<int>());
  policy.step_count = manifest.value("step_count", std::int64_t{0});
  const auto& opt = manifest.at("optimizer");
  policy.opt.lr = opt.at("lr").get<double>();
  policy.opt.beta1 = opt.at("beta1").get<double>();
  policy.opt.beta2 = opt.at("beta2").get<double>();
  policy.opt.eps = opt.at("eps").get<double>();
  policy.opt.plain_sgd = opt.at("plain_sgd").get<bool>();
  read_tensors(dir, manifest, {{"layer1", &policy.layer1}, {"layer2", &policy.layer2}});
  return policy;
}

}  // namespace poisonlab
