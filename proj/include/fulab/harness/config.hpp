#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fulab/defenses/defenses.hpp"
#include "fulab/fedsim/federation.hpp"
#include "fulab/igf/inversion.hpp"
#include "fulab/unlearn/unlearn.hpp"

namespace fulab::harness {

// One end-to-end experiment: dataset, model, federation, scenario, unlearn
// method, defense, attack and metric settings. The canonical JSON dump is
// hashed into the run fingerprint embedded in every artifact.
struct ExperimentConfig {
  std::string dataset = "synthetic";
  std::string arch = "convnet";
  fedsim::ModelOptions model_options;

  int train_size = 2000;
  int holdout_size = 512;

  fedsim::FederationConfig federation;

  std::string scenario_kind = "sample";  // sample | class | client
  std::vector<int> unlearned_clients = {0, 1};
  int forgotten_count = 200;
  int target_class = 1;

  std::string unlearn_method = "afu";  // afu | efu
  unlearn::AFUConfig afu;
  std::uint64_t efu_seed = 9001;  // fresh initialization, distinct from training

  defenses::DefenseConfig defense;

  // attack
  double nu = 0.95;
  double beta = 1.0;
  std::string aux_source = "in-distribution";  // in-distribution | out-of-distribution
  int aux_size = 2000;
  std::string reduction = "svd";  // svd | hash
  std::size_t hash_dim = 0;       // 0 = half the input dimension
  bool center = true;
  igf::InversionTrainConfig attack_train;
  int seed_channels = 256;
  int seed_hw = 4;
  std::vector<int> stage_widths = {64, 48, 32};

  igf::PerceptualExtractor::Config phi;
  double psnr_r = 1.0;
  double tau = 0.0;  // verification threshold; 0 skips the verdict in reports

  std::uint64_t seed = 1234;
  std::string out_dir = "runs";

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);

  // fnv-1a of the canonical dump, as 16 hex chars
  std::string fingerprint() const;
};

}  // namespace fulab::harness
