#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fulab/fedsim/federation.hpp"

namespace fulab::unlearn {

// sample: per-client forgotten index subsets; class: all samples of one
// label on unlearned clients; client: entire local datasets.
struct FUScenario {
  std::string kind;  // sample | class | client
  std::vector<int> unlearned_clients;
  std::vector<std::vector<std::size_t>> forgotten_indices;  // aligned with unlearned_clients
  int target_class = -1;  // class kind only
};

struct AFUConfig {
  double eta_u = 0.05;      // ascent rate
  double zeta = 5.0;        // parameter deviation ball radius
  int finetune_epochs = 2;
  double finetune_lr = 0.01;
  int finetune_batch = 32;
  std::uint64_t finetune_seed = 0;

  void validate() const;
};

struct ScenarioSplit {
  FUScenario scenario;
  LabeledDataset forgotten;                       // union over unlearned clients
  std::vector<fedsim::ClientDataset> retained_clients;  // all clients, forgotten removed
  // per unlearned client: its forgotten subset (row source for PoFU)
  std::vector<LabeledDataset> forgotten_per_client;
};

// sample kind: `count` indices drawn without replacement across the
// unlearned clients' data; class kind: `target_class`; client kind: all.
ScenarioSplit make_scenario(const std::string& kind,
                            const std::vector<int>& unlearned_clients, int count,
                            int target_class,
                            const std::vector<fedsim::ClientDataset>& clients,
                            std::uint64_t seed);

// Retrains from a fresh initialization on the retained data only.
fedsim::TrainResult run_efu(const fedsim::Model& m, fedsim::FederationConfig cfg,
                            const std::vector<fedsim::ClientDataset>& retained_clients,
                            std::uint64_t fresh_init_seed,
                            const LabeledDataset* holdout = nullptr);

struct AFUResult {
  ParamVector params;              // after fine-tuning
  ParamVector pre_finetune;        // aggregated ascent result
  std::vector<double> client_deviation;  // ||theta'_i - theta_T|| after projection
};

AFUResult run_afu(const fedsim::Model& m, const ParamVector& theta_T,
                  const ScenarioSplit& split, const AFUConfig& cfg);

}  // namespace fulab::unlearn
