#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fulab/core/image.hpp"
#include "fulab/fedsim/model.hpp"

namespace fulab::fedsim {

struct FederationConfig {
  int clients = 8;                    // H
  double selection_fraction = 1.0;
  int rounds = 1;                     // T
  int local_epochs = 1;
  double local_lr = 0.01;
  int batch = 32;
  std::string aggregator = "fedavg";  // fedavg | fedprox | fedopt
  double fedprox_mu = 0.0;
  double server_lr = 1.0;             // fedopt only
  std::uint64_t seed = 0;

  void validate() const;
};

struct ClientDataset {
  int id = 0;
  LabeledDataset data;
};

// iid: seeded shuffle then round-robin deal; sizes differ by at most one.
std::vector<ClientDataset> partition_dataset(const LabeledDataset& ds, int clients,
                                             const std::string& scheme,
                                             std::uint64_t seed);

ParamVector per_sample_gradient(const Model& m, const ParamVector& p,
                                const Image& x, int y);

// Mean-minibatch cross-entropy gradient over the whole set, added into grad.
double batch_gradient(const Model& m, const ParamVector& p,
                      const LabeledDataset& ds, float* grad);

ParamVector local_update(const Model& m, const ParamVector& broadcast,
                         const ClientDataset& client, double lr, int epochs,
                         int batch, std::uint64_t seed,
                         const std::string& aggregator, double fedprox_mu);

struct ServerState {
  ParamVector global;
  double server_lr = 1.0;
};

// Weights are normalized internally; summation follows input order, which
// train_federated keeps ascending in client id.
ParamVector aggregate(const std::vector<std::pair<ParamVector, double>>& updates,
                      const std::string& aggregator, const ServerState* server);

struct TrainResult {
  ParamVector final_params;
  std::vector<ParamVector> round_checkpoints;
  std::vector<std::vector<int>> selected_per_round;
  double holdout_accuracy = -1.0;
};

TrainResult train_federated(const Model& m, const FederationConfig& cfg,
                            const std::vector<ClientDataset>& clients,
                            const LabeledDataset* holdout = nullptr,
                            const ParamVector* init = nullptr);

}  // namespace fulab::fedsim
