#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fulab/fedsim/federation.hpp"

namespace fulab::pofu {

// One client's proof: per forgotten sample, the gradient under the original
// model minus the gradient under the unlearned model. Rows carry no image
// or label bytes.
struct PoFURecord {
  int client_id = 0;
  std::size_t n = 0;  // rows, one per forgotten sample
  std::size_t d = 0;
  std::string scenario;                  // sample | class | client
  nlohmann::ordered_json defense;        // {"id":"none"} or id + parameters
  std::uint64_t layout_id = 0;
  std::vector<float> rows;               // n x d row-major

  float* row(std::size_t j) { return rows.data() + j * d; }
  const float* row(std::size_t j) const { return rows.data() + j * d; }
};

struct VerificationVerdict {
  std::vector<double> row_norms;
  std::vector<bool> row_pass;
  double tau = 0.0;
  bool overall = false;
};

PoFURecord compute_pofu(const fedsim::Model& m, const ParamVector& theta_T,
                        const ParamVector& theta_prime,
                        const LabeledDataset& forgotten, int client_id,
                        const std::string& scenario);

// Inclusive bound: a row passes iff ||row||_2 <= tau. Norms in double.
VerificationVerdict verify_pofu(const PoFURecord& rec, double tau);

void save_pofu(const std::string& path, const PoFURecord& rec,
               const std::string& fingerprint = "");
PoFURecord load_pofu(const std::string& path);

}  // namespace fulab::pofu
