#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fulab/fedsim/federation.hpp"

namespace fulab::igf {

// m x d matrix of per-sample gradient differences (rows = samples).
struct GradDiffMatrix {
  std::size_t m = 0, d = 0;
  std::vector<float> data;  // row-major
  std::uint64_t layout_id = 0;
  std::string provenance;

  float* row(std::size_t i) { return data.data() + i * d; }
  const float* row(std::size_t i) const { return data.data() + i * d; }
};

// Gray-box queries against both models for every auxiliary sample:
// row i = grad(theta_T; x_i, y_i) - grad(theta_prime; x_i, y_i).
GradDiffMatrix collect_aux_gradients(const fedsim::Model& m,
                                     const ParamVector& theta_T,
                                     const ParamVector& theta_prime,
                                     const LabeledDataset& aux,
                                     const std::string& provenance = "");

}  // namespace fulab::igf
