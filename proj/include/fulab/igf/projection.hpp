#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fulab/igf/gradcollect.hpp"

namespace fulab::igf {

// SVD projection basis fitted on centered gradient differences: the mean,
// the leading right singular vectors (orthonormal columns), and all
// singular values of the centered matrix.
struct ProjectionBasis {
  std::size_t d = 0, k = 0, m = 0;
  double nu = 0.0;
  bool centered = true;  // subtract the mean before projecting
  std::vector<float> mean;           // d
  std::vector<float> basis;          // d x k, column-major
  std::vector<double> singular_values;  // m, non-increasing
  std::uint64_t layout_id = 0;

  const float* column(std::size_t j) const { return basis.data() + j * d; }
};

// Smallest k whose cumulative squared singular values reach nu of the total.
std::size_t select_k(const std::vector<double>& sigma, double nu);

ProjectionBasis fit_projection(const GradDiffMatrix& gd, double nu,
                               bool centered = true);

// rows: p x d row-major -> p x k row-major. Applies the basis's centering flag.
std::vector<float> project(const ProjectionBasis& basis, const float* rows,
                           std::size_t p, std::size_t d);

void save_basis(const std::string& path, const ProjectionBasis& basis,
                const std::string& fingerprint = "");
ProjectionBasis load_basis(const std::string& path);

}  // namespace fulab::igf
