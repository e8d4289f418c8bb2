#include "fulab/igf/projection.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <Eigen/Dense>

#include "fulab/core/binio.hpp"
#include "fulab/kern/kernels.hpp"

namespace fulab::igf {

namespace k = fulab::kern;

namespace {
constexpr char kMagic[12] = "FULABBASIS";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

std::size_t select_k(const std::vector<double>& sigma, double nu) {
  if (sigma.empty()) throw std::invalid_argument("select_k: no singular values");
  if (!(nu > 0.0 && nu <= 1.0))
    throw std::invalid_argument("select_k: nu must be in (0,1]");
  double total = 0.0;
  for (double s : sigma) total += s * s;
  if (!(total > 0.0))
    throw std::runtime_error("degenerate gradient differences");
  double cum = 0.0;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    cum += sigma[j] * sigma[j];
    if (cum / total >= nu) return j + 1;
  }
  return sigma.size();
}

ProjectionBasis fit_projection(const GradDiffMatrix& gd, double nu, bool centered) {
  if (gd.m < 2)
    throw std::invalid_argument("fit_projection: need at least two rows");
  if (!(nu > 0.0 && nu <= 1.0))
    throw std::invalid_argument("fit_projection: nu must be in (0,1]");

  const std::size_t m = gd.m, d = gd.d;
  // Centered matrix in double; m << d so the Gram route keeps the memory
  // footprint at m^2 plus one dense copy.
  Eigen::MatrixXd A(m, d);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j)
      A(i, j) = static_cast<double>(gd.data[i * d + j]);
  Eigen::VectorXd mu = A.colwise().mean();
  A.rowwise() -= mu.transpose();

  Eigen::MatrixXd gram = A * A.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("fit_projection: eigendecomposition failed");

  // Eigen returns ascending eigenvalues; flip to non-increasing sigma and
  // flush rank-tolerance noise to exactly zero so nu = 1 means rank.
  const std::size_t mm = m;
  std::vector<double> lambda(mm);
  for (std::size_t i = 0; i < mm; ++i) {
    double l = eig.eigenvalues()(static_cast<Eigen::Index>(mm - 1 - i));
    lambda[i] = l > 0.0 ? l : 0.0;
  }
  const double tol = lambda.empty() ? 0.0
                                    : lambda[0] * static_cast<double>(mm) * 1e-13;
  double total = 0.0;
  for (auto& l : lambda) {
    if (l <= tol) l = 0.0;
    total += l;
  }
  if (!(total > 0.0)) throw std::runtime_error("degenerate gradient differences");

  ProjectionBasis basis;
  basis.d = d;
  basis.m = m;
  basis.nu = nu;
  basis.centered = centered;
  basis.layout_id = gd.layout_id;
  basis.singular_values.resize(mm);
  for (std::size_t i = 0; i < mm; ++i) basis.singular_values[i] = std::sqrt(lambda[i]);
  basis.k = select_k(basis.singular_values, nu);

  basis.mean.resize(d);
  for (std::size_t j = 0; j < d; ++j) basis.mean[j] = static_cast<float>(mu(j));

  basis.basis.resize(d * basis.k);
  Eigen::VectorXd col(d);
  for (std::size_t j = 0; j < basis.k; ++j) {
    const double sigma = basis.singular_values[j];
    if (!(sigma > 0.0))
      throw std::runtime_error("fit_projection: selected a null direction");
    const Eigen::VectorXd u = eig.eigenvectors().col(static_cast<Eigen::Index>(mm - 1 - j));
    col.noalias() = A.transpose() * u;
    col /= sigma;
    float* dst = basis.basis.data() + j * d;
    for (std::size_t r = 0; r < d; ++r) dst[r] = static_cast<float>(col(r));
  }
  return basis;
}

std::vector<float> project(const ProjectionBasis& basis, const float* rows,
                           std::size_t p, std::size_t d) {
  if (d != basis.d) throw std::invalid_argument("project: dimension mismatch");
  std::vector<float> out(p * basis.k);
  std::vector<float> tmp(d);
  for (std::size_t i = 0; i < p; ++i) {
    const float* row = rows + i * d;
    const float* src = row;
    if (basis.centered) {
      k::vsub(row, basis.mean.data(), tmp.data(), d);
      src = tmp.data();
    }
    for (std::size_t j = 0; j < basis.k; ++j)
      out[i * basis.k + j] = k::dot(src, basis.column(j), d);
  }
  return out;
}

void save_basis(const std::string& path, const ProjectionBasis& basis,
                const std::string& fingerprint) {
  auto os = binio::open_out(path);
  binio::write_magic(os, kMagic);
  nlohmann::ordered_json h;
  h["d"] = basis.d;
  h["k"] = basis.k;
  h["nu"] = basis.nu;
  h["m"] = basis.m;
  h["centered"] = basis.centered;
  h["layout_id"] = hex64(basis.layout_id);
  h["singular_values"] = basis.singular_values;
  if (!fingerprint.empty()) h["fingerprint"] = fingerprint;
  binio::write_header(os, h);
  binio::write_f32(os, basis.mean.data(), basis.mean.size());
  binio::write_f32(os, basis.basis.data(), basis.basis.size());
  if (!os) throw std::runtime_error("basis write failed: " + path);
}

ProjectionBasis load_basis(const std::string& path) {
  auto is = binio::open_in(path);
  binio::read_magic(is, kMagic, "basis " + path);
  const auto h = binio::read_header(is, "basis " + path);
  ProjectionBasis b;
  b.d = h.at("d").get<std::size_t>();
  b.k = h.at("k").get<std::size_t>();
  b.nu = h.at("nu").get<double>();
  b.m = h.at("m").get<std::size_t>();
  b.centered = h.at("centered").get<bool>();
  b.layout_id = std::stoull(h.at("layout_id").get<std::string>(), nullptr, 16);
  b.singular_values = h.at("singular_values").get<std::vector<double>>();
  b.mean.resize(b.d);
  b.basis.resize(b.d * b.k);
  binio::read_f32(is, b.mean.data(), b.mean.size(), "basis " + path);
  binio::read_f32(is, b.basis.data(), b.basis.size(), "basis " + path);
  return b;
}

}  // namespace fulab::igf
