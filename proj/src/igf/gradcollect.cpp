#include "fulab/igf/gradcollect.hpp"

#include <stdexcept>

#include "fulab/kern/kernels.hpp"

namespace fulab::igf {

GradDiffMatrix collect_aux_gradients(const fedsim::Model& m,
                                     const ParamVector& theta_T,
                                     const ParamVector& theta_prime,
                                     const LabeledDataset& aux,
                                     const std::string& provenance) {
  theta_T.check_same(theta_prime);
  theta_T.check_layout(m.layout().id());
  if (aux.size() == 0)
    throw std::invalid_argument("aux gradient collection: empty auxiliary set");

  GradDiffMatrix out;
  out.m = aux.size();
  out.d = theta_T.size();
  out.layout_id = theta_T.layout_id;
  out.provenance = provenance;
  out.data.resize(out.m * out.d);
  for (std::size_t i = 0; i < out.m; ++i) {
    const auto g = fedsim::per_sample_gradient(m, theta_T, aux.images[i], aux.labels[i]);
    const auto gu = fedsim::per_sample_gradient(m, theta_prime, aux.images[i], aux.labels[i]);
    kern::vsub(g.data(), gu.data(), out.row(i), out.d);
  }
  return out;
}

}  // namespace fulab::igf
