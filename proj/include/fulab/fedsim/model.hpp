#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fulab/core/image.hpp"
#include "fulab/core/layout.hpp"
#include "fulab/core/rng.hpp"

namespace fulab::fedsim {

struct ModelSpec {
  std::string arch;  // convnet | resnet-small | mlp
  int in_c = 1, in_h = 28, in_w = 28;
  int classes = 10;
  std::size_t d = 0;
  std::string spec_id;
};

struct ModelOptions {
  int mlp_hidden = 128;  // 0 gives a bare linear classifier
  int conv_c1 = 8, conv_c2 = 16;
  int res_c1 = 8, res_c2 = 16;
};

// A classification model with a canonical flat parameter layout. Forward
// and gradients are pure per-sample functions of (params, x, y).
class Model {
 public:
  virtual ~Model() = default;

  const ModelSpec& spec() const { return spec_; }
  const ParamLayout& layout() const { return layout_; }

  ParamVector init_params(std::uint64_t seed) const;
  ParamVector zeros() const { return ParamVector(layout_.total(), layout_.id()); }

  virtual std::vector<float> logits(const ParamVector& p, const Image& x) const = 0;
  // Returns per-sample cross-entropy loss; accumulates the gradient into
  // grad_acc (layout order) when non-null.
  virtual double loss_grad(const ParamVector& p, const Image& x, int y,
                           float* grad_acc) const = 0;

  double accuracy(const ParamVector& p, const LabeledDataset& ds) const;

 protected:
  void check_input(const ParamVector& p, const Image& x) const;
  virtual void init_into(float* params, Rng& rng) const = 0;

  ModelSpec spec_;
  ParamLayout layout_;
};

std::unique_ptr<Model> make_model(const std::string& arch, int in_c, int in_h,
                                  int in_w, int classes,
                                  const ModelOptions& opt = {});

}  // namespace fulab::fedsim
