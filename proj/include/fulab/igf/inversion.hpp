#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fulab/core/image.hpp"
#include "fulab/core/layout.hpp"
#include "fulab/igf/perceptual.hpp"
#include "fulab/igf/projection.hpp"
#include "fulab/pofu/pofu.hpp"

namespace fulab::igf {

// Decoder from projected gradient differences to images: a linear layer
// reshaped to a seed feature map, then per stage [conv3x3, batch norm,
// relu, 2x depth-to-space], a 1x1 conv head and a sigmoid. When the
// generated square exceeds the target size the center window is kept.
struct InversionModelSpec {
  int input_dim = 0;  // k
  int out_c = 1, out_h = 28, out_w = 28;
  int seed_channels = 256;
  int seed_hw = 4;
  std::vector<int> stage_widths = {64, 48, 32};
  double beta = 1.0;

  int stages() const { return static_cast<int>(stage_widths.size()); }
  int gen_hw() const { return seed_hw << stages(); }
  void validate() const;
  std::string spec_id() const;
};

class InversionNet {
 public:
  InversionNet(InversionModelSpec spec, std::uint64_t init_seed);

  const InversionModelSpec& spec() const { return spec_; }
  const ParamLayout& layout() const { return layout_; }
  std::size_t param_count() const { return params_.size(); }

  std::vector<float> params_;   // trainable, canonical layout
  std::vector<float> buffers_;  // bn running mean/var per stage

  struct BatchCache {
    std::size_t n = 0;
    std::vector<float> z;
    std::vector<float> seed;
    std::vector<std::vector<float>> conv_pre, act, ps;  // per stage
    std::vector<std::vector<float>> bn_mean, bn_invstd;
    std::vector<float> sig;  // post-sigmoid full square
    std::vector<Image> out;
  };

  // Train-mode forward over a contiguous n x k batch; updates running stats.
  void forward_train(const float* z, std::size_t n, BatchCache& cache);
  void forward_eval(const float* z, std::size_t n, std::vector<Image>& out) const;
  // dimg: n x (out_c*out_h*out_w) gradient w.r.t. the cropped output.
  void backward(const BatchCache& cache, const float* dimg, float* grad_acc) const;

  std::size_t buffer_count() const { return buffers_.size(); }

 private:
  int stage_in_c(int s) const;
  int stage_hw(int s) const;  // input spatial edge of stage s

  InversionModelSpec spec_;
  ParamLayout layout_;
};

struct EpochStats {
  int epoch = 0;
  double composite = 0.0;   // L_M + beta * L_P, per-sample mean of the sums
  double pixel = 0.0;       // L_M term
  double perceptual = 0.0;  // L_P term
  double mse_per_pixel = 0.0;
};

struct InversionTrainConfig {
  double lr = 1e-4;
  int batch = 256;
  int epochs = 20;
  std::uint64_t seed = 1234;
};

struct TrainOutcome {
  std::vector<EpochStats> curve;
  bool aborted = false;
};

// Minimizes the composite loss over aligned (projected row, image) pairs.
// A non-finite batch loss rolls the model back to the last finished epoch.
TrainOutcome train_inversion(InversionNet& net, const std::vector<float>& z_rows,
                             const std::vector<Image>& targets,
                             const InversionTrainConfig& cfg,
                             const PerceptualExtractor* phi);

struct ReconBatch {
  std::vector<Image> images;
  int source_client = -1;
  std::string source;
};

ReconBatch reconstruct(const InversionNet& net, const ProjectionBasis& basis,
                       const pofu::PoFURecord& rec);
// Same decoder applied to already-reduced feature rows (hash path, tests).
ReconBatch reconstruct_from_features(const InversionNet& net, const float* z,
                                     std::size_t n);

void save_inversion(const std::string& path, const InversionNet& net,
                    const std::string& fingerprint = "");
InversionNet load_inversion(const std::string& path);

}  // namespace fulab::igf
