#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fulab/core/image.hpp"

namespace fulab::igf {

// Fixed convolutional feature extractor used by the perceptual loss and the
// LPIPS metric. Two sources: "seeded-random" (always available offline) and
// "pretrained" weights loaded from a file. Grayscale inputs are replicated
// to three channels internally; native shapes are kept everywhere else.
class PerceptualExtractor {
 public:
  struct Config {
    std::string kind = "seeded-random";  // seeded-random | pretrained
    std::string weights_path;            // pretrained only
    std::uint64_t seed = 77;
    int c1 = 8, c2 = 16;
    std::vector<int> layers = {1, 2};    // feature maps included in the sum
  };

  PerceptualExtractor(const Config& cfg, int in_c, int in_h, int in_w);

  // Feature maps for the configured layer set, flattened per layer.
  std::vector<std::vector<float>> features(const Image& x) const;

  // sum_l ||phi_l(a) - phi_l(b)||^2; optionally the gradient w.r.t. a.
  double sq_feature_distance(const Image& a, const Image& b, Image* da) const;

  // (1/L) sum_l ||phi_l(a) - phi_l(b)||^2 per the metric definition.
  double lpips(const Image& a, const Image& b) const;

  const Config& config() const { return cfg_; }

  // Writes a weights file loadable with kind = "pretrained".
  void save_weights(const std::string& path) const;

 private:
  struct Work;
  void run_forward(const Image& x, Work& w) const;

  Config cfg_;
  int in_c_, in_h_, in_w_;
  std::vector<float> w1_, b1_, w2_, b2_;
};

}  // namespace fulab::igf
