#include "fulab/igf/perceptual.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "fulab/core/binio.hpp"
#include "fulab/core/rng.hpp"
#include "fulab/kern/kernels.hpp"
#include "fulab/nn/ops.hpp"

namespace fulab::igf {

namespace k = fulab::kern;
using nn::ConvShape;

namespace {
constexpr char kMagic[12] = "FULABPHI";
}

PerceptualExtractor::PerceptualExtractor(const Config& cfg, int in_c, int in_h,
                                         int in_w)
    : cfg_(cfg), in_c_(in_c), in_h_(in_h), in_w_(in_w) {
  if (in_c != 1 && in_c != 3)
    throw std::invalid_argument("perceptual extractor expects 1 or 3 channels");
  if (in_h % 2 != 0 || in_w % 2 != 0)
    throw std::invalid_argument("perceptual extractor needs even extents");
  for (int l : cfg_.layers)
    if (l != 1 && l != 2)
      throw std::invalid_argument("perceptual extractor: layer set is {1,2}");
  if (cfg_.layers.empty())
    throw std::invalid_argument("perceptual extractor: empty layer set");

  w1_.resize(static_cast<std::size_t>(cfg_.c1) * 3 * 9);
  b1_.assign(cfg_.c1, 0.0f);
  w2_.resize(static_cast<std::size_t>(cfg_.c2) * cfg_.c1 * 9);
  b2_.assign(cfg_.c2, 0.0f);

  if (cfg_.kind == "seeded-random") {
    Rng rng(cfg_.seed);
    const double s1 = std::sqrt(2.0 / (3.0 * 9.0));
    for (auto& w : w1_) w = static_cast<float>(rng.normal() * s1);
    const double s2 = std::sqrt(2.0 / (cfg_.c1 * 9.0));
    for (auto& w : w2_) w = static_cast<float>(rng.normal() * s2);
  } else if (cfg_.kind == "pretrained") {
    std::ifstream probe(cfg_.weights_path, std::ios::binary);
    if (!probe)
      throw std::runtime_error(
          "perceptual extractor weights not found at '" + cfg_.weights_path +
          "'; use kind \"seeded-random\" as the offline fallback");
    auto is = binio::open_in(cfg_.weights_path);
    binio::read_magic(is, kMagic, "phi " + cfg_.weights_path);
    const auto h = binio::read_header(is, "phi " + cfg_.weights_path);
    if (h.at("c1").get<int>() != cfg_.c1 || h.at("c2").get<int>() != cfg_.c2)
      throw std::runtime_error("phi weights shape mismatch: " + cfg_.weights_path);
    binio::read_f32(is, w1_.data(), w1_.size(), "phi");
    binio::read_f32(is, b1_.data(), b1_.size(), "phi");
    binio::read_f32(is, w2_.data(), w2_.size(), "phi");
    binio::read_f32(is, b2_.data(), b2_.size(), "phi");
  } else {
    throw std::invalid_argument("unknown extractor kind: " + cfg_.kind);
  }
}

void PerceptualExtractor::save_weights(const std::string& path) const {
  auto os = binio::open_out(path);
  binio::write_magic(os, kMagic);
  nlohmann::ordered_json h;
  h["c1"] = cfg_.c1;
  h["c2"] = cfg_.c2;
  binio::write_header(os, h);
  binio::write_f32(os, w1_.data(), w1_.size());
  binio::write_f32(os, b1_.data(), b1_.size());
  binio::write_f32(os, w2_.data(), w2_.size());
  binio::write_f32(os, b2_.data(), b2_.size());
}

struct PerceptualExtractor::Work {
  std::vector<float> x3;    // 3 x h x w replicated input
  std::vector<float> col1;  // im2col for conv1
  std::vector<float> f1;    // c1 x h x w post-relu
  std::vector<float> p1;    // c1 x h/2 x w/2
  std::vector<float> col2;
  std::vector<float> f2;    // c2 x h/2 x w/2 post-relu
  ConvShape s1, s2;
};

void PerceptualExtractor::run_forward(const Image& x, Work& w) const {
  if (x.c != in_c_ || x.h != in_h_ || x.w != in_w_)
    throw std::invalid_argument("perceptual extractor: unexpected image shape");
  const std::size_t hw = static_cast<std::size_t>(in_h_) * in_w_;
  w.x3.resize(3 * hw);
  if (in_c_ == 3) {
    std::copy(x.data.begin(), x.data.end(), w.x3.begin());
  } else {
    for (int r = 0; r < 3; ++r)
      std::copy(x.data.begin(), x.data.end(), w.x3.begin() + r * hw);
  }
  w.s1 = ConvShape{3, in_h_, in_w_, cfg_.c1, 3, 1};
  w.s2 = ConvShape{cfg_.c1, in_h_ / 2, in_w_ / 2, cfg_.c2, 3, 1};
  w.col1.resize(w.s1.col_size());
  w.f1.resize(w.s1.out_size());
  w.p1.resize(w.s2.in_size());
  w.col2.resize(w.s2.col_size());
  w.f2.resize(w.s2.out_size());

  nn::im2colT(w.x3.data(), w.s1, w.col1.data());
  nn::conv_forward(w.col1.data(), w1_.data(), b1_.data(), w.f1.data(), w.s1);
  k::relu(w.f1.data(), w.f1.size());
  nn::avgpool2_forward(w.f1.data(), w.p1.data(), cfg_.c1, in_h_, in_w_);
  nn::im2colT(w.p1.data(), w.s2, w.col2.data());
  nn::conv_forward(w.col2.data(), w2_.data(), b2_.data(), w.f2.data(), w.s2);
  k::relu(w.f2.data(), w.f2.size());
}

std::vector<std::vector<float>> PerceptualExtractor::features(const Image& x) const {
  Work w;
  run_forward(x, w);
  std::vector<std::vector<float>> out;
  for (int l : cfg_.layers) out.push_back(l == 1 ? w.f1 : w.f2);
  return out;
}

double PerceptualExtractor::sq_feature_distance(const Image& a, const Image& b,
                                                Image* da) const {
  Work wa, wb;
  run_forward(a, wa);
  run_forward(b, wb);

  const bool use1 = std::find(cfg_.layers.begin(), cfg_.layers.end(), 1) != cfg_.layers.end();
  const bool use2 = std::find(cfg_.layers.begin(), cfg_.layers.end(), 2) != cfg_.layers.end();

  std::vector<float> d1(wa.f1.size(), 0.0f), d2(wa.f2.size(), 0.0f);
  double loss = 0.0;
  if (use1) {
    k::vsub(wa.f1.data(), wb.f1.data(), d1.data(), d1.size());
    loss += k::sumsq_acc64(d1.data(), d1.size());
  }
  if (use2) {
    k::vsub(wa.f2.data(), wb.f2.data(), d2.data(), d2.size());
    loss += k::sumsq_acc64(d2.data(), d2.size());
  }
  if (!da) return loss;

  // Backpropagate 2*(phi_l(a) - phi_l(b)) through the extractor to a.
  std::vector<float> df2(wa.f2.size(), 0.0f), df1(wa.f1.size(), 0.0f);
  if (use2) {
    df2 = d2;
    k::scale(2.0f, df2.data(), df2.size());
    k::relu_backward(wa.f2.data(), df2.data(), df2.size());
  }
  std::vector<float> dp1(wa.p1.size(), 0.0f);
  if (use2) {
    std::vector<float> dcol(wa.s2.col_size());
    // weights are fixed; only the input gradient is needed
    nn::conv_backward_input(w2_.data(), df2.data(), wa.s2, dcol.data(), dp1.data());
  }
  std::vector<float> dup(wa.f1.size(), 0.0f);
  nn::avgpool2_backward(dp1.data(), dup.data(), cfg_.c1, in_h_, in_w_);
  if (use1) {
    df1 = d1;
    k::scale(2.0f, df1.data(), df1.size());
  }
  k::vadd(df1.data(), dup.data(), df1.data(), df1.size());
  k::relu_backward(wa.f1.data(), df1.data(), df1.size());
  std::vector<float> dcol1(wa.s1.col_size());
  std::vector<float> dx3(wa.x3.size(), 0.0f);
  nn::conv_backward_input(w1_.data(), df1.data(), wa.s1, dcol1.data(), dx3.data());

  *da = Image(in_c_, in_h_, in_w_);
  const std::size_t hw = static_cast<std::size_t>(in_h_) * in_w_;
  if (in_c_ == 3) {
    std::copy(dx3.begin(), dx3.end(), da->data.begin());
  } else {
    // replicated channels collapse by summation
    for (std::size_t i = 0; i < hw; ++i)
      da->data[i] = dx3[i] + dx3[hw + i] + dx3[2 * hw + i];
  }
  return loss;
}

double PerceptualExtractor::lpips(const Image& a, const Image& b) const {
  if (!a.same_shape(b)) throw std::invalid_argument("lpips: shape mismatch");
  const double l = sq_feature_distance(a, b, nullptr);
  return l / static_cast<double>(cfg_.layers.size());
}

}  // namespace fulab::igf
