#include "fulab/fedsim/model.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "fulab/kern/kernels.hpp"
#include "fulab/nn/ops.hpp"

namespace fulab::fedsim {

namespace k = fulab::kern;
using nn::ConvShape;

void Model::check_input(const ParamVector& p, const Image& x) const {
  p.check_layout(layout_.id());
  if (x.c != spec_.in_c || x.h != spec_.in_h || x.w != spec_.in_w)
    throw std::invalid_argument("input shape does not match model spec");
}

ParamVector Model::init_params(std::uint64_t seed) const {
  ParamVector p(layout_.total(), layout_.id());
  Rng rng(seed);
  init_into(p.data(), rng);
  return p;
}

double Model::accuracy(const ParamVector& p, const LabeledDataset& ds) const {
  if (ds.size() == 0) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto lg = logits(p, ds.images[i]);
    int best = 0;
    for (int c = 1; c < spec_.classes; ++c)
      if (lg[c] > lg[best]) best = c;
    if (best == ds.labels[i]) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(ds.size());
}

namespace {

void he_init(float* w, std::size_t n, std::size_t fan_in, Rng& rng) {
  const double std = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (std::size_t i = 0; i < n; ++i)
    w[i] = static_cast<float>(rng.normal() * std);
}

void head_init(float* w, std::size_t n, std::size_t fan_in, Rng& rng) {
  const double std = std::sqrt(1.0 / static_cast<double>(fan_in));
  for (std::size_t i = 0; i < n; ++i)
    w[i] = static_cast<float>(rng.normal() * std);
}

class MlpModel final : public Model {
 public:
  MlpModel(int in_c, int in_h, int in_w, int classes, int hidden) : hidden_(hidden) {
    spec_.arch = "mlp";
    spec_.in_c = in_c;
    spec_.in_h = in_h;
    spec_.in_w = in_w;
    spec_.classes = classes;
    in_ = in_c * in_h * in_w;
    spec_.spec_id = "mlp(h=" + std::to_string(hidden) + ")[" + std::to_string(in_c) +
                    "x" + std::to_string(in_h) + "x" + std::to_string(in_w) + "->" +
                    std::to_string(classes) + "]";
    layout_ = ParamLayout(spec_.spec_id);
    if (hidden_ > 0) {
      layout_.add("fc1.w", {hidden, in_});
      layout_.add("fc1.b", {hidden});
      layout_.add("fc2.w", {classes, hidden});
      layout_.add("fc2.b", {classes});
    } else {
      layout_.add("fc.w", {classes, in_});
      layout_.add("fc.b", {classes});
    }
    spec_.d = layout_.total();
  }

  std::vector<float> logits(const ParamVector& p, const Image& x) const override {
    check_input(p, x);
    std::vector<float> out(spec_.classes);
    if (hidden_ > 0) {
      std::vector<float> h(hidden_);
      forward_hidden(p, x, h.data());
      const float* pd = p.data();
      nn::dense_forward(h.data(), pd + layout_.entry("fc2.w").offset,
                        pd + layout_.entry("fc2.b").offset, out.data(), hidden_,
                        spec_.classes);
    } else {
      const float* pd = p.data();
      nn::dense_forward(x.data.data(), pd + layout_.entry("fc.w").offset,
                        pd + layout_.entry("fc.b").offset, out.data(), in_,
                        spec_.classes);
    }
    return out;
  }

  double loss_grad(const ParamVector& p, const Image& x, int y,
                   float* g) const override {
    check_input(p, x);
    const float* pd = p.data();
    std::vector<float> dlogits(spec_.classes);
    if (hidden_ == 0) {
      std::vector<float> lg(spec_.classes);
      nn::dense_forward(x.data.data(), pd + layout_.entry("fc.w").offset,
                        pd + layout_.entry("fc.b").offset, lg.data(), in_,
                        spec_.classes);
      const double loss = nn::softmax_xent(lg.data(), spec_.classes, y,
                                           g ? dlogits.data() : nullptr, nullptr);
      if (g)
        nn::dense_backward(x.data.data(), pd + layout_.entry("fc.w").offset,
                           dlogits.data(), g + layout_.entry("fc.w").offset,
                           g + layout_.entry("fc.b").offset, nullptr, in_,
                           spec_.classes);
      return loss;
    }
    std::vector<float> h(hidden_), lg(spec_.classes);
    forward_hidden(p, x, h.data());
    nn::dense_forward(h.data(), pd + layout_.entry("fc2.w").offset,
                      pd + layout_.entry("fc2.b").offset, lg.data(), hidden_,
                      spec_.classes);
    const double loss = nn::softmax_xent(lg.data(), spec_.classes, y,
                                         g ? dlogits.data() : nullptr, nullptr);
    if (g) {
      std::vector<float> dh(hidden_);
      nn::dense_backward(h.data(), pd + layout_.entry("fc2.w").offset,
                         dlogits.data(), g + layout_.entry("fc2.w").offset,
                         g + layout_.entry("fc2.b").offset, dh.data(), hidden_,
                         spec_.classes);
      k::relu_backward(h.data(), dh.data(), h.size());
      nn::dense_backward(x.data.data(), pd + layout_.entry("fc1.w").offset,
                         dh.data(), g + layout_.entry("fc1.w").offset,
                         g + layout_.entry("fc1.b").offset, nullptr, in_, hidden_);
    }
    return loss;
  }

 private:
  void forward_hidden(const ParamVector& p, const Image& x, float* h) const {
    const float* pd = p.data();
    nn::dense_forward(x.data.data(), pd + layout_.entry("fc1.w").offset,
                      pd + layout_.entry("fc1.b").offset, h, in_, hidden_);
    k::relu(h, static_cast<std::size_t>(hidden_));
  }

  void init_into(float* pd, Rng& rng) const override {
    if (hidden_ > 0) {
      he_init(pd + layout_.entry("fc1.w").offset, layout_.entry("fc1.w").size, in_, rng);
      head_init(pd + layout_.entry("fc2.w").offset, layout_.entry("fc2.w").size, hidden_, rng);
    } else {
      head_init(pd + layout_.entry("fc.w").offset, layout_.entry("fc.w").size, in_, rng);
    }
  }

  int in_, hidden_;
};

// conv3x3 -> relu -> pool2 -> conv3x3 -> relu -> pool2 -> dense
class ConvNetModel final : public Model {
 public:
  ConvNetModel(int in_c, int in_h, int in_w, int classes, int c1, int c2)
      : c1_(c1), c2_(c2) {
    if (in_h % 4 != 0 || in_w % 4 != 0)
      throw std::invalid_argument("convnet needs input extents divisible by 4");
    spec_.arch = "convnet";
    spec_.in_c = in_c;
    spec_.in_h = in_h;
    spec_.in_w = in_w;
    spec_.classes = classes;
    spec_.spec_id = "convnet(c1=" + std::to_string(c1) + ",c2=" + std::to_string(c2) +
                    ")[" + std::to_string(in_c) + "x" + std::to_string(in_h) + "x" +
                    std::to_string(in_w) + "->" + std::to_string(classes) + "]";
    s1_ = ConvShape{in_c, in_h, in_w, c1, 3, 1};
    s2_ = ConvShape{c1, in_h / 2, in_w / 2, c2, 3, 1};
    fc_in_ = c2 * (in_h / 4) * (in_w / 4);
    layout_ = ParamLayout(spec_.spec_id);
    layout_.add("conv1.w", {c1, in_c, 3, 3});
    layout_.add("conv1.b", {c1});
    layout_.add("conv2.w", {c2, c1, 3, 3});
    layout_.add("conv2.b", {c2});
    layout_.add("fc.w", {classes, fc_in_});
    layout_.add("fc.b", {classes});
    spec_.d = layout_.total();
  }

  std::vector<float> logits(const ParamVector& p, const Image& x) const override {
    check_input(p, x);
    Scratch ws(*this);
    forward(p.data(), x, ws);
    return std::vector<float>(ws.lg.begin(), ws.lg.end());
  }

  double loss_grad(const ParamVector& p, const Image& x, int y,
                   float* g) const override {
    check_input(p, x);
    Scratch ws(*this);
    const float* pd = p.data();
    forward(pd, x, ws);
    std::vector<float> dlg(spec_.classes);
    const double loss = nn::softmax_xent(ws.lg.data(), spec_.classes, y,
                                         g ? dlg.data() : nullptr, nullptr);
    if (!g) return loss;

    std::vector<float> dflat(fc_in_);
    nn::dense_backward(ws.p2.data(), pd + layout_.entry("fc.w").offset, dlg.data(),
                       g + layout_.entry("fc.w").offset,
                       g + layout_.entry("fc.b").offset, dflat.data(), fc_in_,
                       spec_.classes);
    std::vector<float> da2(s2_.out_size());
    nn::avgpool2_backward(dflat.data(), da2.data(), c2_, s2_.out_h(), s2_.out_w());
    k::relu_backward(ws.a2.data(), da2.data(), da2.size());
    nn::conv_backward_params(ws.col2.data(), da2.data(),
                             g + layout_.entry("conv2.w").offset,
                             g + layout_.entry("conv2.b").offset, s2_);
    std::vector<float> dp1(s2_.in_size(), 0.0f);
    std::vector<float> dcol2(s2_.col_size());
    nn::conv_backward_input(pd + layout_.entry("conv2.w").offset, da2.data(), s2_,
                            dcol2.data(), dp1.data());
    std::vector<float> da1(s1_.out_size());
    nn::avgpool2_backward(dp1.data(), da1.data(), c1_, s1_.out_h(), s1_.out_w());
    k::relu_backward(ws.a1.data(), da1.data(), da1.size());
    nn::conv_backward_params(ws.col1.data(), da1.data(),
                             g + layout_.entry("conv1.w").offset,
                             g + layout_.entry("conv1.b").offset, s1_);
    return loss;
  }

 private:
  struct Scratch {
    std::vector<float> col1, a1, p1, col2, a2, p2, lg;
    explicit Scratch(const ConvNetModel& m)
        : col1(m.s1_.col_size()),
          a1(m.s1_.out_size()),
          p1(m.s2_.in_size()),
          col2(m.s2_.col_size()),
          a2(m.s2_.out_size()),
          p2(m.fc_in_),
          lg(m.spec_.classes) {}
  };

  void forward(const float* pd, const Image& x, Scratch& ws) const {
    nn::im2colT(x.data.data(), s1_, ws.col1.data());
    nn::conv_forward(ws.col1.data(), pd + layout_.entry("conv1.w").offset,
                     pd + layout_.entry("conv1.b").offset, ws.a1.data(), s1_);
    k::relu(ws.a1.data(), ws.a1.size());
    nn::avgpool2_forward(ws.a1.data(), ws.p1.data(), c1_, s1_.out_h(), s1_.out_w());
    nn::im2colT(ws.p1.data(), s2_, ws.col2.data());
    nn::conv_forward(ws.col2.data(), pd + layout_.entry("conv2.w").offset,
                     pd + layout_.entry("conv2.b").offset, ws.a2.data(), s2_);
    k::relu(ws.a2.data(), ws.a2.size());
    nn::avgpool2_forward(ws.a2.data(), ws.p2.data(), c2_, s2_.out_h(), s2_.out_w());
    nn::dense_forward(ws.p2.data(), pd + layout_.entry("fc.w").offset,
                      pd + layout_.entry("fc.b").offset, ws.lg.data(), fc_in_,
                      spec_.classes);
  }

  void init_into(float* pd, Rng& rng) const override {
    he_init(pd + layout_.entry("conv1.w").offset, layout_.entry("conv1.w").size,
            static_cast<std::size_t>(s1_.patch()), rng);
    he_init(pd + layout_.entry("conv2.w").offset, layout_.entry("conv2.w").size,
            static_cast<std::size_t>(s2_.patch()), rng);
    head_init(pd + layout_.entry("fc.w").offset, layout_.entry("fc.w").size, fc_in_, rng);
  }

  int c1_, c2_, fc_in_;
  ConvShape s1_, s2_;
};

// Reduced residual net: stem, one identity block, pooled transition to a
// wider stage, one identity block, global average pool, classifier.
class ResNetSmallModel final : public Model {
 public:
  ResNetSmallModel(int in_c, int in_h, int in_w, int classes, int r1, int r2)
      : r1_(r1), r2_(r2) {
    if (in_h % 2 != 0 || in_w % 2 != 0)
      throw std::invalid_argument("resnet-small needs even input extents");
    spec_.arch = "resnet-small";
    spec_.in_c = in_c;
    spec_.in_h = in_h;
    spec_.in_w = in_w;
    spec_.classes = classes;
    spec_.spec_id = "resnet-small(r1=" + std::to_string(r1) + ",r2=" + std::to_string(r2) +
                    ")[" + std::to_string(in_c) + "x" + std::to_string(in_h) + "x" +
                    std::to_string(in_w) + "->" + std::to_string(classes) + "]";
    stem_ = ConvShape{in_c, in_h, in_w, r1, 3, 1};
    b1_ = ConvShape{r1, in_h, in_w, r1, 3, 1};
    trans_ = ConvShape{r1, in_h / 2, in_w / 2, r2, 3, 1};
    b2_ = ConvShape{r2, in_h / 2, in_w / 2, r2, 3, 1};
    layout_ = ParamLayout(spec_.spec_id);
    layout_.add("stem.w", {r1, in_c, 3, 3});
    layout_.add("stem.b", {r1});
    layout_.add("b1c1.w", {r1, r1, 3, 3});
    layout_.add("b1c1.b", {r1});
    layout_.add("b1c2.w", {r1, r1, 3, 3});
    layout_.add("b1c2.b", {r1});
    layout_.add("trans.w", {r2, r1, 3, 3});
    layout_.add("trans.b", {r2});
    layout_.add("b2c1.w", {r2, r2, 3, 3});
    layout_.add("b2c1.b", {r2});
    layout_.add("b2c2.w", {r2, r2, 3, 3});
    layout_.add("b2c2.b", {r2});
    layout_.add("fc.w", {classes, r2});
    layout_.add("fc.b", {classes});
    spec_.d = layout_.total();
  }

  std::vector<float> logits(const ParamVector& p, const Image& x) const override {
    check_input(p, x);
    Scratch ws(*this);
    forward(p.data(), x, ws);
    return std::vector<float>(ws.lg.begin(), ws.lg.end());
  }

  double loss_grad(const ParamVector& p, const Image& x, int y,
                   float* g) const override {
    check_input(p, x);
    Scratch ws(*this);
    const float* pd = p.data();
    forward(pd, x, ws);
    std::vector<float> dlg(spec_.classes);
    const double loss = nn::softmax_xent(ws.lg.data(), spec_.classes, y,
                                         g ? dlg.data() : nullptr, nullptr);
    if (!g) return loss;

    std::vector<float> dgap(r2_);
    nn::dense_backward(ws.gap.data(), pd + layout_.entry("fc.w").offset, dlg.data(),
                       g + layout_.entry("fc.w").offset,
                       g + layout_.entry("fc.b").offset, dgap.data(), r2_,
                       spec_.classes);
    std::vector<float> dout2(b2_.out_size());
    nn::gap_backward(dgap.data(), dout2.data(), r2_, b2_.in_h, b2_.in_w);
    // block 2 (skip around two convs, relu after the sum)
    k::relu_backward(ws.o2.data(), dout2.data(), dout2.size());
    std::vector<float> dskip2 = dout2;
    std::vector<float> dt_total(b2_.out_size());
    {
      nn::conv_backward_params(ws.colb2b.data(), dout2.data(),
                               g + layout_.entry("b2c2.w").offset,
                               g + layout_.entry("b2c2.b").offset, b2_);
      std::vector<float> dcol(b2_.col_size());
      std::vector<float> din(b2_.in_size(), 0.0f);
      nn::conv_backward_input(pd + layout_.entry("b2c2.w").offset, dout2.data(), b2_,
                              dcol.data(), din.data());
      k::relu_backward(ws.b2a.data(), din.data(), din.size());
      nn::conv_backward_params(ws.colb2a.data(), din.data(),
                               g + layout_.entry("b2c1.w").offset,
                               g + layout_.entry("b2c1.b").offset, b2_);
      std::vector<float> din2(b2_.in_size(), 0.0f);
      nn::conv_backward_input(pd + layout_.entry("b2c1.w").offset, din.data(), b2_,
                              dcol.data(), din2.data());
      k::vadd(din2.data(), dskip2.data(), dt_total.data(), dt_total.size());
    }
    // transition conv + relu on pooled stage-1 output
    k::relu_backward(ws.t.data(), dt_total.data(), dt_total.size());
    nn::conv_backward_params(ws.colt.data(), dt_total.data(),
                             g + layout_.entry("trans.w").offset,
                             g + layout_.entry("trans.b").offset, trans_);
    std::vector<float> dpool(trans_.in_size(), 0.0f);
    {
      std::vector<float> dcol(trans_.col_size());
      nn::conv_backward_input(pd + layout_.entry("trans.w").offset, dt_total.data(),
                              trans_, dcol.data(), dpool.data());
    }
    std::vector<float> dout1(b1_.out_size());
    nn::avgpool2_backward(dpool.data(), dout1.data(), r1_, b1_.in_h, b1_.in_w);
    // block 1
    k::relu_backward(ws.o1.data(), dout1.data(), dout1.size());
    std::vector<float> dskip1 = dout1;
    std::vector<float> dstem(b1_.in_size(), 0.0f);
    {
      nn::conv_backward_params(ws.colb1b.data(), dout1.data(),
                               g + layout_.entry("b1c2.w").offset,
                               g + layout_.entry("b1c2.b").offset, b1_);
      std::vector<float> dcol(b1_.col_size());
      std::vector<float> din(b1_.in_size(), 0.0f);
      nn::conv_backward_input(pd + layout_.entry("b1c2.w").offset, dout1.data(), b1_,
                              dcol.data(), din.data());
      k::relu_backward(ws.b1a.data(), din.data(), din.size());
      nn::conv_backward_params(ws.colb1a.data(), din.data(),
                               g + layout_.entry("b1c1.w").offset,
                               g + layout_.entry("b1c1.b").offset, b1_);
      nn::conv_backward_input(pd + layout_.entry("b1c1.w").offset, din.data(), b1_,
                              dcol.data(), dstem.data());
      k::vadd(dstem.data(), dskip1.data(), dstem.data(), dstem.size());
    }
    k::relu_backward(ws.s.data(), dstem.data(), dstem.size());
    nn::conv_backward_params(ws.cols.data(), dstem.data(),
                             g + layout_.entry("stem.w").offset,
                             g + layout_.entry("stem.b").offset, stem_);
    return loss;
  }

 private:
  struct Scratch {
    std::vector<float> cols, s, colb1a, b1a, colb1b, o1, pool, colt, t, colb2a,
        b2a, colb2b, o2, gap, lg;
    explicit Scratch(const ResNetSmallModel& m)
        : cols(m.stem_.col_size()),
          s(m.stem_.out_size()),
          colb1a(m.b1_.col_size()),
          b1a(m.b1_.out_size()),
          colb1b(m.b1_.col_size()),
          o1(m.b1_.out_size()),
          pool(m.trans_.in_size()),
          colt(m.trans_.col_size()),
          t(m.trans_.out_size()),
          colb2a(m.b2_.col_size()),
          b2a(m.b2_.out_size()),
          colb2b(m.b2_.col_size()),
          o2(m.b2_.out_size()),
          gap(m.r2_),
          lg(m.spec_.classes) {}
  };

  void forward(const float* pd, const Image& x, Scratch& ws) const {
    nn::im2colT(x.data.data(), stem_, ws.cols.data());
    nn::conv_forward(ws.cols.data(), pd + layout_.entry("stem.w").offset,
                     pd + layout_.entry("stem.b").offset, ws.s.data(), stem_);
    k::relu(ws.s.data(), ws.s.size());
    // block 1: o1 = relu(conv2(relu(conv1(s))) + s)
    nn::im2colT(ws.s.data(), b1_, ws.colb1a.data());
    nn::conv_forward(ws.colb1a.data(), pd + layout_.entry("b1c1.w").offset,
                     pd + layout_.entry("b1c1.b").offset, ws.b1a.data(), b1_);
    k::relu(ws.b1a.data(), ws.b1a.size());
    nn::im2colT(ws.b1a.data(), b1_, ws.colb1b.data());
    nn::conv_forward(ws.colb1b.data(), pd + layout_.entry("b1c2.w").offset,
                     pd + layout_.entry("b1c2.b").offset, ws.o1.data(), b1_);
    k::vadd(ws.o1.data(), ws.s.data(), ws.o1.data(), ws.o1.size());
    k::relu(ws.o1.data(), ws.o1.size());
    nn::avgpool2_forward(ws.o1.data(), ws.pool.data(), r1_, b1_.in_h, b1_.in_w);
    nn::im2colT(ws.pool.data(), trans_, ws.colt.data());
    nn::conv_forward(ws.colt.data(), pd + layout_.entry("trans.w").offset,
                     pd + layout_.entry("trans.b").offset, ws.t.data(), trans_);
    k::relu(ws.t.data(), ws.t.size());
    // block 2
    nn::im2colT(ws.t.data(), b2_, ws.colb2a.data());
    nn::conv_forward(ws.colb2a.data(), pd + layout_.entry("b2c1.w").offset,
                     pd + layout_.entry("b2c1.b").offset, ws.b2a.data(), b2_);
    k::relu(ws.b2a.data(), ws.b2a.size());
    nn::im2colT(ws.b2a.data(), b2_, ws.colb2b.data());
    nn::conv_forward(ws.colb2b.data(), pd + layout_.entry("b2c2.w").offset,
                     pd + layout_.entry("b2c2.b").offset, ws.o2.data(), b2_);
    k::vadd(ws.o2.data(), ws.t.data(), ws.o2.data(), ws.o2.size());
    k::relu(ws.o2.data(), ws.o2.size());
    nn::gap_forward(ws.o2.data(), ws.gap.data(), r2_, b2_.in_h, b2_.in_w);
    nn::dense_forward(ws.gap.data(), pd + layout_.entry("fc.w").offset,
                      pd + layout_.entry("fc.b").offset, ws.lg.data(), r2_,
                      spec_.classes);
  }

  void init_into(float* pd, Rng& rng) const override {
    for (const char* name : {"stem.w", "b1c1.w", "b1c2.w", "trans.w", "b2c1.w", "b2c2.w"}) {
      const auto& e = layout_.entry(name);
      const std::size_t fan_in = e.size / static_cast<std::size_t>(e.shape[0]);
      he_init(pd + e.offset, e.size, fan_in, rng);
    }
    head_init(pd + layout_.entry("fc.w").offset, layout_.entry("fc.w").size, r2_, rng);
  }

  int r1_, r2_;
  ConvShape stem_, b1_, trans_, b2_;
};

}  // namespace

std::unique_ptr<Model> make_model(const std::string& arch, int in_c, int in_h,
                                  int in_w, int classes, const ModelOptions& opt) {
  if (classes < 2) throw std::invalid_argument("need at least two classes");
  if (arch == "mlp")
    return std::make_unique<MlpModel>(in_c, in_h, in_w, classes, opt.mlp_hidden);
  if (arch == "convnet")
    return std::make_unique<ConvNetModel>(in_c, in_h, in_w, classes, opt.conv_c1, opt.conv_c2);
  if (arch == "resnet-small")
    return std::make_unique<ResNetSmallModel>(in_c, in_h, in_w, classes, opt.res_c1, opt.res_c2);
  throw std::invalid_argument("unknown architecture: " + arch);
}

}  // namespace fulab::fedsim
