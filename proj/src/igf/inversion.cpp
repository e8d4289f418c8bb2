#include "fulab/igf/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
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
constexpr char kMagic[12] = "FULABINVM";
constexpr float kBnMomentum = 0.1f;
constexpr float kBnEps = 1e-5f;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

void InversionModelSpec::validate() const {
  if (input_dim < 1) throw std::invalid_argument("inversion: input dim must be >= 1");
  if (out_c < 1 || out_h < 1 || out_w < 1)
    throw std::invalid_argument("inversion: bad output shape");
  if (seed_channels < 1 || seed_hw < 1)
    throw std::invalid_argument("inversion: bad seed map shape");
  for (int w : stage_widths)
    if (w < 4 || w % 4 != 0)
      throw std::invalid_argument("inversion: stage widths must be multiples of 4");
  const int g = gen_hw();
  if (g < out_h || g < out_w)
    throw std::invalid_argument("inversion: upsampling stages do not reach the output size");
  if ((g - out_h) % 2 != 0 || (g - out_w) % 2 != 0)
    throw std::invalid_argument("inversion: center crop needs an even margin");
}

std::string InversionModelSpec::spec_id() const {
  std::string s = "inversion(k=" + std::to_string(input_dim) +
                  ",seed=" + std::to_string(seed_channels) + "x" +
                  std::to_string(seed_hw) + ",w=";
  for (std::size_t i = 0; i < stage_widths.size(); ++i)
    s += (i ? "-" : "") + std::to_string(stage_widths[i]);
  s += ")[->" + std::to_string(out_c) + "x" + std::to_string(out_h) + "x" +
       std::to_string(out_w) + "]";
  return s;
}

int InversionNet::stage_in_c(int s) const {
  return s == 0 ? spec_.seed_channels : spec_.stage_widths[s - 1] / 4;
}

int InversionNet::stage_hw(int s) const { return spec_.seed_hw << s; }

InversionNet::InversionNet(InversionModelSpec spec, std::uint64_t init_seed)
    : spec_(std::move(spec)) {
  spec_.validate();
  layout_ = ParamLayout(spec_.spec_id());
  const int S = spec_.seed_channels * spec_.seed_hw * spec_.seed_hw;
  layout_.add("fc.w", {S, spec_.input_dim});
  layout_.add("fc.b", {S});
  for (int s = 0; s < spec_.stages(); ++s) {
    const std::string p = "stage" + std::to_string(s);
    layout_.add(p + ".conv.w", {spec_.stage_widths[s], stage_in_c(s), 3, 3});
    layout_.add(p + ".conv.b", {spec_.stage_widths[s]});
    layout_.add(p + ".bn.g", {spec_.stage_widths[s]});
    layout_.add(p + ".bn.b", {spec_.stage_widths[s]});
  }
  const int last_c = spec_.stages() == 0 ? spec_.seed_channels
                                         : spec_.stage_widths.back() / 4;
  layout_.add("head.w", {spec_.out_c, last_c, 1, 1});
  layout_.add("head.b", {spec_.out_c});

  params_.assign(layout_.total(), 0.0f);
  std::size_t nbuf = 0;
  for (int w : spec_.stage_widths) nbuf += 2 * static_cast<std::size_t>(w);
  buffers_.assign(nbuf, 0.0f);
  std::size_t off = 0;
  for (int w : spec_.stage_widths) {
    off += w;  // running mean stays zero
    for (int i = 0; i < w; ++i) buffers_[off + i] = 1.0f;  // running var
    off += w;
  }

  Rng rng(init_seed);
  auto gauss_fill = [&](const char* name, double std) {
    const auto& e = layout_.entry(name);
    for (std::size_t i = 0; i < e.size; ++i)
      params_[e.offset + i] = static_cast<float>(rng.normal() * std);
  };
  gauss_fill("fc.w", std::sqrt(1.0 / spec_.input_dim));
  for (int s = 0; s < spec_.stages(); ++s) {
    const std::string p = "stage" + std::to_string(s);
    gauss_fill((p + ".conv.w").c_str(), std::sqrt(2.0 / (stage_in_c(s) * 9.0)));
    const auto& g = layout_.entry(p + ".bn.g");
    std::fill_n(params_.begin() + static_cast<long>(g.offset), g.size, 1.0f);
  }
  gauss_fill("head.w", std::sqrt(1.0 / last_c));
}

void InversionNet::forward_train(const float* z, std::size_t n, BatchCache& cache) {
  const int S = spec_.seed_channels * spec_.seed_hw * spec_.seed_hw;
  const float* pd = params_.data();
  cache.n = n;
  cache.z.assign(z, z + n * spec_.input_dim);
  cache.seed.resize(n * S);
  const int stages = spec_.stages();
  cache.conv_pre.assign(stages, {});
  cache.act.assign(stages, {});
  cache.ps.assign(stages, {});
  cache.bn_mean.assign(stages, {});
  cache.bn_invstd.assign(stages, {});

  for (std::size_t i = 0; i < n; ++i)
    nn::dense_forward(z + i * spec_.input_dim, pd + layout_.entry("fc.w").offset,
                      pd + layout_.entry("fc.b").offset, cache.seed.data() + i * S,
                      spec_.input_dim, S);

  const float* cur = cache.seed.data();
  std::size_t buf_off = 0;
  for (int s = 0; s < stages; ++s) {
    const int hw = stage_hw(s);
    const ConvShape cs{stage_in_c(s), hw, hw, spec_.stage_widths[s], 3, 1};
    const int P = cs.pixels();
    const std::string pref = "stage" + std::to_string(s);
    auto& pre = cache.conv_pre[s];
    pre.resize(n * cs.out_size());
    std::vector<float> colT(cs.col_size());
    for (std::size_t i = 0; i < n; ++i) {
      nn::im2colT(cur + i * cs.in_size(), cs, colT.data());
      nn::conv_forward(colT.data(), pd + layout_.entry(pref + ".conv.w").offset,
                       pd + layout_.entry(pref + ".conv.b").offset,
                       pre.data() + i * cs.out_size(), cs);
    }
    auto& act = cache.act[s];
    act.resize(pre.size());
    cache.bn_mean[s].resize(spec_.stage_widths[s]);
    cache.bn_invstd[s].resize(spec_.stage_widths[s]);
    nn::bn_forward_train(pre.data(), act.data(), static_cast<int>(n),
                         spec_.stage_widths[s], P,
                         pd + layout_.entry(pref + ".bn.g").offset,
                         pd + layout_.entry(pref + ".bn.b").offset,
                         cache.bn_mean[s].data(), cache.bn_invstd[s].data(),
                         buffers_.data() + buf_off,
                         buffers_.data() + buf_off + spec_.stage_widths[s],
                         kBnMomentum, kBnEps);
    buf_off += 2 * static_cast<std::size_t>(spec_.stage_widths[s]);
    k::relu(act.data(), act.size());
    auto& ps = cache.ps[s];
    ps.resize(act.size());
    for (std::size_t i = 0; i < n; ++i)
      nn::pixelshuffle2_forward(act.data() + i * cs.out_size(),
                                ps.data() + i * cs.out_size(),
                                spec_.stage_widths[s], hw, hw);
    cur = ps.data();
  }

  // 1x1 head then sigmoid over the full generated square
  const int g = spec_.gen_hw();
  const int last_c = stages == 0 ? spec_.seed_channels : spec_.stage_widths.back() / 4;
  const ConvShape hs{last_c, g, g, spec_.out_c, 1, 0};
  cache.sig.resize(n * hs.out_size());
  std::vector<float> colT(hs.col_size());
  for (std::size_t i = 0; i < n; ++i) {
    nn::im2colT(cur + i * hs.in_size(), hs, colT.data());
    nn::conv_forward(colT.data(), pd + layout_.entry("head.w").offset,
                     pd + layout_.entry("head.b").offset,
                     cache.sig.data() + i * hs.out_size(), hs);
  }
  nn::sigmoid(cache.sig.data(), cache.sig.size());

  // center crop
  cache.out.assign(n, Image(spec_.out_c, spec_.out_h, spec_.out_w));
  const int oy = (g - spec_.out_h) / 2, ox = (g - spec_.out_w) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const float* src = cache.sig.data() + i * hs.out_size();
    Image& im = cache.out[i];
    for (int c = 0; c < spec_.out_c; ++c)
      for (int y = 0; y < spec_.out_h; ++y)
        for (int x = 0; x < spec_.out_w; ++x)
          im.at(c, y, x) = src[(static_cast<std::size_t>(c) * g + oy + y) * g + ox + x];
  }
}

void InversionNet::forward_eval(const float* z, std::size_t n,
                                std::vector<Image>& out) const {
  const int S = spec_.seed_channels * spec_.seed_hw * spec_.seed_hw;
  const float* pd = params_.data();
  const int stages = spec_.stages();
  out.assign(n, Image(spec_.out_c, spec_.out_h, spec_.out_w));

  std::vector<float> cur(S), next;
  for (std::size_t i = 0; i < n; ++i) {
    cur.resize(S);
    nn::dense_forward(z + i * spec_.input_dim, pd + layout_.entry("fc.w").offset,
                      pd + layout_.entry("fc.b").offset, cur.data(),
                      spec_.input_dim, S);
    std::size_t buf_off = 0;
    for (int s = 0; s < stages; ++s) {
      const int hw = stage_hw(s);
      const ConvShape cs{stage_in_c(s), hw, hw, spec_.stage_widths[s], 3, 1};
      const std::string pref = "stage" + std::to_string(s);
      std::vector<float> colT(cs.col_size());
      std::vector<float> pre(cs.out_size());
      nn::im2colT(cur.data(), cs, colT.data());
      nn::conv_forward(colT.data(), pd + layout_.entry(pref + ".conv.w").offset,
                       pd + layout_.entry(pref + ".conv.b").offset, pre.data(), cs);
      std::vector<float> act(pre.size());
      nn::bn_forward_eval(pre.data(), act.data(), 1, spec_.stage_widths[s],
                          cs.pixels(), pd + layout_.entry(pref + ".bn.g").offset,
                          pd + layout_.entry(pref + ".bn.b").offset,
                          buffers_.data() + buf_off,
                          buffers_.data() + buf_off + spec_.stage_widths[s], kBnEps);
      buf_off += 2 * static_cast<std::size_t>(spec_.stage_widths[s]);
      k::relu(act.data(), act.size());
      next.resize(act.size());
      nn::pixelshuffle2_forward(act.data(), next.data(), spec_.stage_widths[s], hw, hw);
      cur.swap(next);
    }
    const int g = spec_.gen_hw();
    const int last_c = stages == 0 ? spec_.seed_channels : spec_.stage_widths.back() / 4;
    const ConvShape hs{last_c, g, g, spec_.out_c, 1, 0};
    std::vector<float> colT(hs.col_size());
    std::vector<float> head(hs.out_size());
    nn::im2colT(cur.data(), hs, colT.data());
    nn::conv_forward(colT.data(), pd + layout_.entry("head.w").offset,
                     pd + layout_.entry("head.b").offset, head.data(), hs);
    nn::sigmoid(head.data(), head.size());
    Image& im = out[i];
    const int oy = (g - spec_.out_h) / 2, ox = (g - spec_.out_w) / 2;
    for (int c = 0; c < spec_.out_c; ++c)
      for (int y = 0; y < spec_.out_h; ++y)
        for (int x = 0; x < spec_.out_w; ++x)
          im.at(c, y, x) = head[(static_cast<std::size_t>(c) * g + oy + y) * g + ox + x];
  }
}

void InversionNet::backward(const BatchCache& cache, const float* dimg,
                            float* grad) const {
  const std::size_t n = cache.n;
  const float* pd = params_.data();
  const int stages = spec_.stages();
  const int g = spec_.gen_hw();
  const int last_c = stages == 0 ? spec_.seed_channels : spec_.stage_widths.back() / 4;
  const ConvShape hs{last_c, g, g, spec_.out_c, 1, 0};

  // un-crop into the generated square, then undo the sigmoid
  std::vector<float> dsig(n * hs.out_size(), 0.0f);
  const int oy = (g - spec_.out_h) / 2, ox = (g - spec_.out_w) / 2;
  const std::size_t img_sz =
      static_cast<std::size_t>(spec_.out_c) * spec_.out_h * spec_.out_w;
  for (std::size_t i = 0; i < n; ++i) {
    const float* src = dimg + i * img_sz;
    float* dst = dsig.data() + i * hs.out_size();
    for (int c = 0; c < spec_.out_c; ++c)
      for (int y = 0; y < spec_.out_h; ++y)
        for (int x = 0; x < spec_.out_w; ++x)
          dst[(static_cast<std::size_t>(c) * g + oy + y) * g + ox + x] =
              src[(static_cast<std::size_t>(c) * spec_.out_h + y) * spec_.out_w + x];
  }
  nn::sigmoid_backward(cache.sig.data(), dsig.data(), dsig.size());

  // head conv
  const float* head_in = stages == 0 ? cache.seed.data() : cache.ps.back().data();
  std::vector<float> dcur(n * hs.in_size(), 0.0f);
  {
    std::vector<float> colT(hs.col_size()), dcolT(hs.col_size());
    for (std::size_t i = 0; i < n; ++i) {
      nn::im2colT(head_in + i * hs.in_size(), hs, colT.data());
      nn::conv_backward_params(colT.data(), dsig.data() + i * hs.out_size(),
                               grad + layout_.entry("head.w").offset,
                               grad + layout_.entry("head.b").offset, hs);
      nn::conv_backward_input(pd + layout_.entry("head.w").offset,
                              dsig.data() + i * hs.out_size(), hs, dcolT.data(),
                              dcur.data() + i * hs.in_size());
    }
  }

  for (int s = stages - 1; s >= 0; --s) {
    const int hw = stage_hw(s);
    const ConvShape cs{stage_in_c(s), hw, hw, spec_.stage_widths[s], 3, 1};
    const std::string pref = "stage" + std::to_string(s);
    // depth-to-space backward
    std::vector<float> dact(n * cs.out_size());
    for (std::size_t i = 0; i < n; ++i)
      nn::pixelshuffle2_backward(dcur.data() + i * cs.out_size(),
                                 dact.data() + i * cs.out_size(),
                                 spec_.stage_widths[s], hw, hw);
    k::relu_backward(cache.act[s].data(), dact.data(), dact.size());
    std::vector<float> dpre(dact.size());
    nn::bn_backward(cache.conv_pre[s].data(), dact.data(), static_cast<int>(n),
                    spec_.stage_widths[s], cs.pixels(),
                    pd + layout_.entry(pref + ".bn.g").offset,
                    cache.bn_mean[s].data(), cache.bn_invstd[s].data(),
                    grad + layout_.entry(pref + ".bn.g").offset,
                    grad + layout_.entry(pref + ".bn.b").offset, dpre.data());
    const float* stage_in = s == 0 ? cache.seed.data() : cache.ps[s - 1].data();
    std::vector<float> dnext(n * cs.in_size(), 0.0f);
    std::vector<float> colT(cs.col_size()), dcolT(cs.col_size());
    for (std::size_t i = 0; i < n; ++i) {
      nn::im2colT(stage_in + i * cs.in_size(), cs, colT.data());
      nn::conv_backward_params(colT.data(), dpre.data() + i * cs.out_size(),
                               grad + layout_.entry(pref + ".conv.w").offset,
                               grad + layout_.entry(pref + ".conv.b").offset, cs);
      nn::conv_backward_input(pd + layout_.entry(pref + ".conv.w").offset,
                              dpre.data() + i * cs.out_size(), cs, dcolT.data(),
                              dnext.data() + i * cs.in_size());
    }
    dcur.swap(dnext);
  }

  const int S = spec_.seed_channels * spec_.seed_hw * spec_.seed_hw;
  for (std::size_t i = 0; i < n; ++i)
    nn::dense_backward(cache.z.data() + i * spec_.input_dim,
                       pd + layout_.entry("fc.w").offset,
                       dcur.data() + i * S, grad + layout_.entry("fc.w").offset,
                       grad + layout_.entry("fc.b").offset, nullptr,
                       spec_.input_dim, S);
}

namespace {

struct Adam {
  std::vector<float> m, v;
  long t = 0;
  double lr, b1 = 0.9, b2 = 0.999, eps = 1e-8;

  Adam(std::size_t n, double lr_) : m(n, 0.0f), v(n, 0.0f), lr(lr_) {}

  void step(float* p, const float* g, std::size_t n) {
    ++t;
    const double bc1 = 1.0 - std::pow(b1, t);
    const double bc2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = static_cast<float>(b1 * m[i] + (1.0 - b1) * g[i]);
      v[i] = static_cast<float>(b2 * v[i] + (1.0 - b2) * g[i] * g[i]);
      const double mh = m[i] / bc1, vh = v[i] / bc2;
      p[i] -= static_cast<float>(lr * mh / (std::sqrt(vh) + eps));
    }
  }
};

}  // namespace

TrainOutcome train_inversion(InversionNet& net, const std::vector<float>& z_rows,
                             const std::vector<Image>& targets,
                             const InversionTrainConfig& cfg,
                             const PerceptualExtractor* phi) {
  const std::size_t m = targets.size();
  const std::size_t kdim = static_cast<std::size_t>(net.spec().input_dim);
  if (m == 0 || z_rows.size() != m * kdim)
    throw std::invalid_argument("train_inversion: rows and images misaligned");
  if (cfg.batch < 1 || cfg.epochs < 0)
    throw std::invalid_argument("train_inversion: bad batch/epochs");
  const double beta = net.spec().beta;
  if (beta < 0.0) throw std::invalid_argument("train_inversion: beta must be >= 0");
  if (beta > 0.0 && !phi)
    throw std::invalid_argument("train_inversion: beta > 0 needs an extractor");

  TrainOutcome out;
  Rng root(cfg.seed);
  Adam opt(net.param_count(), cfg.lr);
  const std::size_t img_sz = targets.front().size();

  // last good checkpoint for the non-finite-loss rollback
  auto snap_params = net.params_;
  auto snap_buffers = net.buffers_;
  auto snap_m = opt.m;
  auto snap_v = opt.v;
  long snap_t = opt.t;

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;

  std::vector<float> zbatch, dimg, grad(net.param_count());
  InversionNet::BatchCache cache;

  for (int e = 0; e < cfg.epochs; ++e) {
    Rng ep = root.fork(static_cast<std::uint64_t>(e) + 1);
    ep.shuffle(order);
    double sum_pix = 0.0, sum_per = 0.0;
    bool bad = false;
    for (std::size_t start = 0; start < m && !bad; start += cfg.batch) {
      const std::size_t stop = std::min(m, start + cfg.batch);
      const std::size_t n = stop - start;
      zbatch.resize(n * kdim);
      for (std::size_t i = 0; i < n; ++i)
        std::copy_n(z_rows.data() + order[start + i] * kdim, kdim,
                    zbatch.data() + i * kdim);
      net.forward_train(zbatch.data(), n, cache);

      dimg.assign(n * img_sz, 0.0f);
      double batch_loss = 0.0;
      const float inv_n = 1.0f / static_cast<float>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Image& target = targets[order[start + i]];
        const Image& got = cache.out[i];
        float* drow = dimg.data() + i * img_sz;
        k::vsub(got.data.data(), target.data.data(), drow, img_sz);
        const double l_pix = k::sumsq_acc64(drow, img_sz);
        sum_pix += l_pix;
        batch_loss += l_pix;
        k::scale(2.0f * inv_n, drow, img_sz);
        if (beta > 0.0) {
          Image dphi;
          const double l_per = phi->sq_feature_distance(got, target, &dphi);
          sum_per += l_per;
          batch_loss += beta * l_per;
          k::axpy(static_cast<float>(beta) * inv_n, dphi.data.data(), drow, img_sz);
        }
      }
      if (!std::isfinite(batch_loss)) {
        bad = true;
        break;
      }
      std::fill(grad.begin(), grad.end(), 0.0f);
      net.backward(cache, dimg.data(), grad.data());
      k::scale(inv_n, grad.data(), grad.size());
      opt.step(net.params_.data(), grad.data(), grad.size());
    }
    if (bad) {
      net.params_ = snap_params;
      net.buffers_ = snap_buffers;
      opt.m = snap_m;
      opt.v = snap_v;
      opt.t = snap_t;
      out.aborted = true;
      break;
    }
    EpochStats st;
    st.epoch = e;
    st.pixel = sum_pix / static_cast<double>(m);
    st.perceptual = sum_per / static_cast<double>(m);
    st.composite = st.pixel + beta * st.perceptual;
    st.mse_per_pixel = sum_pix / static_cast<double>(m * img_sz);
    out.curve.push_back(st);
    snap_params = net.params_;
    snap_buffers = net.buffers_;
    snap_m = opt.m;
    snap_v = opt.v;
    snap_t = opt.t;
  }
  return out;
}

ReconBatch reconstruct(const InversionNet& net, const ProjectionBasis& basis,
                       const pofu::PoFURecord& rec) {
  if (rec.layout_id != basis.layout_id)
    throw std::invalid_argument("reconstruct: proof layout does not match basis");
  if (rec.d != basis.d)
    throw std::invalid_argument("reconstruct: dimension mismatch");
  if (basis.k != static_cast<std::size_t>(net.spec().input_dim))
    throw std::invalid_argument("reconstruct: basis width does not match model input");
  const auto z = project(basis, rec.rows.data(), rec.n, rec.d);
  ReconBatch out = reconstruct_from_features(net, z.data(), rec.n);
  out.source_client = rec.client_id;
  out.source = "pofu client " + std::to_string(rec.client_id);
  return out;
}

ReconBatch reconstruct_from_features(const InversionNet& net, const float* z,
                                     std::size_t n) {
  ReconBatch out;
  net.forward_eval(z, n, out.images);
  for (auto& im : out.images) clamp01(im);
  return out;
}

void save_inversion(const std::string& path, const InversionNet& net,
                    const std::string& fingerprint) {
  auto os = binio::open_out(path);
  binio::write_magic(os, kMagic);
  const auto& s = net.spec();
  nlohmann::ordered_json h;
  h["input_dim"] = s.input_dim;
  h["out_c"] = s.out_c;
  h["out_h"] = s.out_h;
  h["out_w"] = s.out_w;
  h["seed_channels"] = s.seed_channels;
  h["seed_hw"] = s.seed_hw;
  h["stage_widths"] = s.stage_widths;
  h["beta"] = s.beta;
  h["layout_id"] = hex64(net.layout().id());
  h["d"] = net.param_count();
  h["buffers"] = net.buffer_count();
  if (!fingerprint.empty()) h["fingerprint"] = fingerprint;
  binio::write_header(os, h);
  binio::write_f32(os, net.params_.data(), net.params_.size());
  binio::write_f32(os, net.buffers_.data(), net.buffers_.size());
  if (!os) throw std::runtime_error("inversion model write failed: " + path);
}

InversionNet load_inversion(const std::string& path) {
  auto is = binio::open_in(path);
  binio::read_magic(is, kMagic, "inversion " + path);
  const auto h = binio::read_header(is, "inversion " + path);
  InversionModelSpec s;
  s.input_dim = h.at("input_dim").get<int>();
  s.out_c = h.at("out_c").get<int>();
  s.out_h = h.at("out_h").get<int>();
  s.out_w = h.at("out_w").get<int>();
  s.seed_channels = h.at("seed_channels").get<int>();
  s.seed_hw = h.at("seed_hw").get<int>();
  s.stage_widths = h.at("stage_widths").get<std::vector<int>>();
  s.beta = h.at("beta").get<double>();
  InversionNet net(s, 0);
  if (net.param_count() != h.at("d").get<std::size_t>() ||
      net.buffer_count() != h.at("buffers").get<std::size_t>())
    throw std::runtime_error("inversion " + path + ": layout mismatch");
  const std::string lid = h.at("layout_id").get<std::string>();
  if (std::stoull(lid, nullptr, 16) != net.layout().id())
    throw std::runtime_error("inversion " + path + ": layout id mismatch");
  binio::read_f32(is, net.params_.data(), net.params_.size(), "inversion");
  binio::read_f32(is, net.buffers_.data(), net.buffers_.size(), "inversion");
  return net;
}

}  // namespace fulab::igf
