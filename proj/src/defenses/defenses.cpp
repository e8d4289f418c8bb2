#include "fulab/defenses/defenses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fulab/core/rng.hpp"
#include "fulab/kern/kernels.hpp"

namespace fulab::defenses {

namespace k = fulab::kern;

void DefenseConfig::validate() const {
  static const char* known[] = {"none", "sign", "prune", "gauss",
                                "perturb", "smooth", "ortho"};
  if (std::find_if(std::begin(known), std::end(known),
                   [&](const char* s) { return id == s; }) == std::end(known))
    throw std::invalid_argument("unknown defense: " + id);
  if (!(prune_fraction >= 0.0 && prune_fraction < 1.0))
    throw std::invalid_argument("defense: prune fraction must be in [0,1)");
  if (sigma < 0.0) throw std::invalid_argument("defense: sigma must be >= 0");
  if (scale < 0.0 || factor < 0.0)
    throw std::invalid_argument("defense: perturb scale/factor must be >= 0");
  if (window < 1) throw std::invalid_argument("defense: window must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("defense: alpha must be in [0,1]");
}

nlohmann::ordered_json DefenseConfig::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  if (id == "prune") j["prune_fraction"] = prune_fraction;
  if (id == "gauss") j["sigma"] = sigma;
  if (id == "perturb") {
    j["scale"] = scale;
    j["factor"] = factor;
  }
  if (id == "smooth") {
    j["window"] = window;
    j["alpha"] = alpha;
  }
  if (id == "sign" && pre_scale != 1.0) j["pre_scale"] = pre_scale;
  if (id == "gauss" || id == "perturb" || id == "ortho") j["seed"] = seed;
  return j;
}

DefenseConfig DefenseConfig::from_json(const nlohmann::json& j) {
  DefenseConfig c;
  c.id = j.value("id", "none");
  c.prune_fraction = j.value("prune_fraction", 0.0);
  c.sigma = j.value("sigma", 0.0);
  c.scale = j.value("scale", 0.0);
  c.factor = j.value("factor", 0.0);
  c.window = j.value("window", 1);
  c.alpha = j.value("alpha", 0.0);
  c.pre_scale = j.value("pre_scale", 1.0);
  c.seed = j.value("seed", std::uint64_t{0});
  c.validate();
  return c;
}

void sign_compress(const float* v, float* out, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i)
    out[i] = v[i] > 0.0f ? 1.0f : (v[i] < 0.0f ? -1.0f : 0.0f);
}

void prune(const float* v, float* out, std::size_t d, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0))
    throw std::invalid_argument("prune: fraction must be in [0,1)");
  const std::size_t keep =
      static_cast<std::size_t>(std::ceil((1.0 - fraction) * static_cast<double>(d)));
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // largest magnitude first, ties to the lower index
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const float ma = std::fabs(v[a]), mb = std::fabs(v[b]);
    return ma != mb ? ma > mb : a < b;
  });
  std::fill(out, out + d, 0.0f);
  for (std::size_t i = 0; i < keep && i < d; ++i) out[idx[i]] = v[idx[i]];
}

void gauss_noise(const float* v, float* out, std::size_t d, double sigma,
                 std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("gauss: sigma must be >= 0");
  if (sigma == 0.0) {
    std::copy(v, v + d, out);
    return;
  }
  Rng rng(seed);
  for (std::size_t i = 0; i < d; ++i)
    out[i] = v[i] + static_cast<float>(sigma * rng.normal());
}

void perturb(const float* v, float* out, std::size_t d, double scale,
             double factor, std::uint64_t seed) {
  if (scale < 0.0 || factor < 0.0)
    throw std::invalid_argument("perturb: scale/factor must be >= 0");
  Rng rng(seed);
  for (std::size_t i = 0; i < d; ++i) {
    const double noise = rng.normal() * scale;
    out[i] = v[i] + static_cast<float>(noise * std::fabs(v[i]) * factor);
  }
}

void smooth(const float* v, float* out, std::size_t d, int window, double alpha) {
  if (window < 1 || static_cast<std::size_t>(window) > d)
    throw std::invalid_argument("smooth: window must be in [1, d]");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("smooth: alpha must be in [0,1]");
  // centered moving average, truncated at the edges
  std::vector<double> prefix(d + 1, 0.0);
  for (std::size_t i = 0; i < d; ++i) prefix[i + 1] = prefix[i] + v[i];
  const int lo_off = (window - 1) / 2, hi_off = window / 2;
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t lo = i >= static_cast<std::size_t>(lo_off) ? i - lo_off : 0;
    const std::size_t hi = std::min(d - 1, i + static_cast<std::size_t>(hi_off));
    const double ma = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    out[i] = static_cast<float>((1.0 - alpha) * v[i] + alpha * ma);
  }
}

void orthogonal_obfuscate(const float* v, float* out, std::size_t d,
                          std::uint64_t seed) {
  const double vnorm_sq = k::sumsq_acc64(v, d);
  if (!(vnorm_sq > 0.0))
    throw std::invalid_argument("cannot obfuscate zero proof");
  const double vnorm = std::sqrt(vnorm_sq);

  Rng rng(seed);
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<float> r(d);
    for (std::size_t i = 0; i < d; ++i) r[i] = rng.normalf();
    // u = r - (r.v / ||v||^2) v
    const double coeff = k::dot_acc64(r.data(), v, d) / vnorm_sq;
    std::vector<float> u = r;
    k::axpy(static_cast<float>(-coeff), v, u.data(), d);
    const double unorm = std::sqrt(k::sumsq_acc64(u.data(), d));
    const double rnorm = std::sqrt(k::sumsq_acc64(r.data(), d));
    if (unorm > 1e-12 * std::max(1.0, rnorm)) {
      const float rescale = static_cast<float>(vnorm / unorm);
      for (std::size_t i = 0; i < d; ++i) out[i] = u[i] * rescale;
      return;
    }
  }
  throw std::runtime_error("orthogonal obfuscation: sampled vectors stayed parallel");
}

void apply_defense(const DefenseConfig& cfg, const float* v, float* out,
                   std::size_t d, std::uint64_t row_seed) {
  if (cfg.id == "none") {
    std::copy(v, v + d, out);
  } else if (cfg.id == "sign") {
    if (cfg.pre_scale != 1.0) {
      std::vector<float> tmp(v, v + d);
      k::scale(static_cast<float>(cfg.pre_scale), tmp.data(), d);
      sign_compress(tmp.data(), out, d);
    } else {
      sign_compress(v, out, d);
    }
  } else if (cfg.id == "prune") {
    prune(v, out, d, cfg.prune_fraction);
  } else if (cfg.id == "gauss") {
    gauss_noise(v, out, d, cfg.sigma, row_seed);
  } else if (cfg.id == "perturb") {
    perturb(v, out, d, cfg.scale, cfg.factor, row_seed);
  } else if (cfg.id == "smooth") {
    smooth(v, out, d, cfg.window, cfg.alpha);
  } else if (cfg.id == "ortho") {
    orthogonal_obfuscate(v, out, d, row_seed);
  } else {
    throw std::invalid_argument("unknown defense: " + cfg.id);
  }
}

pofu::PoFURecord defend_record(const pofu::PoFURecord& rec, const DefenseConfig& cfg) {
  cfg.validate();
  pofu::PoFURecord out = rec;
  out.defense = cfg.to_json();
  for (std::size_t j = 0; j < rec.n; ++j)
    apply_defense(cfg, rec.row(j), out.row(j), rec.d, cfg.seed + j);
  return out;
}

}  // namespace fulab::defenses
