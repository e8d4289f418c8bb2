#include "fulab/harness/datasets.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "fulab/core/rng.hpp"

namespace fulab::harness {

namespace fs = std::filesystem;

std::string data_dir() {
  if (const char* env = std::getenv("FULAB_DATA_DIR")) return env;
  return "data";
}

namespace {

std::uint32_t read_be32(std::ifstream& is, const std::string& what) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error(what + ": truncated");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path) {
  std::ifstream im(images_path, std::ios::binary);
  if (!im) throw std::runtime_error("cannot open " + images_path);
  std::ifstream lb(labels_path, std::ios::binary);
  if (!lb) throw std::runtime_error("cannot open " + labels_path);

  if (read_be32(im, images_path) != 0x00000803u)
    throw std::runtime_error(images_path + ": not an idx3 image file");
  const std::uint32_t n = read_be32(im, images_path);
  const std::uint32_t h = read_be32(im, images_path);
  const std::uint32_t w = read_be32(im, images_path);
  if (read_be32(lb, labels_path) != 0x00000801u)
    throw std::runtime_error(labels_path + ": not an idx1 label file");
  if (read_be32(lb, labels_path) != n)
    throw std::runtime_error("idx image/label count mismatch");

  LabeledDataset out;
  out.classes = 10;
  std::vector<unsigned char> pix(static_cast<std::size_t>(h) * w);
  for (std::uint32_t i = 0; i < n; ++i) {
    im.read(reinterpret_cast<char*>(pix.data()), static_cast<std::streamsize>(pix.size()));
    char label = 0;
    lb.read(&label, 1);
    if (!im || !lb) throw std::runtime_error("idx payload truncated");
    Image image(1, static_cast<int>(h), static_cast<int>(w));
    for (std::size_t p = 0; p < pix.size(); ++p)
      image.data[p] = static_cast<float>(pix[p]) / 255.0f;
    out.push(std::move(image), static_cast<int>(static_cast<unsigned char>(label)));
  }
  return out;
}

LabeledDataset load_cifar_bin(const std::vector<std::string>& batch_paths,
                              int classes, bool coarse_fine) {
  LabeledDataset out;
  out.classes = classes;
  const std::size_t pix_bytes = 3 * 32 * 32;
  std::vector<unsigned char> rec(pix_bytes + (coarse_fine ? 2 : 1));
  for (const auto& path : batch_paths) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    while (is.read(reinterpret_cast<char*>(rec.data()),
                   static_cast<std::streamsize>(rec.size()))) {
      const int label = coarse_fine ? rec[1] : rec[0];
      if (label < 0 || label >= classes)
        throw std::runtime_error(path + ": label out of range");
      Image image(3, 32, 32);
      const unsigned char* px = rec.data() + (coarse_fine ? 2 : 1);
      for (std::size_t p = 0; p < pix_bytes; ++p)
        image.data[p] = static_cast<float>(px[p]) / 255.0f;
      out.push(std::move(image), label);
    }
  }
  if (out.size() == 0) throw std::runtime_error("cifar: no records read");
  return out;
}

namespace {

// smooth 1-d profile: mixture of a few random sinusoids
std::vector<float> smooth_profile(int n, Rng& rng) {
  std::vector<float> v(n, 0.0f);
  for (int harm = 1; harm <= 3; ++harm) {
    const double amp = rng.normal() / harm;
    const double phase = rng.uniform() * 6.283185307179586;
    for (int i = 0; i < n; ++i)
      v[i] += static_cast<float>(
          amp * std::sin(6.283185307179586 * harm * (i + 0.5) / n + phase));
  }
  return v;
}

Image rank1(int c, int h, int w, Rng& rng) {
  Image im(c, h, w);
  for (int ci = 0; ci < c; ++ci) {
    const auto u = smooth_profile(h, rng);
    const auto v = smooth_profile(w, rng);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) im.at(ci, y, x) = u[y] * v[x];
  }
  return im;
}

}  // namespace

LabeledDataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.classes < 2 || spec.rank < 1)
    throw std::invalid_argument("synthetic: bad spec");
  LabeledDataset out;
  out.classes = spec.classes;

  // class templates and bases are fixed by the template seed
  Rng trng(spec.template_seed);
  std::vector<Image> templates;
  std::vector<std::vector<Image>> bases(spec.classes);
  for (int cl = 0; cl < spec.classes; ++cl) {
    Image t = rank1(spec.c, spec.h, spec.w, trng);
    Image t2 = rank1(spec.c, spec.h, spec.w, trng);
    for (std::size_t i = 0; i < t.size(); ++i)
      t.data[i] = 0.5f + 0.28f * t.data[i] + 0.18f * t2.data[i];
    templates.push_back(std::move(t));
    for (int r = 0; r < spec.rank; ++r)
      bases[cl].push_back(rank1(spec.c, spec.h, spec.w, trng));
  }

  Rng rng(spec.seed);
  for (int i = 0; i < spec.n; ++i) {
    const int cl = static_cast<int>(rng.index(spec.classes));
    Image im = templates[cl];
    for (int r = 0; r < spec.rank; ++r) {
      const float coef = static_cast<float>(rng.normal() * spec.coef_std);
      const Image& b = bases[cl][r];
      for (std::size_t p = 0; p < im.size(); ++p) im.data[p] += coef * b.data[p];
    }
    if (spec.noise > 0.0)
      for (auto& v : im.data) v += static_cast<float>(rng.normal() * spec.noise);
    clamp01(im);
    out.push(std::move(im), cl);
  }
  return out;
}

namespace {

struct RawPaths {
  std::vector<std::string> files;
  bool idx = false, coarse = false;
  int classes = 10;
};

RawPaths raw_paths(const std::string& id) {
  const fs::path root(data_dir());
  RawPaths rp;
  if (id == "mnist" || id == "fashion-mnist") {
    const fs::path d = root / id;
    rp.idx = true;
    rp.files = {(d / "train-images-idx3-ubyte").string(),
                (d / "train-labels-idx1-ubyte").string()};
  } else if (id == "cifar10") {
    const fs::path d = root / "cifar10";
    for (int b = 1; b <= 5; ++b)
      rp.files.push_back((d / ("data_batch_" + std::to_string(b) + ".bin")).string());
  } else if (id == "cifar100") {
    rp.files = {(root / "cifar100" / "train.bin").string()};
    rp.coarse = true;
    rp.classes = 100;
  } else {
    throw std::invalid_argument("unknown dataset id: " + id);
  }
  return rp;
}

}  // namespace

bool dataset_available(const std::string& id) {
  if (id == "synthetic" || id == "synthetic-alt") return true;
  RawPaths rp;
  try {
    rp = raw_paths(id);
  } catch (const std::exception&) {
    return false;
  }
  for (const auto& f : rp.files)
    if (!fs::exists(f)) return false;
  return true;
}

DatasetShape dataset_shape(const std::string& id) {
  if (id == "mnist" || id == "fashion-mnist") return {1, 28, 28, 10};
  if (id == "cifar10") return {3, 32, 32, 10};
  if (id == "cifar100") return {3, 32, 32, 100};
  if (id == "synthetic" || id == "synthetic-alt") return {1, 28, 28, 10};
  throw std::invalid_argument("unknown dataset id: " + id);
}

std::string ood_pair(const std::string& id) {
  if (id == "mnist") return "fashion-mnist";
  if (id == "fashion-mnist") return "mnist";
  if (id == "cifar10") return "cifar100";
  if (id == "cifar100") return "cifar10";
  if (id == "synthetic") return "synthetic-alt";
  if (id == "synthetic-alt") return "synthetic";
  throw std::invalid_argument("no out-of-distribution pairing for " + id);
}

LabeledDataset load_dataset(const DatasetRequest& req) {
  LabeledDataset full;
  if (req.id == "synthetic" || req.id == "synthetic-alt") {
    SyntheticSpec spec;
    spec.n = req.want > 0 ? req.want : 4096;
    spec.seed = req.seed;
    spec.template_seed = req.id == "synthetic" ? 7 : 7001;
    return make_synthetic(spec);
  }
  const RawPaths rp = raw_paths(req.id);
  for (const auto& f : rp.files)
    if (!fs::exists(f))
      throw std::runtime_error("dataset " + req.id + " missing file " + f +
                               " (set FULAB_DATA_DIR)");
  if (rp.idx)
    full = load_idx(rp.files[0], rp.files[1]);
  else
    full = load_cifar_bin(rp.files, rp.classes, rp.coarse);

  if (req.want <= 0 || static_cast<std::size_t>(req.want) >= full.size()) return full;
  Rng rng(splitmix64(req.seed ^ 0xda7a5e7));
  auto idx = rng.sample_without_replacement(full.size(), static_cast<std::size_t>(req.want));
  return full.subset(idx);
}

}  // namespace fulab::harness
