#pragma once

#include <cstdint>
#include <string>

#include "fulab/core/image.hpp"

namespace fulab::harness {

// Dataset cache directory: FULAB_DATA_DIR, defaulting to ./data.
std::string data_dir();

// Raw IDX pair (images + labels), the published MNIST/Fashion-MNIST layout.
LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path);

// CIFAR binary batches: each record is a label byte (or coarse+fine for
// cifar100) followed by 3x32x32 pixel bytes.
LabeledDataset load_cifar_bin(const std::vector<std::string>& batch_paths,
                              int classes, bool coarse_fine);

struct SyntheticSpec {
  int n = 1000;
  int classes = 10;
  int c = 1, h = 28, w = 28;
  int rank = 4;            // low-rank components per class
  double coef_std = 0.35;  // per-sample component coefficients
  double noise = 0.02;
  std::uint64_t seed = 1;
  std::uint64_t template_seed = 7;  // distribution identity; vary for OOD
};

// Seeded low-rank image generator: smooth class templates plus per-sample
// low-rank variation, clamped to [0,1]. Fully offline.
LabeledDataset make_synthetic(const SyntheticSpec& spec);

// Resolves a dataset id (mnist | fashion-mnist | cifar10 | cifar100 |
// synthetic | synthetic-alt) against the cache directory; `want` images are
// taken from the training split front after a seeded shuffle.
struct DatasetRequest {
  std::string id = "synthetic";
  int want = 0;  // 0 = all
  std::uint64_t seed = 0;
};

LabeledDataset load_dataset(const DatasetRequest& req);

// True when the raw files for `id` exist in the cache directory.
bool dataset_available(const std::string& id);

// The paired out-of-distribution source for an id (mnist <-> fashion-mnist,
// cifar10 <-> cifar100, synthetic <-> synthetic-alt).
std::string ood_pair(const std::string& id);

struct DatasetShape {
  int c = 1, h = 28, w = 28;
  int classes = 10;
};
DatasetShape dataset_shape(const std::string& id);

}  // namespace fulab::harness
