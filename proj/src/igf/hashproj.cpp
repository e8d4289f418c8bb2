#include "fulab/igf/hashproj.hpp"

#include <stdexcept>

#include "fulab/core/rng.hpp"

namespace fulab::igf {

std::size_t default_hash_dim(std::size_t d) { return (d + 1) / 2; }

std::vector<std::uint32_t> hash_assignment(std::size_t d, std::size_t out_dim,
                                           std::uint64_t seed) {
  if (out_dim < 1) throw std::invalid_argument("hash: out dim must be >= 1");
  std::vector<std::uint32_t> bucket(d);
  for (std::size_t j = 0; j < d; ++j)
    bucket[j] = static_cast<std::uint32_t>(splitmix64(seed ^ splitmix64(j)) % out_dim);
  return bucket;
}

std::vector<float> hash_project(const float* rows, std::size_t p, std::size_t d,
                                std::size_t out_dim, std::uint64_t seed) {
  const auto bucket = hash_assignment(d, out_dim, seed);
  std::vector<float> out(p * out_dim, 0.0f);
  for (std::size_t i = 0; i < p; ++i) {
    const float* src = rows + i * d;
    float* dst = out.data() + i * out_dim;
    for (std::size_t j = 0; j < d; ++j) dst[bucket[j]] += src[j];
  }
  return out;
}

}  // namespace fulab::igf
