#pragma once

#include <cstdint>
#include <vector>

namespace fulab::igf {

// Default output width for hash reduction: half the input dimension.
std::size_t default_hash_dim(std::size_t d);

// Seeded bucket assignment: coordinate j -> one output bucket.
std::vector<std::uint32_t> hash_assignment(std::size_t d, std::size_t out_dim,
                                           std::uint64_t seed);

// Sparse random-projection reduction: each output coordinate is the sum of
// the input coordinates hashed to it. rows: p x d -> p x out_dim.
std::vector<float> hash_project(const float* rows, std::size_t p, std::size_t d,
                                std::size_t out_dim, std::uint64_t seed);

}  // namespace fulab::igf
