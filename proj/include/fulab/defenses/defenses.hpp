#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fulab/pofu/pofu.hpp"

namespace fulab::defenses {

// All defenses are pure seeded functions of (vector, parameters, seed).
struct DefenseConfig {
  std::string id = "none";  // sign | prune | gauss | perturb | smooth | ortho | none
  double prune_fraction = 0.0;  // fraction zeroed, in [0,1)
  double sigma = 0.0;           // gauss
  double scale = 0.0;           // perturb
  double factor = 0.0;          // perturb
  int window = 1;               // smooth
  double alpha = 0.0;           // smooth blend
  double pre_scale = 1.0;       // optional scaling applied before sign
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static DefenseConfig from_json(const nlohmann::json& j);
};

void sign_compress(const float* v, float* out, std::size_t d);
void prune(const float* v, float* out, std::size_t d, double fraction);
void gauss_noise(const float* v, float* out, std::size_t d, double sigma,
                 std::uint64_t seed);
void perturb(const float* v, float* out, std::size_t d, double scale,
             double factor, std::uint64_t seed);
void smooth(const float* v, float* out, std::size_t d, int window, double alpha);
// Norm-preserving random orthogonal replacement; throws on a zero vector.
void orthogonal_obfuscate(const float* v, float* out, std::size_t d,
                          std::uint64_t seed);

// Applies one vector through the configured defense (row seed already mixed).
void apply_defense(const DefenseConfig& cfg, const float* v, float* out,
                   std::size_t d, std::uint64_t row_seed);

// Row-parallel application over a record; per-row seeds are base seed + row
// index. The output record carries the defense tag in its header.
pofu::PoFURecord defend_record(const pofu::PoFURecord& rec, const DefenseConfig& cfg);

}  // namespace fulab::defenses
