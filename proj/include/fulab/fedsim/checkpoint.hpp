#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "fulab/core/layout.hpp"

namespace fulab::fedsim {

struct CheckpointMeta {
  std::string model_spec_id;
  std::uint64_t layout_id = 0;
  std::size_t d = 0;
  int round = -1;  // -1 marks a final/standalone checkpoint
  std::uint64_t seed = 0;
  nlohmann::ordered_json extra;  // unlearn method, scenario, fingerprint, ...
};

void save_checkpoint(const std::string& path, const ParamVector& params,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
  ParamVector params;
  CheckpointMeta meta;
};

// expected_layout = 0 skips the layout check.
LoadedCheckpoint load_checkpoint(const std::string& path,
                                 std::uint64_t expected_layout = 0);

}  // namespace fulab::fedsim
