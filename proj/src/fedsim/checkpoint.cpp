#include "fulab/fedsim/checkpoint.hpp"

#include <cstdio>
#include <stdexcept>

#include "fulab/core/binio.hpp"

namespace fulab::fedsim {

namespace {
constexpr char kMagic[12] = "FULABCKPT";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

void save_checkpoint(const std::string& path, const ParamVector& params,
                     const CheckpointMeta& meta) {
  if (meta.d != params.size())
    throw std::invalid_argument("checkpoint meta d does not match params");
  if (meta.layout_id != params.layout_id)
    throw std::invalid_argument("checkpoint meta layout does not match params");
  auto os = binio::open_out(path);
  binio::write_magic(os, kMagic);
  nlohmann::ordered_json h;
  h["model_spec_id"] = meta.model_spec_id;
  h["layout_id"] = hex64(meta.layout_id);
  h["d"] = meta.d;
  h["round"] = meta.round;
  h["seed"] = meta.seed;
  if (!meta.extra.is_null()) h["extra"] = meta.extra;
  binio::write_header(os, h);
  binio::write_f32(os, params.data(), params.size());
  if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path,
                                 std::uint64_t expected_layout) {
  auto is = binio::open_in(path);
  binio::read_magic(is, kMagic, "checkpoint " + path);
  const auto h = binio::read_header(is, "checkpoint " + path);
  LoadedCheckpoint out;
  out.meta.model_spec_id = h.at("model_spec_id").get<std::string>();
  out.meta.layout_id =
      std::stoull(h.at("layout_id").get<std::string>(), nullptr, 16);
  out.meta.d = h.at("d").get<std::size_t>();
  out.meta.round = h.at("round").get<int>();
  out.meta.seed = h.at("seed").get<std::uint64_t>();
  if (h.contains("extra")) out.meta.extra = h.at("extra");
  if (expected_layout != 0 && out.meta.layout_id != expected_layout)
    throw std::runtime_error("checkpoint " + path + ": layout id mismatch");
  out.params = ParamVector(out.meta.d, out.meta.layout_id);
  binio::read_f32(is, out.params.data(), out.meta.d, "checkpoint " + path);
  return out;
}

}  // namespace fulab::fedsim
