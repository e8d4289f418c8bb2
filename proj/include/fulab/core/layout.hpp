#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace fulab {

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a64(s.data(), s.size(), h);
}

struct LayoutEntry {
  std::string name;
  std::vector<int> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

// Canonical flattening of a model's trainable arrays: concatenation in
// declaration order. The layout id hashes the spec id plus every entry so
// a vector can never silently cross model boundaries.
class ParamLayout {
 public:
  ParamLayout() = default;
  explicit ParamLayout(std::string spec_id) : spec_id_(std::move(spec_id)) {}

  std::size_t add(const std::string& name, std::vector<int> shape) {
    LayoutEntry e;
    e.name = name;
    e.shape = std::move(shape);
    e.size = 1;
    for (int s : e.shape) e.size *= static_cast<std::size_t>(s);
    e.offset = total_;
    total_ += e.size;
    entries_.push_back(std::move(e));
    return entries_.back().offset;
  }

  const LayoutEntry& entry(const std::string& name) const {
    for (const auto& e : entries_)
      if (e.name == name) return e;
    throw std::out_of_range("layout entry not found: " + name);
  }

  const std::vector<LayoutEntry>& entries() const { return entries_; }
  std::size_t total() const { return total_; }
  const std::string& spec_id() const { return spec_id_; }

  std::uint64_t id() const {
    std::uint64_t h = fnv1a64(spec_id_);
    for (const auto& e : entries_) {
      h = fnv1a64(e.name, h);
      for (int s : e.shape) h = fnv1a64(&s, sizeof(s), h);
    }
    return h;
  }

 private:
  std::string spec_id_;
  std::vector<LayoutEntry> entries_;
  std::size_t total_ = 0;
};

// Flattened trainable parameters tied to a layout.
struct ParamVector {
  std::vector<float> values;
  std::uint64_t layout_id = 0;

  ParamVector() = default;
  ParamVector(std::size_t d, std::uint64_t lid) : values(d, 0.0f), layout_id(lid) {}

  std::size_t size() const { return values.size(); }
  float* data() { return values.data(); }
  const float* data() const { return values.data(); }

  void check_layout(std::uint64_t expected) const {
    if (layout_id != expected)
      throw std::runtime_error("parameter layout mismatch");
  }
  void check_same(const ParamVector& o) const {
    if (layout_id != o.layout_id || values.size() != o.values.size())
      throw std::runtime_error("parameter layout mismatch");
  }
};

}  // namespace fulab
