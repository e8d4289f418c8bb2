#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fulab {

// CHW float image, values expected in [0, 1].
struct Image {
  int c = 0, h = 0, w = 0;
  std::vector<float> data;

  Image() = default;
  Image(int c_, int h_, int w_)
      : c(c_), h(h_), w(w_), data(static_cast<std::size_t>(c_) * h_ * w_, 0.0f) {}

  std::size_t size() const { return data.size(); }
  float& at(int ci, int y, int x) {
    return data[(static_cast<std::size_t>(ci) * h + y) * w + x];
  }
  float at(int ci, int y, int x) const {
    return data[(static_cast<std::size_t>(ci) * h + y) * w + x];
  }
  bool same_shape(const Image& o) const { return c == o.c && h == o.h && w == o.w; }
};

inline void clamp01(Image& im) {
  for (float& v : im.data) v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
}

// One labeled image collection (values in [0,1], labels in [0, classes)).
struct LabeledDataset {
  std::vector<Image> images;
  std::vector<int> labels;
  int classes = 0;

  std::size_t size() const { return images.size(); }
  void push(Image im, int label) {
    images.push_back(std::move(im));
    labels.push_back(label);
  }
  LabeledDataset subset(const std::vector<std::size_t>& idx) const {
    LabeledDataset out;
    out.classes = classes;
    out.images.reserve(idx.size());
    out.labels.reserve(idx.size());
    for (std::size_t i : idx) {
      if (i >= size()) throw std::out_of_range("dataset subset index");
      out.images.push_back(images[i]);
      out.labels.push_back(labels[i]);
    }
    return out;
  }
};

}  // namespace fulab
