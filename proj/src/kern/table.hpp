#pragma once

#include <cstddef>

namespace fulab::kern::detail {

struct KernelTable {
  float (*dot)(const float*, const float*, std::size_t);
  double (*dot_acc64)(const float*, const float*, std::size_t);
  double (*sum_acc64)(const float*, std::size_t);
  double (*sumsq_acc64)(const float*, std::size_t);
  void (*axpy)(float, const float*, float*, std::size_t);
  void (*scale)(float, float*, std::size_t);
  void (*vadd)(const float*, const float*, float*, std::size_t);
  void (*vsub)(const float*, const float*, float*, std::size_t);
  void (*vmul)(const float*, const float*, float*, std::size_t);
  void (*scale_shift)(const float*, float, float, float*, std::size_t);
  void (*relu)(float*, std::size_t);
  void (*relu_backward)(const float*, float*, std::size_t);
};

const KernelTable& scalar_table();
#ifdef FULAB_HAVE_AVX2
const KernelTable& avx2_table();
#endif

}  // namespace fulab::kern::detail
