#include "fulab/kern/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "table.hpp"

namespace fulab::kern {

namespace {

using detail::KernelTable;

bool avx2_supported() {
#if defined(FULAB_HAVE_AVX2) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend pick_backend() {
  if (const char* env = std::getenv("FULAB_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (!avx2_supported())
        throw std::runtime_error("FULAB_KERNELS=avx2 but CPU/build lacks AVX2");
      return Backend::avx2;
    }
  }
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

struct State {
  Backend backend;
  const KernelTable* table;
  State() : backend(pick_backend()), table(lookup(backend)) {}
  static const KernelTable* lookup(Backend b) {
#ifdef FULAB_HAVE_AVX2
    if (b == Backend::avx2) return &detail::avx2_table();
#endif
    return &detail::scalar_table();
  }
};

State& state() {
  static State s;
  return s;
}

}  // namespace

Backend active_backend() { return state().backend; }

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

bool backend_available(Backend b) {
  return b == Backend::scalar || avx2_supported();
}

void force_backend(Backend b) {
  if (!backend_available(b))
    throw std::runtime_error("requested kernel backend unavailable");
  state().backend = b;
  state().table = State::lookup(b);
}

float dot(const float* a, const float* b, std::size_t n) {
  return state().table->dot(a, b, n);
}
double dot_acc64(const float* a, const float* b, std::size_t n) {
  return state().table->dot_acc64(a, b, n);
}
double sum_acc64(const float* x, std::size_t n) {
  return state().table->sum_acc64(x, n);
}
double sumsq_acc64(const float* x, std::size_t n) {
  return state().table->sumsq_acc64(x, n);
}
void axpy(float a, const float* x, float* y, std::size_t n) {
  state().table->axpy(a, x, y, n);
}
void scale(float a, float* x, std::size_t n) { state().table->scale(a, x, n); }
void vadd(const float* a, const float* b, float* out, std::size_t n) {
  state().table->vadd(a, b, out, n);
}
void vsub(const float* a, const float* b, float* out, std::size_t n) {
  state().table->vsub(a, b, out, n);
}
void vmul(const float* a, const float* b, float* out, std::size_t n) {
  state().table->vmul(a, b, out, n);
}
void scale_shift(const float* x, float a, float b, float* out, std::size_t n) {
  state().table->scale_shift(x, a, b, out, n);
}
void relu(float* x, std::size_t n) { state().table->relu(x, n); }
void relu_backward(const float* y, float* dy, std::size_t n) {
  state().table->relu_backward(y, dy, n);
}

}  // namespace fulab::kern
