#pragma once

#include <cstddef>

// Float32 kernels behind a runtime-dispatched table. A scalar reference
// implementation always exists; an AVX2+FMA variant is selected on x86-64
// when the CPU supports it. Env var FULAB_KERNELS=scalar|avx2 overrides.
// Reductions suffixed _acc64 accumulate in double.
namespace fulab::kern {

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name(Backend b);
bool backend_available(Backend b);

// Test hook. Throws if the backend is unavailable. Not thread-safe.
void force_backend(Backend b);

float dot(const float* a, const float* b, std::size_t n);
double dot_acc64(const float* a, const float* b, std::size_t n);
double sum_acc64(const float* x, std::size_t n);
double sumsq_acc64(const float* x, std::size_t n);

// y += a * x
void axpy(float a, const float* x, float* y, std::size_t n);
// x *= a
void scale(float a, float* x, std::size_t n);
void vadd(const float* a, const float* b, float* out, std::size_t n);
void vsub(const float* a, const float* b, float* out, std::size_t n);
void vmul(const float* a, const float* b, float* out, std::size_t n);
// out = a * x + b
void scale_shift(const float* x, float a, float b, float* out, std::size_t n);
void relu(float* x, std::size_t n);
// dy[i] = 0 wherever y[i] <= 0; y is the relu output (or its input, same sign).
void relu_backward(const float* y, float* dy, std::size_t n);

}  // namespace fulab::kern
