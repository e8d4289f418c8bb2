#pragma once

#include <cstddef>

// Single-sample NN primitives over CHW float planes. Convolutions are
// stride-1 square kernels expressed through a patch-major im2col buffer
// (colT: pixels x patch) so the inner loops are long dot/axpy kernels.
// Backward functions accumulate parameter gradients (+=) and overwrite
// input gradients unless noted.
namespace fulab::nn {

struct ConvShape {
  int in_c, in_h, in_w;
  int out_c;
  int k;    // kernel edge, 1 or 3
  int pad;  // stride is always 1

  int out_h() const { return in_h + 2 * pad - k + 1; }
  int out_w() const { return in_w + 2 * pad - k + 1; }
  int patch() const { return in_c * k * k; }
  int pixels() const { return out_h() * out_w(); }
  std::size_t in_size() const { return static_cast<std::size_t>(in_c) * in_h * in_w; }
  std::size_t out_size() const { return static_cast<std::size_t>(out_c) * pixels(); }
  std::size_t col_size() const { return static_cast<std::size_t>(pixels()) * patch(); }
};

void im2colT(const float* x, const ConvShape& s, float* colT);
// y[o,p] = b[o] + dot(w[o,:], colT[p,:]); w is out_c x (in_c*k*k) row-major.
void conv_forward(const float* colT, const float* w, const float* b, float* y,
                  const ConvShape& s);
void conv_backward_params(const float* colT, const float* dy, float* dw_acc,
                          float* db_acc, const ConvShape& s);
// dcolT is scratch of col_size(), dx_acc (in_size) is accumulated into.
void conv_backward_input(const float* w, const float* dy, const ConvShape& s,
                         float* dcolT, float* dx_acc);

void dense_forward(const float* x, const float* w, const float* b, float* y,
                   int in, int out);
// dx (overwritten) may be null when the input gradient is not needed.
void dense_backward(const float* x, const float* w, const float* dy,
                    float* dw_acc, float* db_acc, float* dx, int in, int out);

// 2x2 mean pooling; h and w must be even.
void avgpool2_forward(const float* x, float* y, int c, int h, int w);
void avgpool2_backward(const float* dy, float* dx, int c, int h, int w);

void gap_forward(const float* x, float* y, int c, int h, int w);
void gap_backward(const float* dy, float* dx, int c, int h, int w);

// Depth-to-space with factor 2: (c, h, w) -> (c/4, 2h, 2w).
void pixelshuffle2_forward(const float* x, float* y, int in_c, int h, int w);
void pixelshuffle2_backward(const float* dy, float* dx, int in_c, int h, int w);

void sigmoid(float* x, std::size_t n);
// dy *= y * (1 - y) where y is the sigmoid output.
void sigmoid_backward(const float* y, float* dy, std::size_t n);

// Batch tensors below are n contiguous (c x p) planes, p = spatial size.
void bn_forward_train(const float* x, float* y, int n, int c, int p,
                      const float* gamma, const float* beta, float* save_mean,
                      float* save_invstd, float* running_mean,
                      float* running_var, float momentum, float eps);
void bn_forward_eval(const float* x, float* y, int n, int c, int p,
                     const float* gamma, const float* beta,
                     const float* running_mean, const float* running_var,
                     float eps);
void bn_backward(const float* x, const float* dy, int n, int c, int p,
                 const float* gamma, const float* save_mean,
                 const float* save_invstd, float* dgamma_acc, float* dbeta_acc,
                 float* dx);

// Returns cross-entropy loss; optionally writes softmax-minus-onehot and/or
// the probabilities. Stable under large logits; accumulates in double.
double softmax_xent(const float* logits, int classes, int label,
                    float* dlogits, float* probs);

}  // namespace fulab::nn
