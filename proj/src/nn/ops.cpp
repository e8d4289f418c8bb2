#include "fulab/nn/ops.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "fulab/kern/kernels.hpp"

namespace fulab::nn {

namespace k = fulab::kern;

void im2colT(const float* x, const ConvShape& s, float* colT) {
  const int oh = s.out_h(), ow = s.out_w(), K = s.patch();
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      float* row = colT + (static_cast<std::size_t>(oy) * ow + ox) * K;
      std::size_t idx = 0;
      for (int ic = 0; ic < s.in_c; ++ic) {
        const float* plane = x + static_cast<std::size_t>(ic) * s.in_h * s.in_w;
        for (int ky = 0; ky < s.k; ++ky) {
          const int iy = oy + ky - s.pad;
          for (int kx = 0; kx < s.k; ++kx, ++idx) {
            const int ix = ox + kx - s.pad;
            row[idx] = (iy >= 0 && iy < s.in_h && ix >= 0 && ix < s.in_w)
                           ? plane[iy * s.in_w + ix]
                           : 0.0f;
          }
        }
      }
    }
  }
}

void conv_forward(const float* colT, const float* w, const float* b, float* y,
                  const ConvShape& s) {
  const int P = s.pixels(), K = s.patch();
  for (int o = 0; o < s.out_c; ++o) {
    const float* wrow = w + static_cast<std::size_t>(o) * K;
    float* yrow = y + static_cast<std::size_t>(o) * P;
    for (int p = 0; p < P; ++p)
      yrow[p] = b[o] + k::dot(wrow, colT + static_cast<std::size_t>(p) * K, K);
  }
}

void conv_backward_params(const float* colT, const float* dy, float* dw_acc,
                          float* db_acc, const ConvShape& s) {
  const int P = s.pixels(), K = s.patch();
  for (int o = 0; o < s.out_c; ++o) {
    const float* dyrow = dy + static_cast<std::size_t>(o) * P;
    float* dwrow = dw_acc + static_cast<std::size_t>(o) * K;
    double db = 0.0;
    for (int p = 0; p < P; ++p) {
      const float g = dyrow[p];
      db += g;
      if (g != 0.0f) k::axpy(g, colT + static_cast<std::size_t>(p) * K, dwrow, K);
    }
    db_acc[o] += static_cast<float>(db);
  }
}

void conv_backward_input(const float* w, const float* dy, const ConvShape& s,
                         float* dcolT, float* dx_acc) {
  const int P = s.pixels(), K = s.patch();
  std::memset(dcolT, 0, s.col_size() * sizeof(float));
  for (int o = 0; o < s.out_c; ++o) {
    const float* wrow = w + static_cast<std::size_t>(o) * K;
    const float* dyrow = dy + static_cast<std::size_t>(o) * P;
    for (int p = 0; p < P; ++p) {
      const float g = dyrow[p];
      if (g != 0.0f) k::axpy(g, wrow, dcolT + static_cast<std::size_t>(p) * K, K);
    }
  }
  // col2im scatter-add
  const int oh = s.out_h(), ow = s.out_w();
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const float* row = dcolT + (static_cast<std::size_t>(oy) * ow + ox) * K;
      std::size_t idx = 0;
      for (int ic = 0; ic < s.in_c; ++ic) {
        float* plane = dx_acc + static_cast<std::size_t>(ic) * s.in_h * s.in_w;
        for (int ky = 0; ky < s.k; ++ky) {
          const int iy = oy + ky - s.pad;
          for (int kx = 0; kx < s.k; ++kx, ++idx) {
            const int ix = ox + kx - s.pad;
            if (iy >= 0 && iy < s.in_h && ix >= 0 && ix < s.in_w)
              plane[iy * s.in_w + ix] += row[idx];
          }
        }
      }
    }
  }
}

void dense_forward(const float* x, const float* w, const float* b, float* y,
                   int in, int out) {
  for (int o = 0; o < out; ++o)
    y[o] = b[o] + k::dot(w + static_cast<std::size_t>(o) * in, x, in);
}

void dense_backward(const float* x, const float* w, const float* dy,
                    float* dw_acc, float* db_acc, float* dx, int in, int out) {
  if (dx) std::memset(dx, 0, static_cast<std::size_t>(in) * sizeof(float));
  for (int o = 0; o < out; ++o) {
    const float g = dy[o];
    db_acc[o] += g;
    if (g != 0.0f) {
      k::axpy(g, x, dw_acc + static_cast<std::size_t>(o) * in, in);
      if (dx) k::axpy(g, w + static_cast<std::size_t>(o) * in, dx, in);
    }
  }
}

void avgpool2_forward(const float* x, float* y, int c, int h, int w) {
  const int oh = h / 2, ow = w / 2;
  for (int ci = 0; ci < c; ++ci) {
    const float* xp = x + static_cast<std::size_t>(ci) * h * w;
    float* yp = y + static_cast<std::size_t>(ci) * oh * ow;
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        const float* p0 = xp + (2 * oy) * w + 2 * ox;
        yp[oy * ow + ox] = 0.25f * (p0[0] + p0[1] + p0[w] + p0[w + 1]);
      }
  }
}

void avgpool2_backward(const float* dy, float* dx, int c, int h, int w) {
  const int oh = h / 2, ow = w / 2;
  for (int ci = 0; ci < c; ++ci) {
    const float* dyp = dy + static_cast<std::size_t>(ci) * oh * ow;
    float* dxp = dx + static_cast<std::size_t>(ci) * h * w;
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        const float g = 0.25f * dyp[oy * ow + ox];
        float* p0 = dxp + (2 * oy) * w + 2 * ox;
        p0[0] = g;
        p0[1] = g;
        p0[w] = g;
        p0[w + 1] = g;
      }
  }
}

void gap_forward(const float* x, float* y, int c, int h, int w) {
  const std::size_t p = static_cast<std::size_t>(h) * w;
  for (int ci = 0; ci < c; ++ci)
    y[ci] = static_cast<float>(k::sum_acc64(x + ci * p, p) / static_cast<double>(p));
}

void gap_backward(const float* dy, float* dx, int c, int h, int w) {
  const std::size_t p = static_cast<std::size_t>(h) * w;
  for (int ci = 0; ci < c; ++ci) {
    const float g = dy[ci] / static_cast<float>(p);
    for (std::size_t i = 0; i < p; ++i) dx[ci * p + i] = g;
  }
}

void pixelshuffle2_forward(const float* x, float* y, int in_c, int h, int w) {
  const int oc = in_c / 4, oh = 2 * h, ow = 2 * w;
  for (int o = 0; o < oc; ++o) {
    float* yp = y + static_cast<std::size_t>(o) * oh * ow;
    for (int sy = 0; sy < 2; ++sy)
      for (int sx = 0; sx < 2; ++sx) {
        const float* xp = x + (static_cast<std::size_t>(o) * 4 + sy * 2 + sx) * h * w;
        for (int iy = 0; iy < h; ++iy) {
          float* yrow = yp + (2 * iy + sy) * ow + sx;
          const float* xrow = xp + iy * w;
          for (int ix = 0; ix < w; ++ix) yrow[2 * ix] = xrow[ix];
        }
      }
  }
}

void pixelshuffle2_backward(const float* dy, float* dx, int in_c, int h, int w) {
  const int oc = in_c / 4, oh = 2 * h, ow = 2 * w;
  for (int o = 0; o < oc; ++o) {
    const float* dyp = dy + static_cast<std::size_t>(o) * oh * ow;
    for (int sy = 0; sy < 2; ++sy)
      for (int sx = 0; sx < 2; ++sx) {
        float* dxp = dx + (static_cast<std::size_t>(o) * 4 + sy * 2 + sx) * h * w;
        for (int iy = 0; iy < h; ++iy) {
          const float* dyrow = dyp + (2 * iy + sy) * ow + sx;
          float* dxrow = dxp + iy * w;
          for (int ix = 0; ix < w; ++ix) dxrow[ix] = dyrow[2 * ix];
        }
      }
  }
}

void sigmoid(float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    x[i] = 1.0f / (1.0f + std::exp(-x[i]));
}

void sigmoid_backward(const float* y, float* dy, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dy[i] *= y[i] * (1.0f - y[i]);
}

void bn_forward_train(const float* x, float* y, int n, int c, int p,
                      const float* gamma, const float* beta, float* save_mean,
                      float* save_invstd, float* running_mean,
                      float* running_var, float momentum, float eps) {
  const std::size_t plane = static_cast<std::size_t>(p);
  const double m = static_cast<double>(n) * p;
  for (int ci = 0; ci < c; ++ci) {
    double sum = 0.0, sumsq = 0.0;
    for (int ni = 0; ni < n; ++ni) {
      const float* xp = x + (static_cast<std::size_t>(ni) * c + ci) * plane;
      sum += k::sum_acc64(xp, plane);
      sumsq += k::sumsq_acc64(xp, plane);
    }
    const double mean = sum / m;
    double var = sumsq / m - mean * mean;
    if (var < 0.0) var = 0.0;
    const double invstd = 1.0 / std::sqrt(var + eps);
    save_mean[ci] = static_cast<float>(mean);
    save_invstd[ci] = static_cast<float>(invstd);
    const double unbiased = m > 1.0 ? var * m / (m - 1.0) : var;
    running_mean[ci] = (1.0f - momentum) * running_mean[ci] + momentum * static_cast<float>(mean);
    running_var[ci] = (1.0f - momentum) * running_var[ci] + momentum * static_cast<float>(unbiased);
    const float a = gamma[ci] * static_cast<float>(invstd);
    const float b = beta[ci] - a * static_cast<float>(mean);
    for (int ni = 0; ni < n; ++ni) {
      const std::size_t off = (static_cast<std::size_t>(ni) * c + ci) * plane;
      k::scale_shift(x + off, a, b, y + off, plane);
    }
  }
}

void bn_forward_eval(const float* x, float* y, int n, int c, int p,
                     const float* gamma, const float* beta,
                     const float* running_mean, const float* running_var,
                     float eps) {
  const std::size_t plane = static_cast<std::size_t>(p);
  for (int ci = 0; ci < c; ++ci) {
    const float invstd = 1.0f / std::sqrt(running_var[ci] + eps);
    const float a = gamma[ci] * invstd;
    const float b = beta[ci] - a * running_mean[ci];
    for (int ni = 0; ni < n; ++ni) {
      const std::size_t off = (static_cast<std::size_t>(ni) * c + ci) * plane;
      k::scale_shift(x + off, a, b, y + off, plane);
    }
  }
}

void bn_backward(const float* x, const float* dy, int n, int c, int p,
                 const float* gamma, const float* save_mean,
                 const float* save_invstd, float* dgamma_acc, float* dbeta_acc,
                 float* dx) {
  const std::size_t plane = static_cast<std::size_t>(p);
  const double m = static_cast<double>(n) * p;
  for (int ci = 0; ci < c; ++ci) {
    const double mean = save_mean[ci];
    const double invstd = save_invstd[ci];
    double dsum = 0.0, dxsum = 0.0;
    for (int ni = 0; ni < n; ++ni) {
      const std::size_t off = (static_cast<std::size_t>(ni) * c + ci) * plane;
      dsum += k::sum_acc64(dy + off, plane);
      dxsum += k::dot_acc64(dy + off, x + off, plane);
    }
    const double dbeta = dsum;
    const double dgamma = (dxsum - mean * dsum) * invstd;
    dbeta_acc[ci] += static_cast<float>(dbeta);
    dgamma_acc[ci] += static_cast<float>(dgamma);
    // dx = A*dy + B*x + C with the batch terms folded into B and C
    const double A = gamma[ci] * invstd;
    const double B = -A * (dgamma / m) * invstd;
    const double C = -A * (dbeta / m) + A * (dgamma / m) * invstd * mean;
    for (int ni = 0; ni < n; ++ni) {
      const std::size_t off = (static_cast<std::size_t>(ni) * c + ci) * plane;
      k::scale_shift(x + off, static_cast<float>(B), static_cast<float>(C), dx + off, plane);
      k::axpy(static_cast<float>(A), dy + off, dx + off, plane);
    }
  }
}

double softmax_xent(const float* logits, int classes, int label,
                    float* dlogits, float* probs) {
  if (label < 0 || label >= classes)
    throw std::invalid_argument("label out of range");
  double mx = logits[0];
  for (int i = 1; i < classes; ++i) mx = std::max(mx, static_cast<double>(logits[i]));
  double sum = 0.0;
  for (int i = 0; i < classes; ++i) sum += std::exp(static_cast<double>(logits[i]) - mx);
  const double loss = std::log(sum) + mx - static_cast<double>(logits[label]);
  if (dlogits || probs) {
    for (int i = 0; i < classes; ++i) {
      const double pi = std::exp(static_cast<double>(logits[i]) - mx) / sum;
      if (probs) probs[i] = static_cast<float>(pi);
      if (dlogits)
        dlogits[i] = static_cast<float>(pi) - (i == label ? 1.0f : 0.0f);
    }
  }
  return loss;
}

}  // namespace fulab::nn
