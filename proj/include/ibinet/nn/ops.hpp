#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <vector>

#include "ibinet/tensor.hpp"

namespace ibinet::nn {

enum class Mode { kTrain, kEval };

inline Index conv_out_len(Index length, Index kernel, Index stride, Index padding) {
  const Index padded = length + 2 * padding;
  if (kernel > padded)
    throw ShapeError("conv1d: kernel " + std::to_string(kernel) + " exceeds padded length " +
                     std::to_string(padded));
  if (stride < 1) throw ShapeError("conv1d: stride must be >= 1");
  return (padded - kernel) / stride + 1;
}

/// "same" padding for odd kernels at stride 1; the floor keeps even kernels usable.
inline Index same_padding(Index kernel) { return (kernel - 1) / 2; }

// ---------------------------------------------------------------------------
// Spatial convolution (cross-correlation), im2col + GEMM.
// ---------------------------------------------------------------------------

/// Unrolls x[B,Cin,L] into a (Cin*K, B*Lout) column-major patch matrix; column
/// b*Lout + t holds the receptive field of output position (b, t).
template <typename Scalar>
MatrixX<Scalar> im2col(const Tensor<Scalar>& x, Index kernel, Index stride, Index padding) {
  const Index batch = x.dim(0), cin = x.dim(1), length = x.dim(2);
  const Index out_len = conv_out_len(length, kernel, stride, padding);
  MatrixX<Scalar> patches = MatrixX<Scalar>::Zero(cin * kernel, batch * out_len);
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < cin; ++c) {
      const Scalar* row = x.data() + (b * cin + c) * length;
      for (Index t = 0; t < out_len; ++t) {
        Scalar* col = patches.data() + (b * out_len + t) * patches.rows() + c * kernel;
        const Index start = t * stride - padding;
        for (Index k = 0; k < kernel; ++k) {
          const Index p = start + k;
          if (p >= 0 && p < length) col[k] = row[p];
        }
      }
    }
  }
  return patches;
}

/// conv1d forward: x[B,Cin,L] * w[Cout,Cin,K] + b[Cout] -> y[B,Cout,Lout].
template <typename Scalar>
Tensor<Scalar> conv1d_forward(const Tensor<Scalar>& x, const Tensor<Scalar>& w,
                              const Tensor<Scalar>& bias, Index stride, Index padding) {
  if (x.rank() != 3 || w.rank() != 3)
    throw ShapeError("conv1d: expected rank-3 input/weight, got " + shape_to_string(x.shape()) +
                     " and " + shape_to_string(w.shape()));
  if (x.dim(1) != w.dim(1))
    throw ShapeError("conv1d: input channels " + shape_to_string(x.shape()) +
                     " do not match weight " + shape_to_string(w.shape()));
  const Index batch = x.dim(0), cout = w.dim(0), cin = w.dim(1), kernel = w.dim(2);
  if (bias.size() != cout)
    throw ShapeError("conv1d: bias " + shape_to_string(bias.shape()) + " vs weight " +
                     shape_to_string(w.shape()));
  const Index out_len = conv_out_len(x.dim(2), kernel, stride, padding);

  const MatrixX<Scalar> patches = im2col(x, kernel, stride, padding);
  Eigen::Map<const RowMajorMatrix<Scalar>> wmat(w.data(), cout, cin * kernel);
  MatrixX<Scalar> ymat(cout, batch * out_len);
  ymat.noalias() = wmat * patches;

  Tensor<Scalar> y({batch, cout, out_len});
  for (Index b = 0; b < batch; ++b)
    for (Index c = 0; c < cout; ++c)
      y.channel(b, c) =
          ymat.row(c).segment(b * out_len, out_len).transpose().array() + bias[c];
  return y;
}

/// conv1d backward; fills gradients for input, weight and bias.
template <typename Scalar>
void conv1d_backward(const Tensor<Scalar>& x, const Tensor<Scalar>& w, Index stride,
                     Index padding, const Tensor<Scalar>& gy, Tensor<Scalar>* gx,
                     Tensor<Scalar>* gw, Tensor<Scalar>* gbias) {
  const Index batch = x.dim(0), cin = x.dim(1), length = x.dim(2);
  const Index cout = w.dim(0), kernel = w.dim(2);
  const Index out_len = gy.dim(2);

  MatrixX<Scalar> gymat(cout, batch * out_len);
  for (Index b = 0; b < batch; ++b)
    for (Index c = 0; c < cout; ++c)
      gymat.row(c).segment(b * out_len, out_len) = gy.channel(b, c).transpose();

  const MatrixX<Scalar> patches = im2col(x, kernel, stride, padding);
  Eigen::Map<const RowMajorMatrix<Scalar>> wmat(w.data(), cout, cin * kernel);

  *gw = Tensor<Scalar>(w.shape());
  Eigen::Map<RowMajorMatrix<Scalar>> gwmat(gw->data(), cout, cin * kernel);
  gwmat.noalias() = gymat * patches.transpose();

  *gbias = Tensor<Scalar>({cout});
  for (Index c = 0; c < cout; ++c) gbias->array()[c] = gymat.row(c).sum();

  MatrixX<Scalar> gpatches(cin * kernel, batch * out_len);
  gpatches.noalias() = wmat.transpose() * gymat;

  *gx = Tensor<Scalar>(x.shape());
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < cin; ++c) {
      Scalar* row = gx->data() + (b * cin + c) * length;
      for (Index t = 0; t < out_len; ++t) {
        const Scalar* col = gpatches.data() + (b * out_len + t) * gpatches.rows() + c * kernel;
        const Index start = t * stride - padding;
        for (Index k = 0; k < kernel; ++k) {
          const Index p = start + k;
          if (p >= 0 && p < length) row[p] += col[k];
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Depthwise and pointwise stages.
// ---------------------------------------------------------------------------

/// Depthwise conv1d: one kernel per channel, no bias (the pointwise stage that
/// always follows carries the bias). x[B,C,L] * w[C,K] -> y[B,C,Lout].
template <typename Scalar>
Tensor<Scalar> depthwise_conv1d_forward(const Tensor<Scalar>& x, const Tensor<Scalar>& w,
                                        Index stride, Index padding) {
  if (x.dim(1) != w.dim(0))
    throw ShapeError("depthwise_conv1d: channels " + shape_to_string(x.shape()) +
                     " vs weight " + shape_to_string(w.shape()));
  const Index batch = x.dim(0), channels = x.dim(1), length = x.dim(2), kernel = w.dim(1);
  const Index out_len = conv_out_len(length, kernel, stride, padding);
  Tensor<Scalar> y({batch, channels, out_len});

  ArrayX<Scalar> padded(length + 2 * padding);
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < channels; ++c) {
      padded.setZero();
      padded.segment(padding, length) = x.channel(b, c);
      auto out = y.channel(b, c);
      const Scalar* wrow = w.data() + c * kernel;
      if (stride == 1) {
        out.setZero();
        for (Index k = 0; k < kernel; ++k) out += wrow[k] * padded.segment(k, out_len);
      } else {
        for (Index t = 0; t < out_len; ++t) {
          Scalar acc = 0;
          const Scalar* base = padded.data() + t * stride;
          for (Index k = 0; k < kernel; ++k) acc += base[k] * wrow[k];
          out[t] = acc;
        }
      }
    }
  }
  return y;
}

template <typename Scalar>
void depthwise_conv1d_backward(const Tensor<Scalar>& x, const Tensor<Scalar>& w, Index stride,
                               Index padding, const Tensor<Scalar>& gy, Tensor<Scalar>* gx,
                               Tensor<Scalar>* gw) {
  const Index batch = x.dim(0), channels = x.dim(1), length = x.dim(2), kernel = w.dim(1);
  const Index out_len = gy.dim(2);
  *gx = Tensor<Scalar>(x.shape());
  *gw = Tensor<Scalar>(w.shape());

  ArrayX<Scalar> padded(length + 2 * padding);
  ArrayX<Scalar> gpadded(length + 2 * padding);
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < channels; ++c) {
      padded.setZero();
      padded.segment(padding, length) = x.channel(b, c);
      gpadded.setZero();
      const auto gout = gy.channel(b, c);
      const Scalar* wrow = w.data() + c * kernel;
      Scalar* gwrow = gw->data() + c * kernel;
      if (stride == 1) {
        for (Index k = 0; k < kernel; ++k) {
          gpadded.segment(k, out_len) += wrow[k] * gout;
          gwrow[k] += (padded.segment(k, out_len) * gout).sum();
        }
      } else {
        for (Index t = 0; t < out_len; ++t) {
          const Index base = t * stride;
          for (Index k = 0; k < kernel; ++k) {
            gpadded[base + k] += wrow[k] * gout[t];
            gwrow[k] += padded[base + k] * gout[t];
          }
        }
      }
      gx->channel(b, c) = gpadded.segment(padding, length);
    }
  }
}

/// Pointwise (1x1) conv: pure channel mixing. x[B,Cin,L] * w[Cout,Cin] + b.
template <typename Scalar>
Tensor<Scalar> pointwise_conv1d_forward(const Tensor<Scalar>& x, const Tensor<Scalar>& w,
                                        const Tensor<Scalar>& bias) {
  if (x.dim(1) != w.dim(1))
    throw ShapeError("pointwise_conv1d: channels " + shape_to_string(x.shape()) +
                     " vs weight " + shape_to_string(w.shape()));
  const Index batch = x.dim(0), cout = w.dim(0), length = x.dim(2);
  Tensor<Scalar> y({batch, cout, length});
  Eigen::Map<const RowMajorMatrix<Scalar>> wmat(w.data(), cout, x.dim(1));
  for (Index b = 0; b < batch; ++b) {
    y.item_matrix(b).noalias() = wmat * x.item_matrix(b);
    for (Index c = 0; c < cout; ++c) y.channel(b, c) += bias[c];
  }
  return y;
}

template <typename Scalar>
void pointwise_conv1d_backward(const Tensor<Scalar>& x, const Tensor<Scalar>& w,
                               const Tensor<Scalar>& gy, Tensor<Scalar>* gx, Tensor<Scalar>* gw,
                               Tensor<Scalar>* gbias) {
  const Index batch = x.dim(0), cout = w.dim(0), cin = x.dim(1);
  *gx = Tensor<Scalar>(x.shape());
  *gw = Tensor<Scalar>(w.shape());
  *gbias = Tensor<Scalar>({cout});
  Eigen::Map<const RowMajorMatrix<Scalar>> wmat(w.data(), cout, cin);
  Eigen::Map<RowMajorMatrix<Scalar>> gwmat(gw->data(), cout, cin);
  for (Index b = 0; b < batch; ++b) {
    gx->item_matrix(b).noalias() = wmat.transpose() * gy.item_matrix(b);
    gwmat.noalias() += gy.item_matrix(b) * x.item_matrix(b).transpose();
    for (Index c = 0; c < cout; ++c) gbias->array()[c] += gy.channel(b, c).sum();
  }
}

// ---------------------------------------------------------------------------
// Batch normalization over (batch, length) per channel.
// ---------------------------------------------------------------------------

template <typename Scalar>
struct BatchNormCache {
  Tensor<Scalar> xhat;
  ArrayX<Scalar> inv_std;  // per channel
};

template <typename Scalar>
Tensor<Scalar> batchnorm1d_forward(const Tensor<Scalar>& x, const Tensor<Scalar>& gamma,
                                   const Tensor<Scalar>& beta, Tensor<Scalar>& running_mean,
                                   Tensor<Scalar>& running_var, double momentum, double eps,
                                   Mode mode, BatchNormCache<Scalar>* cache) {
  if (x.rank() != 3)
    throw ShapeError("batchnorm1d: expected [batch, channels, length], got " +
                     shape_to_string(x.shape()));
  const Index batch = x.dim(0), channels = x.dim(1), length = x.dim(2);
  if (gamma.size() != channels || beta.size() != channels)
    throw ShapeError("batchnorm1d: gamma/beta " + shape_to_string(gamma.shape()) +
                     " vs channels of " + shape_to_string(x.shape()));
  if (mode == Mode::kTrain && batch < 2)
    throw ParameterError("batchnorm1d: train mode requires batch >= 2, got " +
                         std::to_string(batch));

  Tensor<Scalar> y(x.shape());
  if (cache) {
    cache->xhat = Tensor<Scalar>(x.shape());
    cache->inv_std = ArrayX<Scalar>(channels);
  }
  const double n = static_cast<double>(batch) * static_cast<double>(length);
  for (Index c = 0; c < channels; ++c) {
    double mean, var;
    if (mode == Mode::kTrain) {
      double sum = 0, sq = 0;
      for (Index b = 0; b < batch; ++b) {
        const auto row = x.channel(b, c).template cast<double>().eval();
        sum += row.sum();
        sq += row.square().sum();
      }
      mean = sum / n;
      var = sq / n - mean * mean;
      if (var < 0) var = 0;  // rounding guard
      running_mean.array()[c] = static_cast<Scalar>(momentum * running_mean.array()[c] +
                                                    (1.0 - momentum) * mean);
      running_var.array()[c] =
          static_cast<Scalar>(momentum * running_var.array()[c] + (1.0 - momentum) * var);
    } else {
      mean = running_mean.array()[c];
      var = running_var.array()[c];
    }
    const Scalar inv_std = static_cast<Scalar>(1.0 / std::sqrt(var + eps));
    const Scalar m = static_cast<Scalar>(mean);
    for (Index b = 0; b < batch; ++b) {
      const auto xhat = ((x.channel(b, c) - m) * inv_std).eval();
      y.channel(b, c) = gamma.array()[c] * xhat + beta.array()[c];
      if (cache) cache->xhat.channel(b, c) = xhat;
    }
    if (cache) cache->inv_std[c] = inv_std;
  }
  return y;
}

/// Train-mode backward. Uses the batch-statistics chain rule:
/// gx = gamma*inv_std * (gy - mean(gy) - xhat * mean(gy*xhat)).
template <typename Scalar>
void batchnorm1d_backward(const Tensor<Scalar>& gy, const Tensor<Scalar>& gamma,
                          const BatchNormCache<Scalar>& cache, Tensor<Scalar>* gx,
                          Tensor<Scalar>* ggamma, Tensor<Scalar>* gbeta) {
  const Index batch = gy.dim(0), channels = gy.dim(1), length = gy.dim(2);
  *gx = Tensor<Scalar>(gy.shape());
  *ggamma = Tensor<Scalar>({channels});
  *gbeta = Tensor<Scalar>({channels});
  const double n = static_cast<double>(batch) * static_cast<double>(length);
  for (Index c = 0; c < channels; ++c) {
    double sum_gy = 0, sum_gy_xhat = 0;
    for (Index b = 0; b < batch; ++b) {
      const auto g = gy.channel(b, c).template cast<double>().eval();
      sum_gy += g.sum();
      sum_gy_xhat += (g * cache.xhat.channel(b, c).template cast<double>()).sum();
    }
    ggamma->array()[c] = static_cast<Scalar>(sum_gy_xhat);
    gbeta->array()[c] = static_cast<Scalar>(sum_gy);
    const Scalar mean_gy = static_cast<Scalar>(sum_gy / n);
    const Scalar mean_gy_xhat = static_cast<Scalar>(sum_gy_xhat / n);
    const Scalar scale = gamma.array()[c] * cache.inv_std[c];
    for (Index b = 0; b < batch; ++b)
      gx->channel(b, c) =
          scale * (gy.channel(b, c) - mean_gy - cache.xhat.channel(b, c) * mean_gy_xhat);
  }
}

// ---------------------------------------------------------------------------
// Pooling.
// ---------------------------------------------------------------------------

template <typename Scalar>
Tensor<Scalar> maxpool1d_forward(const Tensor<Scalar>& x, Index window, Index stride,
                                 std::vector<Index>* argmax) {
  const Index batch = x.dim(0), channels = x.dim(1), length = x.dim(2);
  if (window > length)
    throw ShapeError("maxpool1d: window " + std::to_string(window) + " exceeds length of " +
                     shape_to_string(x.shape()));
  const Index out_len = (length - window) / stride + 1;
  Tensor<Scalar> y({batch, channels, out_len});
  if (argmax) argmax->assign(static_cast<std::size_t>(batch * channels * out_len), 0);
  Index idx = 0;
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < channels; ++c) {
      const Scalar* row = x.data() + (b * channels + c) * length;
      auto out = y.channel(b, c);
      for (Index t = 0; t < out_len; ++t, ++idx) {
        const Index start = t * stride;
        Index best = start;
        Scalar best_val = row[start];
        for (Index k = 1; k < window; ++k) {
          if (row[start + k] > best_val) {  // first max wins ties
            best_val = row[start + k];
            best = start + k;
          }
        }
        out[t] = best_val;
        if (argmax) (*argmax)[static_cast<std::size_t>(idx)] = best;
      }
    }
  }
  return y;
}

template <typename Scalar>
Tensor<Scalar> maxpool1d_backward(const Tensor<Scalar>& gy, const std::vector<Index>& argmax,
                                  Index input_length) {
  const Index batch = gy.dim(0), channels = gy.dim(1), out_len = gy.dim(2);
  Tensor<Scalar> gx({batch, channels, input_length});
  Index idx = 0;
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < channels; ++c) {
      Scalar* grow = gx.data() + (b * channels + c) * input_length;
      const auto gout = gy.channel(b, c);
      for (Index t = 0; t < out_len; ++t, ++idx)
        grow[argmax[static_cast<std::size_t>(idx)]] += gout[t];
    }
  }
  return gx;
}

/// Mean over the length axis: [B,C,L] -> [B,C].
template <typename Scalar>
Tensor<Scalar> global_average_pool_forward(const Tensor<Scalar>& x) {
  const Index batch = x.dim(0), channels = x.dim(1), length = x.dim(2);
  Tensor<Scalar> y({batch, channels});
  for (Index b = 0; b < batch; ++b)
    for (Index c = 0; c < channels; ++c)
      y(b, c) = static_cast<Scalar>(x.channel(b, c).template cast<double>().mean());
  return y;
}

template <typename Scalar>
Tensor<Scalar> global_average_pool_backward(const Tensor<Scalar>& gy, Index input_length) {
  const Index batch = gy.dim(0), channels = gy.dim(1);
  Tensor<Scalar> gx({batch, channels, input_length});
  for (Index b = 0; b < batch; ++b)
    for (Index c = 0; c < channels; ++c)
      gx.channel(b, c).setConstant(gy(b, c) / static_cast<Scalar>(input_length));
  return gx;
}

/// [B,C,L] -> [B,C*L].
template <typename Scalar>
Tensor<Scalar> flatten_forward(const Tensor<Scalar>& x) {
  return x.reshaped({x.dim(0), x.dim(1) * x.dim(2)});
}

// ---------------------------------------------------------------------------
// Dense.
// ---------------------------------------------------------------------------

template <typename Scalar>
Tensor<Scalar> dense_forward(const Tensor<Scalar>& x, const Tensor<Scalar>& w,
                             const Tensor<Scalar>& bias) {
  if (x.rank() != 2 || x.dim(1) != w.dim(1))
    throw ShapeError("dense: input " + shape_to_string(x.shape()) + " vs weight " +
                     shape_to_string(w.shape()));
  const Index batch = x.dim(0), fout = w.dim(0);
  Tensor<Scalar> y({batch, fout});
  Eigen::Map<const RowMajorMatrix<Scalar>> wm(w.data(), fout, w.dim(1));
  y.matrix().noalias() = x.matrix() * wm.transpose();
  y.matrix().rowwise() += Eigen::Map<const Eigen::RowVector<Scalar, Eigen::Dynamic>>(
      bias.data(), fout);
  return y;
}

template <typename Scalar>
void dense_backward(const Tensor<Scalar>& x, const Tensor<Scalar>& w, const Tensor<Scalar>& gy,
                    Tensor<Scalar>* gx, Tensor<Scalar>* gw, Tensor<Scalar>* gbias) {
  const Index fout = w.dim(0), fin = w.dim(1);
  *gx = Tensor<Scalar>(x.shape());
  *gw = Tensor<Scalar>(w.shape());
  *gbias = Tensor<Scalar>({fout});
  Eigen::Map<const RowMajorMatrix<Scalar>> wm(w.data(), fout, fin);
  Eigen::Map<RowMajorMatrix<Scalar>> gwm(gw->data(), fout, fin);
  gx->matrix().noalias() = gy.matrix() * wm;
  gwm.noalias() = gy.matrix().transpose() * x.matrix();
  Eigen::Map<Eigen::RowVector<Scalar, Eigen::Dynamic>>(gbias->data(), fout) =
      gy.matrix().colwise().sum();
}

// ---------------------------------------------------------------------------
// Activations.
// ---------------------------------------------------------------------------

template <typename Scalar>
ArrayX<Scalar> sigmoid(const ArrayX<Scalar>& x) {
  return Scalar(1) / (Scalar(1) + (-x).exp());
}

/// swish(x) = x * sigmoid(x); returns y and stores sigmoid(x) for backward.
template <typename Scalar>
Tensor<Scalar> swish_forward(const Tensor<Scalar>& x, ArrayX<Scalar>* sig_cache) {
  ArrayX<Scalar> sig = sigmoid<Scalar>(x.array());
  Tensor<Scalar> y = Tensor<Scalar>::from(x.shape(), x.array() * sig);
  if (sig_cache) *sig_cache = std::move(sig);
  return y;
}

/// d/dx swish = sigma(x) * (1 + x * (1 - sigma(x))).
template <typename Scalar>
Tensor<Scalar> swish_backward(const Tensor<Scalar>& x, const ArrayX<Scalar>& sig,
                              const Tensor<Scalar>& gy) {
  return Tensor<Scalar>::from(
      x.shape(), gy.array() * sig * (Scalar(1) + x.array() * (Scalar(1) - sig)));
}

template <typename Scalar>
Tensor<Scalar> relu_forward(const Tensor<Scalar>& x) {
  return Tensor<Scalar>::from(x.shape(), x.array().max(Scalar(0)));
}

template <typename Scalar>
Tensor<Scalar> relu_backward(const Tensor<Scalar>& x, const Tensor<Scalar>& gy) {
  return Tensor<Scalar>::from(x.shape(),
                              (x.array() > Scalar(0)).select(gy.array(), Scalar(0)));
}

}  // namespace ibinet::nn
