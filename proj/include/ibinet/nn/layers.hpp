#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ibinet/nn/ops.hpp"
#include "ibinet/rng.hpp"
#include "ibinet/tensor.hpp"

namespace ibinet::nn {

template <typename Scalar>
struct ParamRef {
  std::string name;
  Tensor<Scalar>* value;
  Tensor<Scalar>* grad;  // null for non-trainable state (running stats)
};

/// He-uniform initialization: U(-sqrt(6/fan_in), +sqrt(6/fan_in)).
template <typename Scalar>
void init_he_uniform(Tensor<Scalar>& t, Index fan_in, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (Index i = 0; i < t.size(); ++i)
    t.array()[i] = static_cast<Scalar>(rng.uniform(-limit, limit));
}

/// One stage of the network. forward() caches whatever backward() needs, so a
/// backward call is only valid after a train-mode forward on the same layer.
template <typename Scalar>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) = 0;
  virtual Tensor<Scalar> backward(const Tensor<Scalar>& gy) = 0;
  virtual std::vector<ParamRef<Scalar>> parameters() { return {}; }
  virtual std::vector<ParamRef<Scalar>> state() { return {}; }
  virtual std::string describe() const = 0;
};

template <typename Scalar>
class BatchNorm1d final : public Layer<Scalar> {
 public:
  BatchNorm1d(Index channels, double momentum = 0.9, double eps = 1e-5)
      : channels_(channels), momentum_(momentum), eps_(eps) {
    gamma_ = Tensor<Scalar>({channels});
    gamma_.array().setOnes();
    beta_ = Tensor<Scalar>({channels});
    running_mean_ = Tensor<Scalar>({channels});
    running_var_ = Tensor<Scalar>({channels});
    running_var_.array().setOnes();
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override {
    return batchnorm1d_forward(x, gamma_, beta_, running_mean_, running_var_, momentum_, eps_,
                               mode, mode == Mode::kTrain ? &cache_ : nullptr);
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& gy) override {
    Tensor<Scalar> gx;
    batchnorm1d_backward(gy, gamma_, cache_, &gx, &ggamma_, &gbeta_);
    return gx;
  }

  std::vector<ParamRef<Scalar>> parameters() override {
    return {{"gamma", &gamma_, &ggamma_}, {"beta", &beta_, &gbeta_}};
  }
  std::vector<ParamRef<Scalar>> state() override {
    return {{"running_mean", &running_mean_, nullptr}, {"running_var", &running_var_, nullptr}};
  }
  std::string describe() const override {
    return "batchnorm(" + std::to_string(channels_) + ")";
  }

  Tensor<Scalar>& running_mean() { return running_mean_; }
  Tensor<Scalar>& running_var() { return running_var_; }

 private:
  Index channels_;
  double momentum_, eps_;
  Tensor<Scalar> gamma_, beta_, running_mean_, running_var_;
  Tensor<Scalar> ggamma_, gbeta_;
  BatchNormCache<Scalar> cache_;
};

template <typename Scalar>
class Conv1d final : public Layer<Scalar> {
 public:
  Conv1d(Index in_channels, Index out_channels, Index kernel, Index stride, Index padding,
         Rng& rng)
      : stride_(stride), padding_(padding) {
    weight_ = Tensor<Scalar>({out_channels, in_channels, kernel});
    init_he_uniform(weight_, in_channels * kernel, rng);
    bias_ = Tensor<Scalar>({out_channels});
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override {
    if (mode == Mode::kTrain) input_ = x;
    return conv1d_forward(x, weight_, bias_, stride_, padding_);
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& gy) override {
    Tensor<Scalar> gx;
    conv1d_backward(input_, weight_, stride_, padding_, gy, &gx, &gweight_, &gbias_);
    return gx;
  }

  std::vector<ParamRef<Scalar>> parameters() override {
    return {{"weight", &weight_, &gweight_}, {"bias", &bias_, &gbias_}};
  }
  std::string describe() const override {
    return "conv(" + std::to_string(weight_.dim(0)) + ",k" + std::to_string(weight_.dim(2)) +
           ",s" + std::to_string(stride_) + ",p" + std::to_string(padding_) + ")";
  }

 private:
  Index stride_, padding_;
  Tensor<Scalar> weight_, bias_, gweight_, gbias_;
  Tensor<Scalar> input_;
};

/// Depthwise stage (per-channel kernels, bias-free) followed by a 1x1
/// pointwise mix with bias: Cin*K + Cin*Cout + Cout parameters.
template <typename Scalar>
class DepthwiseSeparableConv1d final : public Layer<Scalar> {
 public:
  DepthwiseSeparableConv1d(Index in_channels, Index out_channels, Index kernel, Index stride,
                           Index padding, Rng& rng)
      : stride_(stride), padding_(padding) {
    dw_weight_ = Tensor<Scalar>({in_channels, kernel});
    init_he_uniform(dw_weight_, kernel, rng);
    pw_weight_ = Tensor<Scalar>({out_channels, in_channels});
    init_he_uniform(pw_weight_, in_channels, rng);
    pw_bias_ = Tensor<Scalar>({out_channels});
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override {
    Tensor<Scalar> mid = depthwise_conv1d_forward(x, dw_weight_, stride_, padding_);
    Tensor<Scalar> y = pointwise_conv1d_forward(mid, pw_weight_, pw_bias_);
    if (mode == Mode::kTrain) {
      input_ = x;
      mid_ = std::move(mid);
    }
    return y;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& gy) override {
    Tensor<Scalar> gmid, gx;
    pointwise_conv1d_backward(mid_, pw_weight_, gy, &gmid, &gpw_weight_, &gpw_bias_);
    depthwise_conv1d_backward(input_, dw_weight_, stride_, padding_, gmid, &gx, &gdw_weight_);
    return gx;
  }

  std::vector<ParamRef<Scalar>> parameters() override {
    return {{"dw_weight", &dw_weight_, &gdw_weight_},
            {"pw_weight", &pw_weight_, &gpw_weight_},
            {"pw_bias", &pw_bias_, &gpw_bias_}};
  }
  std::string describe() const override {
    return "dwsep(" + std::to_string(pw_weight_.dim(0)) + ",k" +
           std::to_string(dw_weight_.dim(1)) + ",s" + std::to_string(stride_) + ",p" +
           std::to_string(padding_) + ")";
  }

 private:
  Index stride_, padding_;
  Tensor<Scalar> dw_weight_, pw_weight_, pw_bias_;
  Tensor<Scalar> gdw_weight_, gpw_weight_, gpw_bias_;
  Tensor<Scalar> input_, mid_;
};

template <typename Scalar>
class MaxPool1d final : public Layer<Scalar> {
 public:
  MaxPool1d(Index window, Index stride) : window_(window), stride_(stride) {}

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override {
    input_length_ = x.dim(2);
    return maxpool1d_forward(x, window_, stride_, mode == Mode::kTrain ? &argmax_ : nullptr);
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& gy) override {
    return maxpool1d_backward(gy, argmax_, input_length_);
  }

  std::string describe() const override {
    return "maxpool(" + std::to_string(window_) + ",s" + std::to_string(stride_) + ")";
  }

 private:
  Index window_, stride_;
  Index input_length_ = 0;
  std::vector<Index> argmax_;
};

template <typename Scalar>
class GlobalAvgPool final : public Layer<Scalar> {
 public:
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode) override {
    input_length_ = x.dim(2);
    return global_average_pool_forward(x);
  }
  Tensor<Scalar> backward(const Tensor<Scalar>& gy) override {
    return global_average_pool_backward(gy, input_length_);
  }
  std::string describe() const override { return "gap"; }

 private:
  Index input_length_ = 0;
};

template <typename Scalar>
class Flatten final : public Layer<Scalar> {
 public:
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode) override {
    shape_ = x.shape();
    return flatten_forward(x);
  }
  Tensor<Scalar> backward(const Tensor<Scalar>& gy) override { return gy.reshaped(shape_); }
  std::string describe() const override { return "flatten"; }

 private:
  std::vector<Index> shape_;
};

template <typename Scalar>
class Dense final : public Layer<Scalar> {
 public:
  Dense(Index in_features, Index out_features, Rng& rng) {
    weight_ = Tensor<Scalar>({out_features, in_features});
    init_he_uniform(weight_, in_features, rng);
    bias_ = Tensor<Scalar>({out_features});
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override {
    if (mode == Mode::kTrain) input_ = x;
    return dense_forward(x, weight_, bias_);
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& gy) override {
    Tensor<Scalar> gx;
    dense_backward(input_, weight_, gy, &gx, &gweight_, &gbias_);
    return gx;
  }

  std::vector<ParamRef<Scalar>> parameters() override {
    return {{"weight", &weight_, &gweight_}, {"bias", &bias_, &gbias_}};
  }
  std::string describe() const override {
    return "dense(" + std::to_string(weight_.dim(0)) + ")";
  }

 private:
  Tensor<Scalar> weight_, bias_, gweight_, gbias_;
  Tensor<Scalar> input_;
};

template <typename Scalar>
class Swish final : public Layer<Scalar> {
 public:
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override {
    if (mode == Mode::kTrain) {
      input_ = x;
      return swish_forward(x, &sig_);
    }
    return swish_forward<Scalar>(x, nullptr);
  }
  Tensor<Scalar> backward(const Tensor<Scalar>& gy) override {
    return swish_backward(input_, sig_, gy);
  }
  std::string describe() const override { return "swish"; }

 private:
  Tensor<Scalar> input_;
  ArrayX<Scalar> sig_;
};

template <typename Scalar>
class Relu final : public Layer<Scalar> {
 public:
  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override {
    if (mode == Mode::kTrain) input_ = x;
    return relu_forward(x);
  }
  Tensor<Scalar> backward(const Tensor<Scalar>& gy) override {
    return relu_backward(input_, gy);
  }
  std::string describe() const override { return "relu"; }

 private:
  Tensor<Scalar> input_;
};

}  // namespace ibinet::nn
