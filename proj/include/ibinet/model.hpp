#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ibinet/nn/layers.hpp"
#include "ibinet/nn/optim.hpp"

namespace ibinet {

enum class Activation { kNone, kSwish, kRelu };

/// One entry of the architecture description. `channels` is the output
/// channel count for conv kinds and the width for dense.
struct LayerSpec {
  enum class Kind { kBatchNorm, kConv, kDwSepConv, kMaxPool, kGlobalAvgPool, kFlatten, kDense };
  Kind kind;
  Index channels = 0;
  Index kernel = 0;
  Index stride = 1;
  Index pool = 0;
  Activation activation = Activation::kNone;
};

struct StageShape {
  Index channels = 0;
  Index length = 0;  // 0 once the stack has collapsed to features
  bool flat = false;
};

struct ArchConfig {
  Index input_channels = 1;
  Index input_length = 4910;
  std::vector<LayerSpec> layers;

  /// Default IBI regressor: an initial batch norm, one spatial conv, four
  /// depthwise-separable blocks with swish, global average pooling and a
  /// three-stage dense head ending in the 7-wide linear output.
  static ArchConfig mibinet() {
    ArchConfig c;
    c.layers = {
        {LayerSpec::Kind::kBatchNorm},
        {LayerSpec::Kind::kConv, 32, 15, 2, 0, Activation::kSwish},
        {LayerSpec::Kind::kMaxPool, 0, 0, 1, 2},
        {LayerSpec::Kind::kDwSepConv, 64, 9, 1, 0, Activation::kSwish},
        {LayerSpec::Kind::kMaxPool, 0, 0, 1, 2},
        {LayerSpec::Kind::kDwSepConv, 128, 9, 1, 0, Activation::kSwish},
        {LayerSpec::Kind::kMaxPool, 0, 0, 1, 2},
        {LayerSpec::Kind::kDwSepConv, 128, 7, 1, 0, Activation::kSwish},
        {LayerSpec::Kind::kMaxPool, 0, 0, 1, 2},
        {LayerSpec::Kind::kDwSepConv, 256, 5, 1, 0, Activation::kSwish},
        {LayerSpec::Kind::kGlobalAvgPool},
        {LayerSpec::Kind::kDense, 1600, 0, 1, 0, Activation::kRelu},
        {LayerSpec::Kind::kDense, 384, 0, 1, 0, Activation::kRelu},
        {LayerSpec::Kind::kDense, 7},
    };
    return c;
  }

  /// Walks the stack symbolically, throwing an ArchitectureError that names
  /// the offending layer if any stage degenerates.
  std::vector<StageShape> infer_shapes() const {
    std::vector<StageShape> shapes;
    StageShape cur{input_channels, input_length, false};
    if (layers.empty()) throw ArchitectureError("architecture has no layers");
    if (layers.front().kind != LayerSpec::Kind::kBatchNorm)
      throw ArchitectureError("first layer must be batch normalization");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const LayerSpec& spec = layers[i];
      const std::string where = "layer " + std::to_string(i);
      switch (spec.kind) {
        case LayerSpec::Kind::kBatchNorm:
          if (cur.flat) throw ArchitectureError(where + ": batchnorm after flatten");
          break;
        case LayerSpec::Kind::kConv:
        case LayerSpec::Kind::kDwSepConv: {
          if (cur.flat) throw ArchitectureError(where + ": conv after flatten");
          const Index pad = nn::same_padding(spec.kernel);
          const Index out =
              (cur.length + 2 * pad - spec.kernel) / spec.stride + 1;
          if (cur.length + 2 * pad < spec.kernel || out < 1)
            throw ArchitectureError(where + ": kernel " + std::to_string(spec.kernel) +
                                    " produces non-positive length from " +
                                    std::to_string(cur.length));
          cur.length = out;
          cur.channels = spec.channels;
          break;
        }
        case LayerSpec::Kind::kMaxPool: {
          if (cur.flat) throw ArchitectureError(where + ": pool after flatten");
          if (spec.pool > cur.length)
            throw ArchitectureError(where + ": pool window " + std::to_string(spec.pool) +
                                    " exceeds length " + std::to_string(cur.length));
          cur.length = (cur.length - spec.pool) / spec.pool + 1;
          break;
        }
        case LayerSpec::Kind::kGlobalAvgPool:
          if (cur.flat) throw ArchitectureError(where + ": pool after flatten");
          cur.flat = true;
          cur.length = 0;
          break;
        case LayerSpec::Kind::kFlatten:
          if (cur.flat) throw ArchitectureError(where + ": flatten applied twice");
          cur.channels = cur.channels * cur.length;
          cur.length = 0;
          cur.flat = true;
          break;
        case LayerSpec::Kind::kDense:
          if (!cur.flat)
            throw ArchitectureError(where + ": dense requires flattened features");
          if (spec.channels < 1)
            throw ArchitectureError(where + ": dense width must be positive");
          cur.channels = spec.channels;
          break;
      }
      shapes.push_back(cur);
    }
    if (layers.back().kind != LayerSpec::Kind::kDense || layers.back().channels != 7)
      throw ArchitectureError("final layer must be a dense head of width 7");
    return shapes;
  }
};

/// Sequential network instantiated from an ArchConfig. Parameter
/// initialization consumes the seed in declaration order, so identical
/// (config, seed) builds are identical networks.
template <typename Scalar>
class Model {
 public:
  Model(ArchConfig config, std::uint64_t seed) : config_(std::move(config)) {
    const auto shapes = config_.infer_shapes();
    Rng rng(seed);
    StageShape cur{config_.input_channels, config_.input_length, false};
    for (std::size_t i = 0; i < config_.layers.size(); ++i) {
      const LayerSpec& spec = config_.layers[i];
      switch (spec.kind) {
        case LayerSpec::Kind::kBatchNorm:
          layers_.push_back(std::make_unique<nn::BatchNorm1d<Scalar>>(cur.channels));
          break;
        case LayerSpec::Kind::kConv:
          layers_.push_back(std::make_unique<nn::Conv1d<Scalar>>(
              cur.channels, spec.channels, spec.kernel, spec.stride,
              nn::same_padding(spec.kernel), rng));
          break;
        case LayerSpec::Kind::kDwSepConv:
          layers_.push_back(std::make_unique<nn::DepthwiseSeparableConv1d<Scalar>>(
              cur.channels, spec.channels, spec.kernel, spec.stride,
              nn::same_padding(spec.kernel), rng));
          break;
        case LayerSpec::Kind::kMaxPool:
          layers_.push_back(std::make_unique<nn::MaxPool1d<Scalar>>(spec.pool, spec.pool));
          break;
        case LayerSpec::Kind::kGlobalAvgPool:
          layers_.push_back(std::make_unique<nn::GlobalAvgPool<Scalar>>());
          break;
        case LayerSpec::Kind::kFlatten:
          layers_.push_back(std::make_unique<nn::Flatten<Scalar>>());
          break;
        case LayerSpec::Kind::kDense:
          layers_.push_back(std::make_unique<nn::Dense<Scalar>>(cur.channels, spec.channels, rng));
          break;
      }
      switch (spec.activation) {
        case Activation::kSwish:
          layers_.push_back(std::make_unique<nn::Swish<Scalar>>());
          break;
        case Activation::kRelu:
          layers_.push_back(std::make_unique<nn::Relu<Scalar>>());
          break;
        case Activation::kNone:
          break;
      }
      cur = shapes[i];
    }
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& batch, nn::Mode mode) {
    if (batch.rank() != 3 || batch.dim(1) != config_.input_channels ||
        batch.dim(2) != config_.input_length)
      throw ShapeError("model: expected input [B," + std::to_string(config_.input_channels) +
                       "," + std::to_string(config_.input_length) + "], got " +
                       shape_to_string(batch.shape()));
    Tensor<Scalar> x = batch;
    for (auto& layer : layers_) x = layer->forward(x, mode);
    return x;
  }

  /// Propagates the loss gradient back through the stack; valid only after a
  /// train-mode forward. Returns the gradient with respect to the input.
  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) {
    Tensor<Scalar> g = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
    return g;
  }

  std::vector<nn::ParamRef<Scalar>> parameters() {
    return collect(&nn::Layer<Scalar>::parameters);
  }
  std::vector<nn::ParamRef<Scalar>> state() { return collect(&nn::Layer<Scalar>::state); }

  /// Trainable parameters plus running statistics, in declaration order; the
  /// serialization order of checkpoints.
  std::vector<nn::ParamRef<Scalar>> all_tensors() {
    auto refs = parameters();
    auto st = state();
    refs.insert(refs.end(), st.begin(), st.end());
    return refs;
  }

  Index param_count() {
    Index n = 0;
    for (const auto& p : parameters()) n += p.value->size();
    return n;
  }

  const ArchConfig& config() const { return config_; }
  std::size_t layer_count() const { return layers_.size(); }

 private:
  std::vector<nn::ParamRef<Scalar>> collect(
      std::vector<nn::ParamRef<Scalar>> (nn::Layer<Scalar>::*getter)()) {
    std::vector<nn::ParamRef<Scalar>> out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      for (auto& p : ((*layers_[i]).*getter)()) {
        std::string idx = std::to_string(i);
        if (idx.size() < 2) idx.insert(0, 2 - idx.size(), '0');
        p.name = "L" + idx + "." + p.name;
        out.push_back(p);
      }
    }
    return out;
  }

  ArchConfig config_;
  std::vector<std::unique_ptr<nn::Layer<Scalar>>> layers_;
};

template <typename Scalar>
Model<Scalar> build_mibinet(const ArchConfig& config, std::uint64_t seed) {
  return Model<Scalar>(config, seed);
}

}  // namespace ibinet
