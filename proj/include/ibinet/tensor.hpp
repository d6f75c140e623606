#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ibinet/errors.hpp"

namespace ibinet {

using Index = Eigen::Index;

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMajorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::string shape_to_string(const std::vector<Index>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

/// Dense tensor of rank 1-3 over a contiguous buffer, C-order layout:
/// a 3-D tensor (batch, channels, length) stores element (b, c, l) at
/// flat index (b * channels + c) * length + l. Shapes are fixed at
/// construction; the buffer is an Eigen array so elementwise expressions
/// apply directly.
template <typename Scalar>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<Index> shape) : shape_(std::move(shape)) {
    data_ = ArrayX<Scalar>::Zero(element_count(shape_));
  }

  Tensor(std::initializer_list<Index> shape) : Tensor(std::vector<Index>(shape)) {}

  static Tensor zeros(std::vector<Index> shape) { return Tensor(std::move(shape)); }

  static Tensor from(std::vector<Index> shape, ArrayX<Scalar> values) {
    Tensor t;
    if (values.size() != element_count(shape))
      throw ShapeError("Tensor::from: buffer of size " + std::to_string(values.size()) +
                       " does not fill shape " + shape_to_string(shape));
    t.shape_ = std::move(shape);
    t.data_ = std::move(values);
    return t;
  }

  const std::vector<Index>& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index dim(Index i) const { return shape_.at(static_cast<std::size_t>(i)); }
  Index size() const { return data_.size(); }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }

  ArrayX<Scalar>& array() { return data_; }
  const ArrayX<Scalar>& array() const { return data_; }

  Scalar& operator()(Index b, Index c, Index l) { return data_[flat3(b, c, l)]; }
  Scalar operator()(Index b, Index c, Index l) const { return data_[flat3(b, c, l)]; }
  Scalar& operator()(Index r, Index c) { return data_[r * dim(1) + c]; }
  Scalar operator()(Index r, Index c) const { return data_[r * dim(1) + c]; }
  Scalar& operator[](Index i) { return data_[i]; }
  Scalar operator[](Index i) const { return data_[i]; }

  /// Contiguous view of one (batch, channel) row of a rank-3 tensor.
  Eigen::Map<ArrayX<Scalar>> channel(Index b, Index c) {
    return {data() + flat3(b, c, 0), dim(2)};
  }
  Eigen::Map<const ArrayX<Scalar>> channel(Index b, Index c) const {
    return {data() + flat3(b, c, 0), dim(2)};
  }

  /// Rank-2 tensor viewed as a row-major (rows, cols) matrix.
  Eigen::Map<RowMajorMatrix<Scalar>> matrix() {
    require_rank(2);
    return {data(), dim(0), dim(1)};
  }
  Eigen::Map<const RowMajorMatrix<Scalar>> matrix() const {
    require_rank(2);
    return {data(), dim(0), dim(1)};
  }

  /// One batch item of a rank-3 tensor as a row-major (channels, length) matrix.
  Eigen::Map<RowMajorMatrix<Scalar>> item_matrix(Index b) {
    require_rank(3);
    return {data() + b * dim(1) * dim(2), dim(1), dim(2)};
  }
  Eigen::Map<const RowMajorMatrix<Scalar>> item_matrix(Index b) const {
    require_rank(3);
    return {data() + b * dim(1) * dim(2), dim(1), dim(2)};
  }

  Tensor reshaped(std::vector<Index> shape) const {
    return Tensor::from(std::move(shape), data_);
  }

  void set_zero() { data_.setZero(); }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  /// Converts elementwise to another scalar type (float <-> double shadowing).
  template <typename Other>
  Tensor<Other> cast() const {
    return Tensor<Other>::from(shape_, data_.template cast<Other>());
  }

  static Index element_count(const std::vector<Index>& shape) {
    Index n = 1;
    for (Index d : shape) {
      if (d < 0) throw ShapeError("Tensor: negative dimension in " + shape_to_string(shape));
      n *= d;
    }
    return n;
  }

 private:
  Index flat3(Index b, Index c, Index l) const { return (b * dim(1) + c) * dim(2) + l; }

  void require_rank(Index r) const {
    if (rank() != r)
      throw ShapeError("Tensor: expected rank " + std::to_string(r) + ", got shape " +
                       shape_to_string(shape_));
  }

  std::vector<Index> shape_;
  ArrayX<Scalar> data_;
};

/// Throws a ShapeError naming both shapes when they differ.
template <typename Scalar>
void require_same_shape(const Tensor<Scalar>& a, const Tensor<Scalar>& b, const char* where) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(where) + ": shape mismatch " + shape_to_string(a.shape()) +
                     " vs " + shape_to_string(b.shape()));
}

}  // namespace ibinet
