// Copyright 2026 The Clozekit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense 64-bit tensors and the handful of differentiable operations the
// reader is built from. Every operation has a forward function and a
// matching *Backward that accumulates into the caller's gradient buffers.

#ifndef CLOZEKIT_TENSOR_H_
#define CLOZEKIT_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace clozekit {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

using Shape = std::vector<std::size_t>;

std::string ShapeString(const Shape& shape);

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  // Row-major matrix view. Rank-1 tensors are viewed as one row, rank-2 as
  // themselves; higher ranks throw ShapeError.
  MatrixMap matrix();
  ConstMatrixMap matrix() const;
  std::size_t rows() const;
  std::size_t cols() const;

  void Fill(double value);
  bool AllFinite() const;

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && values_ == other.values_;
  }

  static Tensor FromMatrix(const Matrix& m);

 private:
  Shape shape_;
  std::vector<double> values_;
};

// Trainable (or frozen) value with its gradient accumulator.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Tensor value, bool trainable = true);

  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;

  void ZeroGrad() { grad.Fill(0.0); }
};

// Binary serialization: magic "CLZKTNSR", format version, dtype code (1 =
// float64), rank, dimensions, then little-endian values. Load throws
// ValidationError on a bad header.
void WriteTensor(std::ostream& out, const Tensor& tensor);
Tensor ReadTensor(std::istream& in);

inline constexpr std::uint32_t kTensorFormatVersion = 1;

// Core operations. Shape mismatches throw ShapeError naming both shapes.
// Backward functions add into non-null outputs, which must already have the
// shape of the matching input.

Matrix MatMul(const Matrix& a, const Matrix& b);
void MatMulBackward(const Matrix& a, const Matrix& b, const Matrix& dc, Matrix* da,
                    Matrix* db);

Matrix Add(const Matrix& a, const Matrix& b);
void AddBackward(const Matrix& dc, Matrix* da, Matrix* db);

// Adds `bias` (1 x n) to every row of `a` (m x n).
Matrix AddRowBroadcast(const Matrix& a, const RowVector& bias);
void AddRowBroadcastBackward(const Matrix& dc, Matrix* da, RowVector* dbias);

Matrix Multiply(const Matrix& a, const Matrix& b);
void MultiplyBackward(const Matrix& a, const Matrix& b, const Matrix& dc, Matrix* da,
                      Matrix* db);

Matrix Sigmoid(const Matrix& x);
// `y` is the forward output.
void SigmoidBackward(const Matrix& y, const Matrix& dy, Matrix* dx);

Matrix Tanh(const Matrix& x);
void TanhBackward(const Matrix& y, const Matrix& dy, Matrix* dx);

// Column-wise concatenation [a b]; rows must agree.
Matrix ConcatCols(const Matrix& a, const Matrix& b);
void ConcatColsBackward(const Matrix& dc, Eigen::Index a_cols, Matrix* da, Matrix* db);

// Softmax over a vector with the maximum subtracted first.
RowVector Softmax(const RowVector& scores);
void SoftmaxBackward(const RowVector& y, const RowVector& dy, RowVector* dx);

// log(sum(exp(x))) over the entries, stable for large magnitudes. Returns
// -infinity for an empty input or all -infinity entries.
double LogSumExp(const RowVector& x);

}  // namespace clozekit

#endif  // CLOZEKIT_TENSOR_H_
