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

#include "clozekit/tensor.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <numeric>

#include "clozekit/error.h"

namespace clozekit {
namespace {

constexpr std::array<char, 8> kMagic = {'C', 'L', 'Z', 'K', 'T', 'N', 'S', 'R'};
constexpr std::uint32_t kDtypeFloat64 = 1;
constexpr std::uint32_t kMaxRank = 8;

std::size_t Product(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<std::size_t>());
}

std::string Dims(const Matrix& m) {
  return "[" + std::to_string(m.rows()) + ", " + std::to_string(m.cols()) + "]";
}

void RequireSameShape(const char* op, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shapes " + Dims(a) + " and " + Dims(b) +
                     " differ");
  }
}

template <typename T>
void WriteLe(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T ReadLe(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw ValidationError("tensor stream truncated");
  }
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  }
  return static_cast<T>(value);
}

}  // namespace

std::string ShapeString(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(Product(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != Product(shape_)) {
    throw ShapeError("tensor of shape " + ShapeString(shape_) + " given " +
                     std::to_string(values_.size()) + " values");
  }
}

std::size_t Tensor::rows() const {
  if (shape_.size() > 2) throw ShapeError("no matrix view for shape " + ShapeString(shape_));
  return shape_.size() == 2 ? shape_[0] : 1;
}

std::size_t Tensor::cols() const {
  if (shape_.size() > 2) throw ShapeError("no matrix view for shape " + ShapeString(shape_));
  return shape_.empty() ? 1 : shape_.back();
}

MatrixMap Tensor::matrix() {
  return MatrixMap(values_.data(), static_cast<Eigen::Index>(rows()),
                   static_cast<Eigen::Index>(cols()));
}

ConstMatrixMap Tensor::matrix() const {
  return ConstMatrixMap(values_.data(), static_cast<Eigen::Index>(rows()),
                        static_cast<Eigen::Index>(cols()));
}

void Tensor::Fill(double value) { std::fill(values_.begin(), values_.end(), value); }

bool Tensor::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Tensor Tensor::FromMatrix(const Matrix& m) {
  Tensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  t.matrix() = m;
  return t;
}

Parameter::Parameter(std::string name_in, Tensor value_in, bool trainable_in)
    : name(std::move(name_in)),
      value(std::move(value_in)),
      grad(value.shape()),
      trainable(trainable_in) {}

void WriteTensor(std::ostream& out, const Tensor& tensor) {
  out.write(kMagic.data(), kMagic.size());
  WriteLe<std::uint32_t>(out, kTensorFormatVersion);
  WriteLe<std::uint32_t>(out, kDtypeFloat64);
  WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.rank()));
  for (std::size_t d : tensor.shape()) WriteLe<std::uint64_t>(out, d);
  for (double v : tensor.values()) WriteLe<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
}

Tensor ReadTensor(std::istream& in) {
  std::array<char, 8> magic;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ValidationError("bad tensor magic");
  }
  const auto version = ReadLe<std::uint32_t>(in);
  if (version != kTensorFormatVersion) {
    throw ValidationError("unsupported tensor format version " + std::to_string(version));
  }
  const auto dtype = ReadLe<std::uint32_t>(in);
  if (dtype != kDtypeFloat64) {
    throw ValidationError("unsupported tensor dtype " + std::to_string(dtype));
  }
  const auto rank = ReadLe<std::uint32_t>(in);
  if (rank > kMaxRank) throw ValidationError("tensor rank " + std::to_string(rank));
  Shape shape(rank);
  for (auto& d : shape) d = ReadLe<std::uint64_t>(in);
  std::vector<double> values(Product(shape));
  for (auto& v : values) v = std::bit_cast<double>(ReadLe<std::uint64_t>(in));
  return Tensor(std::move(shape), std::move(values));
}

Matrix MatMul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: shapes " + Dims(a) + " and " + Dims(b) + " are incompatible");
  }
  Matrix c(a.rows(), b.cols());
  c.noalias() = a * b;
  return c;
}

void MatMulBackward(const Matrix& a, const Matrix& b, const Matrix& dc, Matrix* da,
                    Matrix* db) {
  if (da) da->noalias() += dc * b.transpose();
  if (db) db->noalias() += a.transpose() * dc;
}

Matrix Add(const Matrix& a, const Matrix& b) {
  RequireSameShape("add", a, b);
  return a + b;
}

void AddBackward(const Matrix& dc, Matrix* da, Matrix* db) {
  if (da) *da += dc;
  if (db) *db += dc;
}

Matrix AddRowBroadcast(const Matrix& a, const RowVector& bias) {
  if (a.cols() != bias.cols()) {
    throw ShapeError("add_row: shapes " + Dims(a) + " and [1, " + std::to_string(bias.cols()) +
                     "] are incompatible");
  }
  return a.rowwise() + bias;
}

void AddRowBroadcastBackward(const Matrix& dc, Matrix* da, RowVector* dbias) {
  if (da) *da += dc;
  if (dbias) *dbias += dc.colwise().sum();
}

Matrix Multiply(const Matrix& a, const Matrix& b) {
  RequireSameShape("multiply", a, b);
  return a.cwiseProduct(b);
}

void MultiplyBackward(const Matrix& a, const Matrix& b, const Matrix& dc, Matrix* da,
                      Matrix* db) {
  if (da) *da += dc.cwiseProduct(b);
  if (db) *db += dc.cwiseProduct(a);
}

Matrix Sigmoid(const Matrix& x) {
  return x.unaryExpr([](double v) {
    // Split by sign so exp never overflows.
    if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

void SigmoidBackward(const Matrix& y, const Matrix& dy, Matrix* dx) {
  *dx += dy.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix()));
}

Matrix Tanh(const Matrix& x) { return x.array().tanh().matrix(); }

void TanhBackward(const Matrix& y, const Matrix& dy, Matrix* dx) {
  *dx += dy.cwiseProduct((1.0 - y.array().square()).matrix());
}

Matrix ConcatCols(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("concat: shapes " + Dims(a) + " and " + Dims(b) + " differ in rows");
  }
  Matrix c(a.rows(), a.cols() + b.cols());
  c << a, b;
  return c;
}

void ConcatColsBackward(const Matrix& dc, Eigen::Index a_cols, Matrix* da, Matrix* db) {
  if (da) *da += dc.leftCols(a_cols);
  if (db) *db += dc.rightCols(dc.cols() - a_cols);
}

RowVector Softmax(const RowVector& scores) {
  if (scores.size() == 0) return scores;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const double max = scores.maxCoeff();
  // Vectorized exp(-inf) can return a denormal rather than zero.
  RowVector e = (scores.array() == kNegInf).select(0.0, (scores.array() - max).exp()).matrix();
  return e / e.sum();
}

void SoftmaxBackward(const RowVector& y, const RowVector& dy, RowVector* dx) {
  const double dot = y.dot(dy);
  *dx += y.cwiseProduct((dy.array() - dot).matrix());
}

double LogSumExp(const RowVector& x) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (x.size() == 0) return kNegInf;
  const double max = x.maxCoeff();
  if (max == kNegInf) return kNegInf;
  return max + std::log((x.array() == kNegInf).select(0.0, (x.array() - max).exp()).sum());
}

}  // namespace clozekit
