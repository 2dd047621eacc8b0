#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace wpnav {

// Dense row-major matrix of doubles. Vectors are 1 x n rows.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  static Tensor row(std::initializer_list<double> values) {
    Tensor t(1, values.size());
    t.data.assign(values);
    return t;
  }
  static Tensor row(const std::vector<double>& values) {
    Tensor t(1, values.size());
    t.data = values;
    return t;
  }

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  void zero() { std::fill(data.begin(), data.end(), 0.0); }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

}  // namespace wpnav
