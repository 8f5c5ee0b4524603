#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "pulse/errors.hpp"

namespace pulse {

/// Row-major T x C activation matrix.
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
  void zero() { std::fill(v.begin(), v.end(), 0.0); }
};

/// Named learnable tensor with gradient storage.
struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> data;
  std::vector<double> grad;

  std::size_t size() const {
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    return n;
  }
};

struct ParamSet {
  std::vector<Tensor> tensors;

  Tensor& add(std::string name, std::vector<std::size_t> shape) {
    Tensor t;
    t.name = std::move(name);
    t.shape = std::move(shape);
    t.data.assign(t.size(), 0.0);
    t.grad.assign(t.size(), 0.0);
    tensors.push_back(std::move(t));
    return tensors.back();
  }

  Tensor& find(const std::string& name) {
    for (auto& t : tensors)
      if (t.name == name) return t;
    throw ConfigError("no tensor named '" + name + "'");
  }

  const Tensor& find(const std::string& name) const {
    for (const auto& t : tensors)
      if (t.name == name) return t;
    throw ConfigError("no tensor named '" + name + "'");
  }

  std::size_t total_params() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += t.size();
    return n;
  }

  void zero_grad() {
    for (auto& t : tensors) std::fill(t.grad.begin(), t.grad.end(), 0.0);
  }
};

}  // namespace pulse
