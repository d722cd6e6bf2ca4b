#pragma once

#include <cstddef>
#include <vector>

#include "scgan/common.hpp"

namespace scgan {

// Dense NCHW tensor of doubles. This is the unit of all network computation;
// image-domain types convert to and from it at the pipeline boundary.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int n, int c, int h, int w)
      : n_(n), c_(c), h_(h), w_(w),
        v_(static_cast<std::size_t>(n) * c * h * w, 0.0) {
    check(n >= 0 && c >= 0 && h >= 0 && w >= 0, "Tensor: negative dimension");
  }

  int n() const { return n_; }
  int c() const { return c_; }
  int h() const { return h_; }
  int w() const { return w_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  real* data() { return v_.data(); }
  const real* data() const { return v_.data(); }
  std::vector<real>& values() { return v_; }
  const std::vector<real>& values() const { return v_; }

  real& operator[](std::size_t i) { return v_[i]; }
  real operator[](std::size_t i) const { return v_[i]; }

  real& at(int n, int c, int y, int x) {
    return v_[idx(n, c, y, x)];
  }
  real at(int n, int c, int y, int x) const {
    return v_[idx(n, c, y, x)];
  }

  bool same_shape(const Tensor& o) const {
    return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
  }

  void fill(real x) {
    for (auto& e : v_) e = x;
  }

  real mean() const {
    check(!v_.empty(), "Tensor::mean on empty tensor");
    real s = 0.0;
    for (real e : v_) s += e;
    return s / static_cast<real>(v_.size());
  }

  real mean_sq() const {
    check(!v_.empty(), "Tensor::mean_sq on empty tensor");
    real s = 0.0;
    for (real e : v_) s += e * e;
    return s / static_cast<real>(v_.size());
  }

  bool all_finite() const {
    for (real e : v_) {
      if (!std::isfinite(e)) return false;
    }
    return true;
  }

 private:
  std::size_t idx(int n, int c, int y, int x) const {
    return ((static_cast<std::size_t>(n) * c_ + c) * h_ + y) * w_ + x;
  }

  int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
  std::vector<real> v_;
};

inline Tensor operator-(const Tensor& a, const Tensor& b) {
  check(a.same_shape(b), "Tensor subtraction: shape mismatch");
  Tensor r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

inline Tensor operator+(const Tensor& a, const Tensor& b) {
  check(a.same_shape(b), "Tensor addition: shape mismatch");
  Tensor r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

inline void axpy(real alpha, const Tensor& x, Tensor& y) {
  check(x.same_shape(y), "axpy: shape mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

// Mean of squared differences; the workhorse of every loss in this project.
inline real mean_squared_diff(const Tensor& a, const Tensor& b) {
  check(a.same_shape(b), "mean_squared_diff: shape mismatch");
  check(!a.empty(), "mean_squared_diff: empty tensor");
  real s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const real d = a[i] - b[i];
    s += d * d;
  }
  return s / static_cast<real>(a.size());
}

inline real mean_squared_vs(const Tensor& a, real target) {
  check(!a.empty(), "mean_squared_vs: empty tensor");
  real s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const real d = a[i] - target;
    s += d * d;
  }
  return s / static_cast<real>(a.size());
}

}  // namespace scgan
