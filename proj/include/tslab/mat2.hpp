#pragma once

#include <cmath>
#include <complex>

#include "tslab/error.hpp"

namespace tslab {

using cplx = std::complex<double>;

/// Angular frequency in units where the wave speed is one. Never zero:
/// Prüfer-scaled Cauchy data divide the derivative by it.
class Frequency {
 public:
  explicit Frequency(cplx value) : value_(value) {
    if (value == cplx{0.0, 0.0}) raise(ErrorCode::singularity, "frequency must be nonzero");
  }
  explicit Frequency(double value) : Frequency(cplx{value, 0.0}) {}

  cplx value() const noexcept { return value_; }
  double real() const noexcept { return value_.real(); }
  double imag() const noexcept { return value_.imag(); }
  bool is_real() const noexcept { return value_.imag() == 0.0; }

 private:
  cplx value_;
};

/// Complex 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

  static constexpr Mat2 identity() { return {}; }

  cplx det() const { return a * d - b * c; }
  cplx trace() const { return a + d; }
  cplx half_trace() const { return 0.5 * (a + d); }
  double max_abs() const {
    return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
  }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend Mat2 operator*(cplx s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
  Mat2& operator*=(const Mat2& y) { return *this = *this * y; }
};

/// Frobenius norm of x - y.
inline double distance(const Mat2& x, const Mat2& y) {
  const Mat2 e = x - y;
  return std::sqrt(std::norm(e.a) + std::norm(e.b) + std::norm(e.c) + std::norm(e.d));
}

}  // namespace tslab
