#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string_view>

namespace chshlab {

using cxd = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Mat16 = Eigen::Matrix<cxd, 16, 16>;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;

inline constexpr std::string_view kVersion = "0.1.0";

inline constexpr double kPi = 3.14159265358979323846;
inline const double kSqrt2 = 1.41421356237309504880;
// Quantum (Tsirelson) ceiling for CHSH: 2*sqrt(2).
inline const double kTsirelson = 2.0 * kSqrt2;

// Validation tolerance for externally constructed objects ...
inline constexpr double kCtorTol = 1e-9;
// ... and for internally produced ones.
inline constexpr double kInternalTol = 1e-12;

// Thrown when a mathematical invariant is violated (non-unitary input,
// negative magic, enumeration of unexpected size, ...).
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Mat2 dagger(const Mat2& m) { return m.adjoint(); }
inline Mat4 dagger(const Mat4& m) { return m.adjoint(); }

// Kronecker product, qubit A = left (most significant) factor.
inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

inline Vec4 kron(const Vec2& a, const Vec2& b) {
  Vec4 out;
  out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return out;
}

inline Mat16 kron(const Mat4& a, const Mat4& b) {
  Mat16 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

template <typename M>
bool is_unitary(const M& u, double tol = kCtorTol) {
  return (u * u.adjoint() - M::Identity()).cwiseAbs().maxCoeff() <= tol;
}

template <typename M>
bool is_hermitian(const M& h, double tol = kCtorTol) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

template <typename M>
void require_unitary(const M& u, double tol = kCtorTol) {
  if (!is_unitary(u, tol)) throw InvariantError("matrix is not unitary");
}

template <typename M>
void require_hermitian(const M& h, double tol = kCtorTol) {
  if (!is_hermitian(h, tol)) throw InvariantError("matrix is not Hermitian");
}

// Log base for entropy-like outputs; everything is natural log internally.
enum class LogBase { e, two };

inline double to_base(double nats, LogBase base, int power = 1) {
  if (base == LogBase::e) return nats;
  double scale = 0.69314718055994530942;  // ln 2
  double s = 1.0;
  for (int i = 0; i < power; ++i) s *= scale;
  return nats / s;
}

}  // namespace chshlab
