#include "chshlab/qcore.hpp"

#include <algorithm>

namespace chshlab {

namespace {

std::array<Mat2, 4> make_pauli1() {
  const cxd i(0.0, 1.0);
  std::array<Mat2, 4> p;
  p[0] << 1, 0, 0, 1;
  p[1] << 0, 1, 1, 0;
  p[2] << 0, -i, i, 0;
  p[3] << 1, 0, 0, -1;
  return p;
}

std::array<Mat4, 16> make_pauli16() {
  std::array<Mat4, 16> t;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      t[4 * a + b] = kron(pauli1(static_cast<Pauli>(a)),
                          pauli1(static_cast<Pauli>(b)));
  return t;
}

}  // namespace

const Mat2& pauli1(Pauli p) {
  static const std::array<Mat2, 4> table = make_pauli1();
  return table[static_cast<int>(p)];
}

Mat4 pauli_matrix(PauliString s) { return pauli_table()[pauli_index(s)]; }

const std::array<Mat4, 16>& pauli_table() {
  static const std::array<Mat4, 16> table = make_pauli16();
  return table;
}

Mat2 gate_h() {
  Mat2 h;
  const double r = 1.0 / kSqrt2;
  h << r, r, r, -r;
  return h;
}

Mat2 gate_s() {
  Mat2 s;
  s << 1, 0, 0, cxd(0, 1);
  return s;
}

Mat2 gate_t() {
  Mat2 t;
  t << 1, 0, 0, std::polar(1.0, kPi / 4);
  return t;
}

Mat2 gate_ry(double theta) {
  Mat2 r;
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  r << c, -s, s, c;
  return r;
}

Mat4 gate_cx() {
  Mat4 g = Mat4::Zero();
  g(0, 0) = g(1, 1) = g(2, 3) = g(3, 2) = 1;
  return g;
}

Mat4 gate_cx_tilde() {
  Mat4 g = Mat4::Zero();
  g(0, 0) = g(2, 2) = g(1, 3) = g(3, 1) = 1;
  return g;
}

Mat4 gate_swap() {
  Mat4 g = Mat4::Zero();
  g(0, 0) = g(1, 2) = g(2, 1) = g(3, 3) = 1;
  return g;
}

Mat4 w_gate(double theta) {
  const Mat2 id = Mat2::Identity();
  return kron(gate_ry(theta), id) * gate_cx() * kron(gate_h(), id);
}

Mat4 w_tilde_gate(double theta) {
  return gate_swap() * w_gate(theta) * gate_swap();
}

StateVec::StateVec(const Vec4& amps) : a_(amps) {
  const double n2 = amps.squaredNorm();
  if (std::abs(n2 - 1.0) > kCtorTol)
    throw InvariantError("state vector is not normalized");
  a_ /= std::sqrt(n2);
}

StateVec ket00() {
  Vec4 v = Vec4::Zero();
  v(0) = 1;
  return StateVec::unchecked(v);
}

StateVec phi_plus() {
  Vec4 v = Vec4::Zero();
  v(0) = v(3) = 1.0 / kSqrt2;
  return StateVec::unchecked(v);
}

double expectation(const Mat4& obs, const StateVec& psi) {
  require_hermitian(obs);
  const cxd val = psi.amps().dot(obs * psi.amps());
  return val.real();
}

std::array<double, 16> pauli_expectations(const StateVec& psi) {
  // Reshape psi into the 2x2 amplitude matrix M(i,j) = <ij|psi>; then
  // <sA x sB> = Re tr(M^+ sA M sB^T), and each trace costs O(1) given
  // N = M^+ sA M.
  const Vec4& v = psi.amps();
  Mat2 m;
  m << v(0), v(1), v(2), v(3);
  const Mat2 mh = m.adjoint();

  std::array<double, 16> out;
  for (int a = 0; a < 4; ++a) {
    const Mat2 n = mh * pauli1(static_cast<Pauli>(a)) * m;
    const cxd n00 = n(0, 0), n01 = n(0, 1), n10 = n(1, 0), n11 = n(1, 1);
    out[4 * a + 0] = (n00 + n11).real();
    out[4 * a + 1] = (n01 + n10).real();
    out[4 * a + 2] = (cxd(0, 1) * (n10 - n01)).real();
    out[4 * a + 3] = (n00 - n11).real();
  }
  return out;
}

Mat2 partial_trace(const Mat4& rho, int keep) {
  Mat2 out;
  if (keep == 0) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out(i, j) = rho(2 * i, 2 * j) + rho(2 * i + 1, 2 * j + 1);
  } else {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out(i, j) = rho(i, j) + rho(i + 2, j + 2);
  }
  return out;
}

Mat2 reduced_a(const StateVec& psi) {
  const Vec4& v = psi.amps();
  Mat2 m;
  m << v(0), v(1), v(2), v(3);
  return m * m.adjoint();
}

std::pair<double, double> eig2_hermitian(const Mat2& h) {
  const double tr = (h(0, 0) + h(1, 1)).real();
  const double det = (h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0)).real();
  const double mid = tr / 2;
  const double disc = std::sqrt(std::max(mid * mid - det, 0.0));
  return {mid - disc, mid + disc};
}

double schmidt_angle(const StateVec& psi) {
  const auto [lo, hi] = eig2_hermitian(reduced_a(psi));
  (void)lo;
  const double c = std::sqrt(std::clamp(hi, 0.0, 1.0));
  return std::acos(std::clamp(c, 1.0 / kSqrt2, 1.0));
}

}  // namespace chshlab
