#include "chshlab/resources.hpp"

#include <cmath>
#include <vector>

#include "chshlab/ensembles.hpp"

namespace chshlab {

namespace {

// Entropic results may round off slightly negative; tiny deficits are
// clamped, anything worse is a real bug.
double clamp_entropy(double v, const char* what) {
  if (v < -1e-10) throw InvariantError(what);
  return std::max(v, 0.0);
}

}  // namespace

double stabilizer_entropy_pure(const StateVec& psi) {
  const auto t = pauli_expectations(psi);
  double sum = 0;
  for (double e : t) sum += e * e * e * e;
  return clamp_entropy(-std::log(sum / 4.0), "negative stabilizer entropy");
}

double stabilizer_entropy_mixed(const Mat4& rho) {
  require_hermitian(rho);
  double sum4 = 0, sum2 = 0;
  for (const Mat4& p : pauli_table()) {
    const double e = (p * rho).trace().real();
    sum2 += e * e;
    sum4 += e * e * e * e;
  }
  // sum2/4 = tr rho^2 by Pauli orthogonality.
  const double m2 = -std::log(sum4 / 4.0);
  const double s2 = -std::log(sum2 / 4.0);
  return m2 - s2;
}

bool is_free_state(const Mat4& rho, double tol) {
  require_hermitian(rho);
  // Pauli coefficients of rho scaled so a free state has phi_P in {0, +-1}.
  std::array<double, 16> phi;
  std::array<bool, 16> on;
  for (int k = 0; k < 16; ++k) {
    phi[k] = (pauli_table()[k] * rho).trace().real();
    on[k] = std::abs(phi[k]) > tol;
    if (on[k] && std::abs(std::abs(phi[k]) - 1.0) > tol) return false;
  }
  if (!on[0]) return false;  // identity coefficient is always 1
  // Support must be mutually commuting and closed under multiplication up to
  // phase.  For Pauli strings commutation and products are label arithmetic.
  auto levi_sign = [](int a, int b) {
    // 0 if commute as single-qubit Paulis, 1 if anticommute.
    if (a == 0 || b == 0 || a == b) return 0;
    return 1;
  };
  std::vector<int> support;
  for (int k = 0; k < 16; ++k)
    if (on[k]) support.push_back(k);
  auto mul_label = [](int a, int b) {
    // single-qubit label of sigma_a sigma_b up to phase
    if (a == 0) return b;
    if (b == 0) return a;
    if (a == b) return 0;
    return 6 - a - b;  // {1,2,3} pairwise products
  };
  for (int p : support) {
    for (int q : support) {
      const int pa = p / 4, pb = p % 4, qa = q / 4, qb = q % 4;
      if ((levi_sign(pa, qa) + levi_sign(pb, qb)) % 2 != 0) return false;
      const int prod = 4 * mul_label(pa, qa) + mul_label(pb, qb);
      if (!on[prod]) return false;
    }
  }
  return true;
}

double von_neumann_entropy(const Mat2& rho, LogBase base) {
  require_hermitian(rho);
  const auto [lo, hi] = eig2_hermitian(rho);
  double s = 0;
  for (double p : {lo, hi}) {
    if (p > 1e-15) s -= p * std::log(p);
  }
  return to_base(clamp_entropy(s, "negative entropy"), base);
}

double renyi2_entropy(const Mat2& rho) {
  return clamp_entropy(-std::log(purity(rho)), "negative Renyi entropy");
}

double renyi2_entropy(const Mat4& rho) {
  return clamp_entropy(-std::log(purity(rho)), "negative Renyi entropy");
}

double entanglement_capacity(const StateVec& psi) {
  const auto [lo, hi] = eig2_hermitian(reduced_a(psi));
  const double p = std::clamp(hi, 0.0, 1.0), q = std::clamp(lo, 0.0, 1.0);
  if (p < 1e-15 || q < 1e-15) return 0.0;
  const double l = std::log(q / p);
  return p * q * l * l;
}

double nonlocal_magic(const StateVec& psi) {
  const double t = schmidt_angle(psi);
  return clamp_entropy(-std::log((7.0 + std::cos(8.0 * t)) / 8.0),
                       "negative non-local magic");
}

double local_magic(const StateVec& psi) {
  const double diff = stabilizer_entropy_pure(psi) - nonlocal_magic(psi);
  if (diff < -1e-6)
    throw InvariantError("local magic is negative beyond tolerance");
  return std::max(diff, 0.0);
}

double nonstabilizing_power(const Mat4& u, LogBase base) {
  require_unitary(u);
  const auto& states = stabilizer_states();
  double acc = 0;
  for (const StateVec& s : states) {
    acc += stabilizer_entropy_pure(chshlab::apply(u, s));
  }
  return to_base(acc / static_cast<double>(states.size()), base);
}

ResourceReport resource_report(const StateVec& psi, LogBase base) {
  ResourceReport r{};
  const Mat2 rho_a = reduced_a(psi);
  r.m2 = to_base(stabilizer_entropy_pure(psi), base);
  r.s1 = von_neumann_entropy(rho_a, base);
  r.s2 = to_base(renyi2_entropy(rho_a), base);
  r.c_e = to_base(entanglement_capacity(psi), base, 2);
  r.m_nl = to_base(nonlocal_magic(psi), base);
  r.m_loc = to_base(local_magic(psi), base);
  return r;
}

}  // namespace chshlab
