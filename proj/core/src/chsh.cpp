#include "chshlab/chsh.hpp"

#include <algorithm>
#include <cmath>

#include "chshlab/ensembles.hpp"
#include "chshlab/resources.hpp"

namespace chshlab {

Mat4 materialize(const ChshSpec& s) {
  const Mat2& a = pauli1(s.pa);
  const Mat2& ap = pauli1(s.pa_prime);
  const Mat2& b = pauli1(s.pb);
  const Mat2& bp = pauli1(s.pb_prime);
  return kron(a, Mat2(b + bp)) + kron(ap, Mat2(bp - b));
}

const std::vector<ChshSpec>& chsh_family() {
  static const std::vector<ChshSpec> family = [] {
    std::vector<ChshSpec> f;
    f.reserve(81);
    const Pauli labels[3] = {Pauli::X, Pauli::Y, Pauli::Z};
    for (Pauli pa : labels)
      for (Pauli pap : labels)
        for (Pauli pb : labels)
          for (Pauli pbp : labels) f.push_back({pa, pap, pb, pbp});
    return f;
  }();
  return family;
}

ChshSpec b0_spec() { return {Pauli::X, Pauli::Z, Pauli::X, Pauli::Z}; }

const Mat4& b0_operator() {
  static const Mat4 b0 = materialize(b0_spec());
  return b0;
}

double chsh_expectation(const ChshSpec& spec, const StateVec& psi) {
  return chsh_from_pauli(pauli_expectations(psi), spec);
}

double b_of_unitary(const Mat4& u) {
  const Vec4 psi = u.col(0);  // U|00>
  return (psi.dot(b0_operator() * psi)).real();
}

StateVec r_theta_state(double theta) {
  Vec4 v = Vec4::Zero();
  v(0) = std::cos(theta);
  v(3) = std::sin(theta);
  return StateVec::unchecked(v);
}

StateVec rho_family_state(double r, double theta, double phi) {
  const double cp = std::sqrt((1.0 + r) / 2.0);
  const double cm = std::sqrt((1.0 - r) / 2.0);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  const cxd ep = std::polar(1.0, phi);
  const cxd em = std::polar(1.0, -phi);
  Vec4 v;
  v << cp * c, -cm * s * em, cp * s * ep, cm * c;
  return StateVec(v);
}

RhoFamilyValues rho_family_closed_forms(double r) {
  RhoFamilyValues out{};
  const double r2 = r * r;
  const double ln2 = 0.69314718055994530942;
  if (r >= 1.0) {
    out.s1_bits = 0.0;
    out.c_e = 0.0;
  } else {
    const double at = std::atanh(r);
    out.s1_bits = 1.0 - 0.5 * std::log2(1.0 - r2) - r * at / ln2;
    out.c_e = (1.0 - r2) * at * at;
  }
  out.m_nl = -std::log(1.0 - r2 + r2 * r2);
  out.b0 = (3.0 / 8.0) *
           (2.0 * std::sqrt(1.0 - r2) + std::sqrt(2.0 - 2.0 * r2) + kTsirelson);
  return out;
}

double horodecki_max(const StateVec& psi) {
  const auto t = pauli_expectations(psi);
  Eigen::Matrix3d corr;
  for (int i = 1; i < 4; ++i)
    for (int j = 1; j < 4; ++j) corr(i - 1, j - 1) = t[4 * i + j];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(corr.transpose() * corr);
  const auto& mu = es.eigenvalues();  // ascending
  return 2.0 * std::sqrt(std::max(mu(1) + mu(2), 0.0));
}

double tsirelson_gap(double theta, const Mat2& u_a, const Mat2& u_b) {
  const StateVec r = r_theta_state(theta);
  const StateVec rotated = chshlab::apply(kron(u_a, u_b), r);
  const double b = chsh_expectation(b0_spec(), rotated);
  return kTsirelson - 0.5 * nonlocal_magic(r) - std::abs(b);
}

namespace {

// First entry with magnitude above tol made real positive.
void fix_vector_phase(Vec4& v, double tol = 1e-9) {
  for (int i = 0; i < 4; ++i) {
    if (std::abs(v(i)) > tol) {
      v *= std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

Mat4 build_b0_eigenbasis() {
  const Mat4& b0 = b0_operator();
  const Mat4 id = Mat4::Identity();
  const double a = kTsirelson;
  // Spectral projectors from the known spectrum {-a, 0, 0, +a}.
  const Mat4 p_minus = b0 * (b0 - a * id) / (2 * a * a);
  const Mat4 p_plus = b0 * (b0 + a * id) / (2 * a * a);
  const Mat4 p_zero = id - b0 * b0 / (a * a);

  auto first_column = [](const Mat4& proj) {
    for (int j = 0; j < 4; ++j) {
      Vec4 v = proj.col(j);
      const double n = v.norm();
      if (n > 1e-6) {
        v /= n;
        fix_vector_phase(v);
        return v;
      }
    }
    throw InvariantError("empty eigenspace projector");
  };

  Mat4 basis;
  basis.col(0) = first_column(p_minus);
  basis.col(1) = first_column(p_plus);

  // Gram-Schmidt over kernel projections of the computational basis,
  // in index order.
  int filled = 2;
  for (int j = 0; j < 4 && filled < 4; ++j) {
    Vec4 v = p_zero.col(j);
    for (int k = 2; k < filled; ++k) v -= basis.col(k).dot(v) * basis.col(k);
    const double n = v.norm();
    if (n > 1e-8) {
      v /= n;
      fix_vector_phase(v);
      basis.col(filled++) = v;
    }
  }
  if (filled != 4) throw InvariantError("kernel basis construction failed");
  return basis;
}

}  // namespace

const Mat4& b0_eigenbasis() {
  static const Mat4 basis = build_b0_eigenbasis();
  return basis;
}

HurwitzCoords hurwitz_coords(const StateVec& psi) {
  const Mat4& basis = b0_eigenbasis();
  const double a1 = std::abs(basis.col(0).dot(psi.amps()));
  const double a2 = std::abs(basis.col(1).dot(psi.amps()));
  HurwitzCoords c{};
  c.theta3 = std::acos(std::clamp(a1, 0.0, 1.0));
  const double s3 = std::sin(c.theta3);
  c.theta2 = (s3 < 1e-12)
                 ? 0.0
                 : std::acos(std::clamp(a2 / s3, 0.0, 1.0));
  return c;
}

bool hurwitz_violates(const HurwitzCoords& c) {
  const double c3 = std::cos(c.theta3), s3 = std::sin(c.theta3);
  const double c2 = std::cos(c.theta2);
  return std::abs(c3 * c3 - s3 * s3 * c2 * c2) > 1.0 / kSqrt2;
}

// ---------------------------------------------------------------------------
// Theorem verifiers.
// ---------------------------------------------------------------------------

TheoremReport verify_theorem1(std::size_t n_mixtures, std::uint64_t seed) {
  const auto& states = stabilizer_states();
  const auto& family = chsh_family();

  // b is linear in the density matrix, so mixture values are convex
  // combinations of the per-state table.
  std::vector<std::array<double, 81>> table(states.size());
  double max_abs = 0;
  bool values_ok = true;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto t = pauli_expectations(states[i]);
    for (std::size_t k = 0; k < family.size(); ++k) {
      const double b = chsh_from_pauli(t, family[k]);
      table[i][k] = b;
      max_abs = std::max(max_abs, std::abs(b));
      const double nearest = std::round(std::abs(b));
      if (std::abs(std::abs(b) - nearest) > 1e-12 || nearest > 2.0)
        values_ok = false;
      ++checked;
    }
  }
  const bool pure_ok = values_ok && std::abs(max_abs - 2.0) <= 1e-12;

  Xoshiro256pp rng(seed);
  bool mix_ok = true;
  double mix_max = 0;
  for (std::size_t m = 0; m < n_mixtures; ++m) {
    const int parts = 2 + static_cast<int>(rng.next() % 7);  // 2..8 states
    std::array<std::size_t, 8> idx{};
    std::array<double, 8> w{};
    double wsum = 0;
    for (int p = 0; p < parts; ++p) {
      idx[p] = rng.next() % states.size();
      w[p] = -std::log(1.0 - rng.uniform());
      wsum += w[p];
    }
    for (std::size_t k = 0; k < family.size(); ++k) {
      double b = 0;
      for (int p = 0; p < parts; ++p) b += w[p] / wsum * table[idx[p]][k];
      mix_max = std::max(mix_max, std::abs(b));
      ++checked;
    }
  }
  if (mix_max > 2.0 + 1e-9) mix_ok = false;

  TheoremReport r{};
  r.pass = pure_ok && mix_ok;
  r.max_abs_b = std::max(max_abs, mix_max);
  r.n_checked = checked;
  r.detail = "stabilizer sweep max |b| = " + std::to_string(max_abs) +
             ", mixtures max |b| = " + std::to_string(mix_max);
  if (!r.pass) throw InvariantError("stabilizer CHSH bound violated: " + r.detail);
  return r;
}

namespace {

// Fixed basis of Hermitian operators commuting with SWAP: a full Hermitian
// basis on the triplet space plus the singlet projector.
const std::vector<Mat4>& swap_commutant_basis() {
  static const std::vector<Mat4> basis = [] {
    std::vector<Vec4> triplet(3, Vec4::Zero());
    triplet[0](0) = 1;                                      // |00>
    triplet[1](1) = triplet[1](2) = 1.0 / kSqrt2;           // (|01>+|10>)/sqrt2
    triplet[2](3) = 1;                                      // |11>
    Vec4 singlet = Vec4::Zero();
    singlet(1) = 1.0 / kSqrt2;
    singlet(2) = -1.0 / kSqrt2;

    std::vector<Mat4> b;
    for (int i = 0; i < 3; ++i)
      b.push_back(triplet[i] * triplet[i].adjoint());
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        b.push_back(triplet[i] * triplet[j].adjoint() +
                    triplet[j] * triplet[i].adjoint());
        b.push_back(cxd(0, 1) * (triplet[i] * triplet[j].adjoint() -
                                 triplet[j] * triplet[i].adjoint()));
      }
    b.push_back(singlet * singlet.adjoint());
    return b;
  }();
  return basis;
}

}  // namespace

TheoremReport verify_theorem2(std::size_t n_samples, Xoshiro256pp& rng) {
  const auto& basis = swap_commutant_basis();
  std::vector<ChshSpec> symmetric;
  for (const ChshSpec& s : chsh_family())
    if (s.pa == s.pb && s.pa_prime == s.pb_prime) symmetric.push_back(s);

  double max_abs = 0;
  std::size_t checked = 0;
  for (std::size_t n = 0; n < n_samples; ++n) {
    Mat4 h = Mat4::Zero();
    for (const Mat4& s : basis) h += rng.normal() * s;
    Eigen::SelfAdjointEigenSolver<Mat4> es(h);
    Vec4 phases;
    for (int k = 0; k < 4; ++k) phases(k) = std::polar(1.0, -es.eigenvalues()(k));
    const Mat4 u = es.eigenvectors() * phases.asDiagonal() *
                   es.eigenvectors().adjoint();
    const StateVec psi = chshlab::apply(u, ket00());
    const auto t = pauli_expectations(psi);
    for (const ChshSpec& s : symmetric) {
      max_abs = std::max(max_abs, std::abs(chsh_from_pauli(t, s)));
      ++checked;
    }
  }

  TheoremReport r{};
  r.pass = max_abs <= 2.0 + 1e-9;
  r.max_abs_b = max_abs;
  r.n_checked = checked;
  r.detail = "symmetric-unitary sweep max |b| = " + std::to_string(max_abs);
  if (!r.pass)
    throw InvariantError("symmetric CHSH bound violated: " + r.detail);
  return r;
}

TheoremReport verify_theorem3(std::size_t theta_grid, std::size_t n_haar,
                              std::uint64_t seed) {
  const auto& c1 = clifford1();
  const auto& family = chsh_family();

  std::vector<Mat4> pairs;
  pairs.reserve(c1.size() * c1.size());
  for (const Mat2& ca : c1)
    for (const Mat2& cb : c1) pairs.push_back(kron(ca, cb));

  double max_abs = 0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < theta_grid; ++i) {
    const double theta =
        (kPi / 2) * static_cast<double>(i) /
        static_cast<double>(theta_grid > 1 ? theta_grid - 1 : 1);
    const Vec4 base = r_theta_state(theta).amps();
    for (const Mat4& g : pairs) {
      const auto t = pauli_expectations(StateVec::unchecked(g * base));
      for (const ChshSpec& s : family) {
        max_abs = std::max(max_abs, std::abs(chsh_from_pauli(t, s)));
        ++checked;
      }
    }
  }
  const bool grid_ok = max_abs <= 2.0 + 1e-12;

  // Haar states with appreciable non-local magic sit strictly below the
  // Tsirelson ceiling, by at least half their non-local magic.
  bool haar_ok = true;
  double min_margin = kTsirelson;
  for (std::size_t n = 0; n < n_haar; ++n) {
    Xoshiro256pp rng(seed, n);
    const StateVec psi = haar_state(rng);
    const double m_nl = nonlocal_magic(psi);
    if (m_nl <= 0.01) continue;
    const double h = horodecki_max(psi);
    min_margin = std::min(min_margin, kTsirelson - h);
    if (h >= kTsirelson - 1e-6 || h > kTsirelson - 0.5 * m_nl + 1e-6) {
      haar_ok = false;
      break;
    }
    ++checked;
  }

  TheoremReport r{};
  r.pass = grid_ok && haar_ok;
  r.max_abs_b = max_abs;
  r.n_checked = checked;
  r.detail = "local-Clifford sweep max |b| = " + std::to_string(max_abs) +
             ", min Tsirelson margin over magic-bearing Haar states = " +
             std::to_string(min_margin);
  if (!r.pass)
    throw InvariantError("local-Clifford CHSH bound violated: " + r.detail);
  return r;
}

}  // namespace chshlab
