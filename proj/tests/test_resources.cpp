#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "chshlab/chsh.hpp"
#include "chshlab/common.hpp"
#include "chshlab/ensembles.hpp"
#include "chshlab/qcore.hpp"
#include "chshlab/resources.hpp"
#include "chshlab/rng.hpp"
#include "oracles.hpp"

namespace {

using namespace chshlab;

TEST(StabilizerEntropyTest, ZeroOnAllStabilizerStates) {
  EXPECT_NEAR(stabilizer_entropy_pure(ket00()), 0.0, 1e-12);
  EXPECT_NEAR(stabilizer_entropy_pure(phi_plus()), 0.0, 1e-12);
  for (const StateVec& s : stabilizer_states())
    EXPECT_LE(std::abs(stabilizer_entropy_pure(s)), 1e-12);
}

TEST(StabilizerEntropyTest, WStateClosedForm) {
  // M2( W(t)|00> ) = -ln[(7 + cos 4t)/8].
  for (int i = 0; i <= 180; ++i) {
    const double t = 2.0 * kPi * i / 180.0;
    const double want = -std::log((7.0 + std::cos(4.0 * t)) / 8.0);
    const double got =
        stabilizer_entropy_pure(chshlab::apply(w_gate(t), ket00()));
    EXPECT_NEAR(got, want, 1e-12) << "theta = " << t;
  }
  // Peak value ln(4/3) at t = pi/4.
  EXPECT_NEAR(stabilizer_entropy_pure(chshlab::apply(w_gate(kPi / 4), ket00())),
              std::log(4.0 / 3.0), 1e-12);
}

TEST(StabilizerEntropyTest, MixedStateExtension) {
  // Maximally mixed and stabilizer dyads are at zero.
  EXPECT_NEAR(stabilizer_entropy_mixed(0.25 * Mat4::Identity()), 0.0, 1e-12);
  EXPECT_NEAR(stabilizer_entropy_mixed(dyad(ket00())), 0.0, 1e-12);
  EXPECT_NEAR(stabilizer_entropy_mixed(dyad(phi_plus())), 0.0, 1e-12);
  // On a pure dyad the extension reduces to the pure value (S2 = 0).
  const StateVec psi = chshlab::apply(w_gate(kPi / 4), ket00());
  EXPECT_NEAR(stabilizer_entropy_mixed(dyad(psi)),
              stabilizer_entropy_pure(psi), 1e-12);
}

TEST(FreeStateTest, MembershipAndMixedMagicAgree) {
  const double tol = 1e-9;
  EXPECT_TRUE(is_free_state(0.25 * Mat4::Identity(), tol));
  EXPECT_TRUE(is_free_state(dyad(ket00()), tol));
  EXPECT_TRUE(is_free_state(dyad(phi_plus()), tol));
  // (II + ZZ)/4: uniform signed sum over the closed set {II, ZZ}.
  const Mat4 zz = pauli_matrix({Pauli::Z, Pauli::Z});
  EXPECT_TRUE(is_free_state(0.25 * (Mat4::Identity() + zz), tol));
  // (II + XI)/4 = |+><+| x I/2.
  const Mat4 xi = pauli_matrix({Pauli::X, Pauli::I});
  EXPECT_TRUE(is_free_state(0.25 * (Mat4::Identity() + xi), tol));

  const Mat4 magic = dyad(chshlab::apply(w_gate(kPi / 4), ket00()));
  EXPECT_FALSE(is_free_state(magic, tol));
  EXPECT_FALSE(
      is_free_state(0.9 * dyad(ket00()) + 0.1 * 0.25 * Mat4::Identity(), tol));

  // Non-uniform stabilizer mixture: membership and the mixed monotone agree
  // that it is not free.
  const Mat4 rho = 0.5 * dyad(ket00()) + 0.5 * dyad(phi_plus());
  EXPECT_FALSE(is_free_state(rho, tol));
  EXPECT_GT(stabilizer_entropy_mixed(rho), 0.2);
  // And both agree free states carry no mixed magic.
  EXPECT_NEAR(stabilizer_entropy_mixed(0.25 * (Mat4::Identity() + zz)), 0.0,
              1e-12);
}

TEST(EntropyTest, ClosedFormsOnTwoPointSpectra) {
  for (double p : {0.5, 0.7, 0.9, 0.999}) {
    Mat2 rho = Mat2::Zero();
    rho(0, 0) = p;
    rho(1, 1) = 1.0 - p;
    const double h = -(p * std::log(p) + (1 - p) * std::log(1 - p));
    EXPECT_NEAR(von_neumann_entropy(rho), h, 1e-12);
    EXPECT_NEAR(von_neumann_entropy(rho, LogBase::two), h / std::log(2.0),
                1e-12);
    EXPECT_NEAR(renyi2_entropy(rho), -std::log(p * p + (1 - p) * (1 - p)),
                1e-12);
  }
  Mat2 pure = Mat2::Zero();
  pure(0, 0) = 1.0;
  EXPECT_NEAR(von_neumann_entropy(pure), 0.0, 1e-12);
  EXPECT_NEAR(renyi2_entropy(Mat2(0.5 * Mat2::Identity())), std::log(2.0),
              1e-12);
  EXPECT_NEAR(renyi2_entropy(Mat4(0.25 * Mat4::Identity())), std::log(4.0),
              1e-12);
  EXPECT_NEAR(renyi2_entropy(dyad(ket00())), 0.0, 1e-12);

  // Capacity: spectrum {p, 1-p} gives p(1-p) ln^2((1-p)/p); zero at the
  // flat and pure ends.
  for (double t : {0.2, 0.5, 0.7}) {
    const StateVec psi = r_theta_state(t);
    const double p = std::cos(t) * std::cos(t);
    const double want =
        p * (1 - p) * std::pow(std::log((1 - p) / p), 2);
    EXPECT_NEAR(entanglement_capacity(psi), want, 1e-9);
  }
  EXPECT_NEAR(entanglement_capacity(phi_plus()), 0.0, 1e-12);
  EXPECT_NEAR(entanglement_capacity(ket00()), 0.0, 1e-12);
}

TEST(NonlocalMagicTest, ClosedFormAndLocalUnitaryInvariance) {
  for (int i = 0; i <= 40; ++i) {
    const double t = (kPi / 4) * i / 40.0;
    const StateVec psi = r_theta_state(t);
    const double want = -std::log((7.0 + std::cos(8.0 * t)) / 8.0);
    EXPECT_NEAR(nonlocal_magic(psi), want, 1e-12);
    // Invariant under local unitaries.
    const Mat2 ua = gate_ry(0.3) * gate_s() * gate_h();
    const Mat2 ub = gate_ry(-1.1) * gate_t();
    EXPECT_NEAR(nonlocal_magic(chshlab::apply(kron(ua, ub), psi)), want,
                1e-12);
  }
  // W(t)|00> is a local rotation of a maximally entangled state, so its
  // non-local magic vanishes: all of its magic is local.
  for (double t : {0.3, kPi / 4, 1.2})
    EXPECT_NEAR(nonlocal_magic(chshlab::apply(w_gate(t), ket00())), 0.0, 1e-10);
}

TEST(NonlocalMagicTest, MatchesVariationalMinimum) {
  // The closed form must coincide with a direct minimization of M2 over
  // local-unitary orbits.
  std::vector<StateVec> states;
  states.push_back(r_theta_state(0.4));
  states.push_back(r_theta_state(kPi / 8));
  for (std::uint64_t i = 0; i < 4; ++i) {
    Xoshiro256pp rng(5, i);
    states.push_back(haar_state(rng));
  }
  for (const StateVec& psi : states) {
    const double closed = nonlocal_magic(psi);
    const double found = oracle::variational_nonlocal_magic(psi);
    EXPECT_GE(found, closed - 1e-9);   // closed form is the true minimum
    EXPECT_LE(found, closed + 2e-3);   // and the search gets close to it
  }
}

TEST(LocalMagicTest, SplitsTotalMagic) {
  // r(t) states: all magic non-local.
  for (double t : {0.1, 0.5, kPi / 4})
    EXPECT_NEAR(local_magic(r_theta_state(t)), 0.0, 1e-10);
  // W(t)|00>: all magic local.
  for (double t : {0.3, kPi / 4}) {
    const StateVec psi = chshlab::apply(w_gate(t), ket00());
    EXPECT_NEAR(local_magic(psi), stabilizer_entropy_pure(psi), 1e-10);
  }
  // Nonnegative on generic states.
  for (std::uint64_t i = 0; i < 50; ++i) {
    Xoshiro256pp rng(6, i);
    EXPECT_GE(local_magic(haar_state(rng)), 0.0);
  }
}

TEST(NonstabilizingPowerTest, ClosedFormAndDirectAverage) {
  // power(W(t)) = -(4/5) ln[(7 + cos 4t)/8].
  for (int i = 0; i <= 90; ++i) {
    const double t = 2.0 * kPi * i / 90.0;
    const double want = -(4.0 / 5.0) * std::log((7.0 + std::cos(4.0 * t)) / 8.0);
    EXPECT_NEAR(nonstabilizing_power(w_gate(t)), want, 1e-10);
  }
  // Direct average over the 60 stabilizer states.
  const Mat4 u = w_gate(kPi / 3);
  double acc = 0.0;
  for (const StateVec& s : stabilizer_states())
    acc += stabilizer_entropy_pure(chshlab::apply(u, s));
  acc /= static_cast<double>(stabilizer_states().size());
  EXPECT_NEAR(nonstabilizing_power(u), acc, 1e-12);
  // Base-2 value at pi/4: (4/5) log2(4/3).
  EXPECT_NEAR(nonstabilizing_power(w_gate(kPi / 4), LogBase::two),
              0.8 * std::log2(4.0 / 3.0), 1e-12);
  // Clifford unitaries generate none.
  EXPECT_NEAR(nonstabilizing_power(gate_cx()), 0.0, 1e-12);
  EXPECT_NEAR(nonstabilizing_power(gate_swap()), 0.0, 1e-12);
}

TEST(ResourceReportTest, ConsistentWithComponentsAndBases) {
  Xoshiro256pp rng(9, 0);
  const StateVec psi = haar_state(rng);
  const ResourceReport nat = resource_report(psi);
  EXPECT_NEAR(nat.m2, stabilizer_entropy_pure(psi), 1e-14);
  EXPECT_NEAR(nat.s1, von_neumann_entropy(reduced_a(psi)), 1e-14);
  EXPECT_NEAR(nat.s2, renyi2_entropy(reduced_a(psi)), 1e-14);
  EXPECT_NEAR(nat.c_e, entanglement_capacity(psi), 1e-14);
  EXPECT_NEAR(nat.m_nl, nonlocal_magic(psi), 1e-14);
  EXPECT_NEAR(nat.m_loc, local_magic(psi), 1e-14);
  EXPECT_NEAR(nat.m_loc, nat.m2 - nat.m_nl, 1e-12);

  const ResourceReport bits = resource_report(psi, LogBase::two);
  const double ln2 = std::log(2.0);
  EXPECT_NEAR(bits.m2, nat.m2 / ln2, 1e-12);
  EXPECT_NEAR(bits.s1, nat.s1 / ln2, 1e-12);
  EXPECT_NEAR(bits.s2, nat.s2 / ln2, 1e-12);
  EXPECT_NEAR(bits.m_nl, nat.m_nl / ln2, 1e-12);
  EXPECT_NEAR(bits.m_loc, nat.m_loc / ln2, 1e-12);
  // Capacity carries squared-log units.
  EXPECT_NEAR(bits.c_e, nat.c_e / (ln2 * ln2), 1e-12);
}

}  // namespace
