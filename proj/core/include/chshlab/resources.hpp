#pragma once

#include "chshlab/common.hpp"
#include "chshlab/qcore.hpp"

namespace chshlab {

// All monotones in nats unless a base is passed.
struct ResourceReport {
  double m2;     // stabilizer entropy
  double s1;     // entanglement entropy of the reduced state
  double s2;     // 2-Renyi entanglement entropy
  double c_e;    // capacity of entanglement (squared-log units)
  double m_nl;   // non-local magic
  double m_loc;  // local magic, m2 - m_nl
};

// Stabilizer entropy M2 = -log( (1/4) sum_P <psi|P|psi>^4 ); zero exactly on
// stabilizer states.
double stabilizer_entropy_pure(const StateVec& psi);

// Mixed-state extension M2(rho) - S2(rho), with M2(rho) the same Pauli
// fourth-power sum on Tr(rho P) and S2 = -log tr rho^2.
double stabilizer_entropy_mixed(const Mat4& rho);

// True iff rho is (within tol) a uniform signed sum over a mutually commuting,
// multiplication-closed set of Pauli strings with coefficients in {0, +1, -1}.
bool is_free_state(const Mat4& rho, double tol);

// -sum lambda_i log lambda_i with 0 log 0 = 0.
double von_neumann_entropy(const Mat2& rho, LogBase base = LogBase::e);

// 2-Renyi entropy -log tr rho^2.
double renyi2_entropy(const Mat2& rho);
double renyi2_entropy(const Mat4& rho);

// Capacity of entanglement: variance of the surprisal of the reduced
// spectrum; with spectrum {p, 1-p} equals p(1-p) ln^2((1-p)/p).
double entanglement_capacity(const StateVec& psi);

// Non-local magic, a function of the Schmidt angle T alone:
// -log[(7 + cos 8T)/8].  Minimum stabilizer entropy over local-unitary orbits.
double nonlocal_magic(const StateVec& psi);

// Local magic m2 - m_nl, clamped at zero above -1e-10; a deficit below -1e-6
// is a hard inconsistency error.
double local_magic(const StateVec& psi);

// Mean stabilizer entropy generated by u over the 60 stabilizer states.
double nonstabilizing_power(const Mat4& u, LogBase base = LogBase::e);

ResourceReport resource_report(const StateVec& psi, LogBase base = LogBase::e);

}  // namespace chshlab
