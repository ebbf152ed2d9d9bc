#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "chshlab/common.hpp"

namespace chshlab {

// ---------------------------------------------------------------------------
// Pauli strings.  Two qubits, basis ordered |00>,|01>,|10>,|11>, qubit A is
// the left tensor factor.
// ---------------------------------------------------------------------------

enum class Pauli : int { I = 0, X = 1, Y = 2, Z = 3 };

struct PauliString {
  Pauli a;  // qubit A
  Pauli b;  // qubit B
};

inline int pauli_index(PauliString s) {
  return 4 * static_cast<int>(s.a) + static_cast<int>(s.b);
}

const Mat2& pauli1(Pauli p);
Mat4 pauli_matrix(PauliString s);
// All 16 two-qubit Pauli strings, indexed by pauli_index.
const std::array<Mat4, 16>& pauli_table();

// ---------------------------------------------------------------------------
// Gates.
// ---------------------------------------------------------------------------

Mat2 gate_h();
Mat2 gate_s();
Mat2 gate_t();
// R_y(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]].
Mat2 gate_ry(double theta);

Mat4 gate_cx();        // CNOT, control A:  |10> <-> |11>
Mat4 gate_cx_tilde();  // CNOT, control B:  |01> <-> |11>
Mat4 gate_swap();

// Preparation core W(t) = (R_y(t) x I) CNOT (H x I); W(pi/2) is Clifford,
// W(pi/4) prepares the Tsirelson-saturating state from |00>.
Mat4 w_gate(double theta);
// A/B-exchanged core: SWAP W(t) SWAP.
Mat4 w_tilde_gate(double theta);

// ---------------------------------------------------------------------------
// States.
// ---------------------------------------------------------------------------

// Normalized two-qubit pure state.  Construction validates the norm to
// kCtorTol, then renormalizes so downstream identities hold to kInternalTol.
class StateVec {
 public:
  explicit StateVec(const Vec4& amps);

  // For amplitudes produced by unitary evolution of an already-valid state.
  static StateVec unchecked(const Vec4& amps) { return StateVec(amps, 0); }

  const Vec4& amps() const { return a_; }
  cxd operator[](int i) const { return a_(i); }

 private:
  StateVec(const Vec4& amps, int) : a_(amps) {}
  Vec4 a_;
};

StateVec ket00();
StateVec phi_plus();  // (|00> + |11>)/sqrt(2)

inline StateVec apply(const Mat4& u, const StateVec& psi) {
  return StateVec::unchecked(u * psi.amps());
}

inline Mat4 dyad(const StateVec& psi) {
  return psi.amps() * psi.amps().adjoint();
}

// ---------------------------------------------------------------------------
// Expectations, reduced states, Schmidt data.
// ---------------------------------------------------------------------------

// <psi|obs|psi>.  Rejects observables with Hermiticity residual > kCtorTol;
// the sub-kInternalTol imaginary part of the quadratic form is discarded.
double expectation(const Mat4& obs, const StateVec& psi);

// All 16 Pauli expectations <psi|P|psi> at once (the hot path for both
// stabilizer entropy and CHSH evaluation).
std::array<double, 16> pauli_expectations(const StateVec& psi);

// Partial trace of a two-qubit density matrix; keep = 0 keeps qubit A.
Mat2 partial_trace(const Mat4& rho, int keep);

// Reduced state of qubit A for a pure state (cheaper than dyad + trace).
Mat2 reduced_a(const StateVec& psi);

// Eigenvalues of a 2x2 Hermitian matrix by the closed-form quadratic,
// ascending order.
std::pair<double, double> eig2_hermitian(const Mat2& h);

// Schmidt angle T in [0, pi/4]: entanglement spectrum {cos^2 T, sin^2 T}.
double schmidt_angle(const StateVec& psi);

template <typename M>
double purity(const M& rho) {
  return (rho * rho).trace().real();
}

}  // namespace chshlab
