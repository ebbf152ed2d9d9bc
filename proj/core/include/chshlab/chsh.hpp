#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "chshlab/common.hpp"
#include "chshlab/qcore.hpp"
#include "chshlab/rng.hpp"

namespace chshlab {

// ---------------------------------------------------------------------------
// The resource-free CHSH family: settings drawn from {X, Y, Z} on each side.
// ---------------------------------------------------------------------------

struct ChshSpec {
  Pauli pa, pa_prime, pb, pb_prime;  // labels in {X, Y, Z}
};

// B = PA x (PB + PB') + PA' x (PB' - PB).  The non-degenerate members have
// spectrum {-2*sqrt(2), 0, 0, +2*sqrt(2)}; degenerate ones collapse to
// 2 P x P' with spectrum {-2, 2}.
Mat4 materialize(const ChshSpec& spec);

inline bool is_degenerate(const ChshSpec& s) {
  return s.pa == s.pa_prime || s.pb == s.pb_prime;
}

// All 81 label combinations; exactly 36 are non-degenerate.
const std::vector<ChshSpec>& chsh_family();

// The canonical operator B0 = XX + XZ - ZX + ZZ, i.e. spec (X,Z,X,Z).
ChshSpec b0_spec();
const Mat4& b0_operator();

// <psi|B|psi>, always in [-2*sqrt(2), 2*sqrt(2)].
double chsh_expectation(const ChshSpec& spec, const StateVec& psi);

// Same, reusing a precomputed Pauli-expectation table (hot path for sweeps).
inline double chsh_from_pauli(const std::array<double, 16>& t,
                              const ChshSpec& s) {
  const int a = static_cast<int>(s.pa), ap = static_cast<int>(s.pa_prime);
  const int b = static_cast<int>(s.pb), bp = static_cast<int>(s.pb_prime);
  return t[4 * a + b] + t[4 * a + bp] + t[4 * ap + bp] - t[4 * ap + b];
}

// b_U = <00|U^+ B0 U|00>.
double b_of_unitary(const Mat4& u);

// ---------------------------------------------------------------------------
// Canonical state families.
// ---------------------------------------------------------------------------

// |r(t)> = cos t |00> + sin t |11>; all of its magic is non-local.
StateVec r_theta_state(double theta);

// Two-parameter purification family with reduced state
// (I + r(sin t cos p, sin t sin p, cos t) . sigma)/2 on qubit A.
StateVec rho_family_state(double r, double theta, double phi);

// The four closed forms along the (theta, phi) = (pi/4, pi/3) slice:
// s1 in base 2, c_e and m_nl natural-log, b0 = <B0>.
struct RhoFamilyValues {
  double s1_bits;
  double c_e;
  double m_nl;
  double b0;
};
RhoFamilyValues rho_family_closed_forms(double r);

// ---------------------------------------------------------------------------
// Violation bounds and geometry.
// ---------------------------------------------------------------------------

// Maximum CHSH value over all local measurement settings:
// 2*sqrt(mu1 + mu2) from the two largest eigenvalues of T^T T,
// T_ij = <sigma_i x sigma_j>.
double horodecki_max(const StateVec& psi);

// f(theta; U_A, U_B) = 2*sqrt(2) - M_NL(r(theta))/2 - |<B0>| on
// (U_A x U_B)|r(theta)>; conjectured nonnegative (M_NL in nats).
double tsirelson_gap(double theta, const Mat2& u_a, const Mat2& u_b);

// Hurwitz angles in the fixed B0 eigenbasis ordered {-2√2, +2√2, 0, 0};
// only these two angles decide violation.
struct HurwitzCoords {
  double theta2;
  double theta3;
};

// Columns: eigenvector of -2√2, of +2√2, then a Gram-Schmidt kernel basis in
// computational-basis index order.  Deterministic.
const Mat4& b0_eigenbasis();

HurwitzCoords hurwitz_coords(const StateVec& psi);

// True iff |cos^2 t3 - sin^2 t3 cos^2 t2| > 1/sqrt(2).
bool hurwitz_violates(const HurwitzCoords& c);

// ---------------------------------------------------------------------------
// Theorem verifiers.
// ---------------------------------------------------------------------------

struct TheoremReport {
  bool pass;
  double max_abs_b;      // maximum |<B>| encountered
  std::size_t n_checked; // number of (state, spec) evaluations
  std::string detail;    // human-readable summary
};

// Stabilizer states cannot violate: exhaustive 60 x 81 sweep (max exactly 2,
// every |b| in {0, 1, 2}) plus random convex mixtures of stabilizer states.
TheoremReport verify_theorem1(std::size_t n_mixtures = 10000,
                              std::uint64_t seed = 11);

// SWAP-symmetric unitaries cannot violate with symmetric settings
// (pa = pb, pa' = pb'): samples U = exp(-iH), H in the SWAP commutant.
TheoremReport verify_theorem2(std::size_t n_samples, Xoshiro256pp& rng);

// Local Cliffords inject no violating power into |r(theta)>: exhaustive
// theta-grid x 576 local-Clifford pairs x 81 specs stays at or below 2;
// additionally Haar states with appreciable non-local magic stay strictly
// below the Tsirelson ceiling, by the margin M_NL/2.
TheoremReport verify_theorem3(std::size_t theta_grid = 181,
                              std::size_t n_haar = 100000,
                              std::uint64_t seed = 13);

}  // namespace chshlab
