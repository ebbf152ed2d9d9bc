#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chshlab/common.hpp"
#include "chshlab/ensembles.hpp"

namespace chshlab {

// ---------------------------------------------------------------------------
// Spectral form factors of a 4x4 unitary.  Polynomials in Tr U and Tr U^2,
// so no eigendecomposition is needed.
// ---------------------------------------------------------------------------

struct FormFactors {
  double c2 = 0.0;        // |Tr U|^2
  double c2_tilde = 0.0;  // |Tr U^2|^2
  cxd c3{0.0, 0.0};       // (Tr U)^2 conj(Tr U^2)
  double c4 = 0.0;        // c2^2
};

FormFactors form_factors(const Mat4& u);

// ---------------------------------------------------------------------------
// Second-moment twirl on the doubled space (4 x 4 tensor factors, 16x16
// matrices):  E_g [ (g x g)^+ O (g x g) ]  for Haar g, which lands in the
// span of I and the factor swap T2.
// ---------------------------------------------------------------------------

Mat16 second_moment_twirl(const Mat16& o);

// The factor-swap operator T2 |a>|b> = |b>|a> on the doubled space.
const Mat16& swap_16();

// ---------------------------------------------------------------------------
// Haar closed forms for b over the conjugation ensemble { g^+ U g }.
// ---------------------------------------------------------------------------

// (c2 - 1) / 15.  Always in [-1, 1].
double haar_mean_b(const Mat4& core);

// Fourth-moment trace [1344 - 4 c2 + c2~ + 2 Re c3 + c4] / 1680 = <b^2>.
double haar_second_moment_b(const Mat4& core);

// [4(41 - 28 c2) c2 + 15 c2~ + 30 Re c3 + 15 c4 + 20048] / 25200;
// algebraically equal to haar_second_moment_b - haar_mean_b^2.
double haar_var_b(const Mat4& core);

// ---------------------------------------------------------------------------
// Clifford second-moment quantities: d^-2-normalized Pauli trace sums.
// ---------------------------------------------------------------------------

struct CliffordCQuantities {
  double cu4 = 0.0;      // (1/16) sum_P |Tr(P U)|^4
  double cu2_sq = 0.0;   // (1/16) sum_P |Tr(P U P U)|^2
  cxd cu_star2_cu2{0.0, 0.0};  // (1/16) sum_P conj(Tr(P U))^2 Tr(P U P U)
  double cuud_sq = 0.0;  // (1/16) sum_P |Tr(P U P U^+)|^2
  cxd cuud2{0.0, 0.0};   // (1/16) sum_P Tr(U P U^+ P U P U^+)
};

// Literal Pauli sums.  The imaginary residue of cuud2 is asserted < 1e-10
// (it is a real sum by symmetry of the Pauli average) and kept as computed.
CliffordCQuantities clifford_c_quantities(const Mat4& u);

// Variance of b over the 11520-element Clifford conjugation ensemble:
//   7/9 + [ |c_{U^2}|^2 + 2 Re(c_U*^2 c_{U^2}) + |c_U|^4 ] / 180 - mean^2.
// Matches exact enumeration to ~1e-14.
double clifford_var_b(const Mat4& core);

// ---------------------------------------------------------------------------
// Ensemble statistics of b: exact enumeration for finite groups, seeded
// Monte Carlo otherwise.
// ---------------------------------------------------------------------------

enum class StatMethod { exact_enumeration, monte_carlo, analytic };

std::string stat_method_name(StatMethod m);

struct TwirlStats {
  double mean = 0.0;
  double variance = 0.0;  // population variance over the ensemble
  double p_viol = 0.0;    // fraction with |b| > 2
  StatMethod method = StatMethod::exact_enumeration;
  std::uint64_t n = 0;
  double mean_stderr = 0.0;    // 0 for exact enumeration
  double p_viol_stderr = 0.0;  // binomial; 0 for exact enumeration
};

// b over one ensemble element V = g^+ U_c g applied to |00>.
double b_of_element(const Mat4& core, const Mat4& g);

// Exact when the group is enumerable (spec.n_samples is ignored), Monte
// Carlo with per-sample counter streams otherwise.  `workers` fixes the
// partition plan; results are identical for every worker count because
// partial sums are merged pairwise over a worker-count-independent chunk
// grid and each Monte Carlo sample owns stream (seed, sample index).
TwirlStats ensemble_stats(const EnsembleSpec& spec, int workers = 1);

// ---------------------------------------------------------------------------
// Violation-probability grid over {12 cores} x {6 group tags}, with the
// nonstabilizing power (base 2) per core and printed reference values.
// ---------------------------------------------------------------------------

struct Table2Row {
  std::string label;        // core in --core syntax, e.g. "w:pi/4"
  Mat4 core;
  double p[6] = {0, 0, 0, 0, 0, 0};       // u, ua, ub, c, ca, cb (fractions)
  double se[6] = {0, 0, 0, 0, 0, 0};      // binomial stderr; 0 for exact
  std::uint64_t n[6] = {0, 0, 0, 0, 0, 0};
  double m2_power_bits = 0.0;             // nonstabilizing power, base 2
  double ref_p[6] = {0, 0, 0, 0, 0, 0};   // reference percentages / 100
  double ref_m2_bits = 0.0;
  // Non-empty for A/B-exchanged rows: the label of the base row whose
  // columns this row transposes.  Exchanging the qubit roles relabels the
  // core, the twirl side, and the CHSH operator together, which leaves
  // every sample value unchanged, so exchanged rows mirror base rows
  // exactly rather than re-estimating them.
  std::string exchanged_from;
  bool pass = true;
};

// Reference tolerances: Monte Carlo columns max(0.3 pp, 5 stderr); exact
// columns 0.2 pp (reference values are rounded to 0.1 pp, unevenly); the
// power column 5e-4.
std::vector<Table2Row> table2_report(std::size_t mc_samples,
                                     std::uint64_t seed, int workers = 1);

}  // namespace chshlab
