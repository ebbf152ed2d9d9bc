#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chshlab/common.hpp"
#include "chshlab/qcore.hpp"
#include "chshlab/rng.hpp"

namespace chshlab {

// ---------------------------------------------------------------------------
// Haar sampling: Ginibre matrix, QR, then the R-diagonal phase correction so
// the distribution is exactly the Haar measure.
// ---------------------------------------------------------------------------

Mat2 haar_unitary2(Xoshiro256pp& rng);
Mat4 haar_unitary4(Xoshiro256pp& rng);

// Normalized complex-Gaussian 4-vector: the unitarily invariant pure-state
// measure.
StateVec haar_state(Xoshiro256pp& rng);

// ---------------------------------------------------------------------------
// Exhaustive tables (built once, immutable).  Breadth-first closure over
// {H, S} resp. {HxI, IxH, SxI, IxS, C_X, tilde C_X}, deduplicated modulo
// global phase by canonical phase fixing.
// ---------------------------------------------------------------------------

// 24 single-qubit Cliffords.
const std::vector<Mat2>& clifford1();

// 11520 two-qubit Cliffords.  If the cache directory (see kCacheDirEnvVar)
// holds a valid table it is loaded; otherwise the table is built and a cache
// write is attempted best-effort.
const std::vector<Mat4>& clifford2();

// The 60 two-qubit stabilizer states: orbit of |00> under clifford2().
const std::vector<StateVec>& stabilizer_states();

// Fresh breadth-first rebuilds, bypassing the in-memory singletons and the
// disk cache.  The BFS order is deterministic, so repeated builds are
// byte-identical; exposed for the enumeration self-checks.
std::vector<Mat2> build_clifford1_table();
std::vector<Mat4> build_clifford2_table();
std::vector<StateVec> build_stabilizer_orbit(const std::vector<Mat4>& table);

// Rotate so the first entry with magnitude > 1e-6 (column-major scan) is
// real positive.  Exposed for table tests.
void canonicalize_phase(Mat2& m);
void canonicalize_phase(Mat4& m);
void canonicalize_phase(Vec4& v);

// Binary cache of the two-qubit table: "CLIF" magic, format version, dim,
// count, then row-major re/im pairs of 64-bit floats.  Regeneration is
// byte-identical because the BFS order is deterministic.
inline constexpr const char* kCacheDirEnvVar = "CHSHLAB_CACHE_DIR";
std::string clifford_cache_path(const std::string& dir);
void save_clifford_table(const std::vector<Mat4>& table,
                         const std::string& path);
// Throws InvariantError on missing/corrupt file.
std::vector<Mat4> load_clifford_table(const std::string& path);

// ---------------------------------------------------------------------------
// Conjugated-core ensembles  E = { g^+ U_c g : g in G }.
// ---------------------------------------------------------------------------

enum class GroupKind {
  u_full,  // Haar on U(4)
  u_a,     // Haar on U(2), qubit A only
  u_b,     // Haar on U(2), qubit B only
  c_full,  // full two-qubit Clifford group, 11520 elements
  c_a,     // single-qubit Cliffords on A, 24
  c_b,     // single-qubit Cliffords on B, 24
  c_pair,  // independent pair C_A x C_B, 576 (disambiguation extra)
  c_diag,  // identical C x C, 24 (disambiguation extra)
};

enum class Method { exact_enumeration, monte_carlo };

struct GroupTag {
  GroupKind kind;
  Method method;
};

struct EnsembleSpec {
  Mat4 core;                // U_c
  GroupTag group;
  std::size_t n_samples;    // Monte Carlo only
  std::uint64_t seed;
};

// Number of elements for enumerable kinds; 0 for the Haar kinds.
std::size_t group_size(GroupKind kind);

bool enumerable(GroupKind kind);

// Exact enumeration: element #index of the ensemble.
Mat4 draw_ensemble_element(const EnsembleSpec& spec, std::size_t index);

// Monte Carlo: one draw using the supplied stream.
Mat4 draw_ensemble_element(const EnsembleSpec& spec, Xoshiro256pp& rng);

}  // namespace chshlab
