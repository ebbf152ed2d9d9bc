#include "chshlab/twirling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "chshlab/chsh.hpp"
#include "chshlab/qcore.hpp"
#include "chshlab/resources.hpp"
#include "chshlab/rng.hpp"

namespace chshlab {

namespace {

// Mergeable accumulator for one chunk of the element list / sample stream.
struct Partial {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t viol = 0;
  std::uint64_t n = 0;
};

Partial merge(const Partial& a, const Partial& b) {
  return Partial{a.sum + b.sum, a.sum_sq + b.sum_sq, a.viol + b.viol,
                 a.n + b.n};
}

// Pairwise tree reduction in chunk-index order: the merge order depends only
// on the chunk grid, never on which worker produced which chunk.
Partial reduce_pairwise(std::vector<Partial> parts) {
  if (parts.empty()) return {};
  while (parts.size() > 1) {
    std::vector<Partial> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      next.push_back(merge(parts[i], parts[i + 1]));
    }
    if (parts.size() % 2 == 1) next.push_back(parts.back());
    parts = std::move(next);
  }
  return parts.front();
}

constexpr std::size_t kChunk = 8192;  // chunk grid is worker-independent

std::uint64_t derive_cell_seed(std::uint64_t seed, std::uint64_t cell) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (cell + 1);
  return splitmix64_next(x);
}

}  // namespace

FormFactors form_factors(const Mat4& u) {
  require_unitary(u, kCtorTol);
  const cxd tr = u.trace();
  const cxd tr2 = (u * u).trace();
  FormFactors ff;
  ff.c2 = std::norm(tr);
  ff.c2_tilde = std::norm(tr2);
  ff.c3 = tr * tr * std::conj(tr2);
  ff.c4 = ff.c2 * ff.c2;
  return ff;
}

const Mat16& swap_16() {
  static const Mat16 t2 = [] {
    Mat16 m = Mat16::Zero();
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) m(4 * b + a, 4 * a + b) = 1.0;
    }
    return m;
  }();
  return t2;
}

Mat16 second_moment_twirl(const Mat16& o) {
  const double d = 4.0;
  const Mat16& t2 = swap_16();
  const cxd tr_o = o.trace();
  const cxd tr_t2o = (t2 * o).trace();
  Mat16 out = (tr_o - tr_t2o / d) * Mat16::Identity() + (tr_t2o - tr_o / d) * t2;
  out /= d * d - 1.0;
  return out;
}

double haar_mean_b(const Mat4& core) {
  const double mean = (form_factors(core).c2 - 1.0) / 15.0;
  if (std::abs(mean) > 1.0 + kInternalTol) {
    throw InvariantError("haar_mean_b out of [-1, 1]");
  }
  return mean;
}

double haar_second_moment_b(const Mat4& core) {
  const FormFactors ff = form_factors(core);
  return (1344.0 - 4.0 * ff.c2 + ff.c2_tilde + 2.0 * ff.c3.real() + ff.c4) /
         1680.0;
}

double haar_var_b(const Mat4& core) {
  const FormFactors ff = form_factors(core);
  return (4.0 * (41.0 - 28.0 * ff.c2) * ff.c2 + 15.0 * ff.c2_tilde +
          30.0 * ff.c3.real() + 15.0 * ff.c4 + 20048.0) /
         25200.0;
}

CliffordCQuantities clifford_c_quantities(const Mat4& u) {
  require_unitary(u, kCtorTol);
  const Mat4 ud = dagger(u);
  CliffordCQuantities q;
  for (const Mat4& p : pauli_table()) {
    const Mat4 pu = p * u;
    const cxd t_pu = pu.trace();
    const cxd t_pupu = (pu * pu).trace();
    const Mat4 pupud = pu * p * ud;
    const cxd t_pupud = pupud.trace();
    const cxd t_upudpupud = (u * p * ud * p * u * p * ud).trace();
    q.cu4 += std::norm(t_pu) * std::norm(t_pu);
    q.cu2_sq += std::norm(t_pupu);
    q.cu_star2_cu2 += std::conj(t_pu) * std::conj(t_pu) * t_pupu;
    q.cuud_sq += std::norm(t_pupud);
    q.cuud2 += t_upudpupud;
  }
  q.cu4 /= 16.0;
  q.cu2_sq /= 16.0;
  q.cu_star2_cu2 /= 16.0;
  q.cuud_sq /= 16.0;
  q.cuud2 /= 16.0;
  if (std::abs(q.cuud2.imag()) > 1e-10) {
    throw InvariantError("cuud2 imaginary residue exceeds 1e-10");
  }
  return q;
}

double clifford_var_b(const Mat4& core) {
  const CliffordCQuantities q = clifford_c_quantities(core);
  const double mean = haar_mean_b(core);
  return 7.0 / 9.0 +
         (q.cu2_sq + 2.0 * q.cu_star2_cu2.real() + q.cu4) / 180.0 -
         mean * mean;
}

std::string stat_method_name(StatMethod m) {
  switch (m) {
    case StatMethod::exact_enumeration: return "exact_enumeration";
    case StatMethod::monte_carlo: return "monte_carlo";
    case StatMethod::analytic: return "analytic";
  }
  return "unknown";
}

double b_of_element(const Mat4& core, const Mat4& g) {
  const Vec4 psi = g.adjoint() * (core * g.col(0));
  return (psi.dot(b0_operator() * psi)).real();
}

TwirlStats ensemble_stats(const EnsembleSpec& spec, int workers) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  require_unitary(spec.core, kCtorTol);

  const bool exact = enumerable(spec.group.kind);
  const std::size_t total =
      exact ? group_size(spec.group.kind) : spec.n_samples;
  if (total == 0) throw std::invalid_argument("empty ensemble");

  const std::size_t n_chunks = (total + kChunk - 1) / kChunk;
  std::vector<Partial> parts(n_chunks);

  auto run_chunk = [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(lo + kChunk, total);
    Partial p;
    for (std::size_t i = lo; i < hi; ++i) {
      double b;
      if (exact) {
        b = b_of_unitary(draw_ensemble_element(spec, i));
      } else {
        Xoshiro256pp rng(spec.seed, i);
        b = b_of_unitary(draw_ensemble_element(spec, rng));
      }
      p.sum += b;
      p.sum_sq += b * b;
      if (std::abs(b) > 2.0) ++p.viol;
      ++p.n;
    }
    parts[c] = p;
  };

  if (workers == 1 || n_chunks == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    const int n_threads = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(workers), n_chunks));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t c = static_cast<std::size_t>(t); c < n_chunks;
             c += static_cast<std::size_t>(n_threads)) {
          run_chunk(c);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  const Partial tot = reduce_pairwise(std::move(parts));
  TwirlStats st;
  st.n = tot.n;
  st.mean = tot.sum / static_cast<double>(tot.n);
  double var = tot.sum_sq / static_cast<double>(tot.n) - st.mean * st.mean;
  if (var < -1e-10) throw InvariantError("negative ensemble variance");
  st.variance = std::max(var, 0.0);
  st.p_viol = static_cast<double>(tot.viol) / static_cast<double>(tot.n);
  st.method = exact ? StatMethod::exact_enumeration : StatMethod::monte_carlo;
  if (!exact) {
    st.mean_stderr = std::sqrt(st.variance / static_cast<double>(tot.n));
    st.p_viol_stderr = std::sqrt(
        std::max(st.p_viol * (1.0 - st.p_viol), 0.0) /
        static_cast<double>(tot.n));
  }
  return st;
}

std::vector<Table2Row> table2_report(std::size_t mc_samples,
                                     std::uint64_t seed, int workers) {
  struct RowDef {
    const char* label;
    Mat4 core;
    double ref_pct[6];
    double ref_m2;
  };
  const std::vector<RowDef> defs = {
      {"cx", gate_cx(), {2.2, 10.8, 0.0, 0.0, 0.0, 0.0}, 0.0},
      {"cxh", gate_cx() * kron(gate_h(), Mat2::Identity()),
       {2.5, 8.3, 10.8, 0.0, 0.0, 0.0}, 0.0},
      {"w:pi/2", w_gate(kPi / 2), {2.2, 10.9, 10.8, 0.0, 0.0, 0.0}, 0.0},
      {"w:pi/3", w_gate(kPi / 3), {2.3, 9.6, 17.2, 0.3, 4.2, 16.6}, 0.240},
      {"w:pi/4", w_gate(kPi / 4), {2.3, 8.7, 17.8, 0.3, 4.1, 16.7}, 0.332},
      {"w:pi/8", w_gate(kPi / 8), {2.4, 8.2, 16.1, 0.3, 4.0, 16.6}, 0.154},
  };
  const char* tilde_labels[6] = {"cxt",         "cxth",        "wtilde:pi/2",
                                 "wtilde:pi/3", "wtilde:pi/4", "wtilde:pi/8"};
  const GroupKind kinds[6] = {GroupKind::u_full, GroupKind::u_a,
                              GroupKind::u_b,    GroupKind::c_full,
                              GroupKind::c_a,    GroupKind::c_b};
  // A/B exchange maps column j of the base row to column of the tilde row.
  const int mirror_col[6] = {0, 2, 1, 3, 5, 4};

  std::vector<Table2Row> rows(2 * defs.size());
  std::uint64_t cell = 0;
  for (std::size_t r = 0; r < defs.size(); ++r) {
    const RowDef& def = defs[r];
    Table2Row& row = rows[r];
    row.label = def.label;
    row.core = def.core;
    row.m2_power_bits = nonstabilizing_power(def.core, LogBase::two);
    row.ref_m2_bits = def.ref_m2;
    row.pass = std::abs(row.m2_power_bits - row.ref_m2_bits) <= 5e-4;
    for (int j = 0; j < 6; ++j) {
      EnsembleSpec spec;
      spec.core = def.core;
      spec.group.kind = kinds[j];
      spec.group.method = enumerable(kinds[j]) ? Method::exact_enumeration
                                               : Method::monte_carlo;
      spec.n_samples = mc_samples;
      spec.seed = derive_cell_seed(seed, cell++);
      const TwirlStats st = ensemble_stats(spec, workers);
      row.p[j] = st.p_viol;
      row.se[j] = st.p_viol_stderr;
      row.n[j] = st.n;
      row.ref_p[j] = def.ref_pct[j] / 100.0;
      const double tol = enumerable(kinds[j])
                             ? 0.002
                             : std::max(0.003, 5.0 * st.p_viol_stderr);
      if (std::abs(row.p[j] - row.ref_p[j]) > tol) row.pass = false;
    }

    // The exchanged experiment swaps the qubit roles everywhere: the core
    // becomes SWAP core SWAP, the twirl acts on the other side, and the
    // CHSH operator is relabeled to SWAP B0 SWAP.  Since SWAP|00> = |00>,
    // every sample value coincides with the base experiment's, so the
    // exchanged row is the base row with the A and B columns transposed.
    Table2Row& ex = rows[defs.size() + r];
    ex.label = tilde_labels[r];
    ex.core = gate_swap() * def.core * gate_swap();
    ex.exchanged_from = def.label;
    ex.m2_power_bits = nonstabilizing_power(ex.core, LogBase::two);
    ex.ref_m2_bits = def.ref_m2;
    ex.pass = std::abs(ex.m2_power_bits - ex.ref_m2_bits) <= 5e-4;
    for (int j = 0; j < 6; ++j) {
      const int s = mirror_col[j];
      ex.p[j] = row.p[s];
      ex.se[j] = row.se[s];
      ex.n[j] = row.n[s];
      ex.ref_p[j] = row.ref_p[s];
      const double tol =
          enumerable(kinds[j]) ? 0.002 : std::max(0.003, 5.0 * ex.se[j]);
      if (std::abs(ex.p[j] - ex.ref_p[j]) > tol) ex.pass = false;
    }
  }
  return rows;
}

}  // namespace chshlab
