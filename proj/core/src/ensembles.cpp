#include "chshlab/ensembles.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <unordered_set>

#include "chshlab/resources.hpp"

namespace chshlab {

namespace {

template <typename M>
M ginibre(Xoshiro256pp& rng) {
  M g;
  for (int r = 0; r < M::RowsAtCompileTime; ++r)
    for (int c = 0; c < M::ColsAtCompileTime; ++c) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(r, c) = cxd(re, im);
    }
  return g;
}

template <typename M>
M haar_impl(Xoshiro256pp& rng) {
  const M g = ginibre<M>(rng);
  Eigen::HouseholderQR<M> qr(g);
  M q = qr.householderQ();
  const M r = qr.matrixQR().template triangularView<Eigen::Upper>();
  // Fix the gauge: multiply each column by the phase of the matching R
  // diagonal so the factorization is unique and Q is Haar.
  for (int j = 0; j < M::ColsAtCompileTime; ++j) {
    const cxd d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0) ? d / a : cxd(1, 0);
  }
  return q;
}

template <typename M>
void canonicalize_impl(M& m) {
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) {
      const cxd z = m(i, j);
      const double a = std::abs(z);
      if (a > 1e-6) {
        m *= std::conj(z) / a;
        return;
      }
    }
}

// Key for dedup modulo phase: canonical entries rounded to 10 decimals.
template <typename M>
std::string key_of(const M& m) {
  std::string key;
  key.reserve(static_cast<std::size_t>(m.size()) * 16);
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) {
      const long long re = std::llround(m(i, j).real() * 1e10);
      const long long im = std::llround(m(i, j).imag() * 1e10);
      key.append(reinterpret_cast<const char*>(&re), sizeof re);
      key.append(reinterpret_cast<const char*>(&im), sizeof im);
    }
  return key;
}

template <typename M>
std::vector<M> bfs_closure(const std::vector<M>& generators,
                           std::size_t expected) {
  std::vector<M> table;
  std::unordered_set<std::string> seen;
  std::deque<std::size_t> queue;

  M id = M::Identity();
  canonicalize_impl(id);
  table.push_back(id);
  seen.insert(key_of(id));
  queue.push_back(0);

  while (!queue.empty()) {
    const M cur = table[queue.front()];
    queue.pop_front();
    for (const M& g : generators) {
      M nxt = g * cur;
      canonicalize_impl(nxt);
      if (seen.insert(key_of(nxt)).second) {
        table.push_back(nxt);
        queue.push_back(table.size() - 1);
        if (table.size() > expected)
          throw InvariantError("group closure exceeded expected size");
      }
    }
  }
  if (table.size() != expected)
    throw InvariantError("group closure has unexpected size");
  return table;
}

std::vector<Mat4> build_clifford2() {
  const Mat2 id = Mat2::Identity();
  const std::vector<Mat4> gens = {
      kron(gate_h(), id), kron(id, gate_h()), kron(gate_s(), id),
      kron(id, gate_s()), gate_cx(),          gate_cx_tilde(),
  };
  return bfs_closure(gens, 11520);
}

constexpr char kCacheMagic[4] = {'C', 'L', 'I', 'F'};
constexpr std::uint32_t kCacheVersion = 1;

}  // namespace

Mat2 haar_unitary2(Xoshiro256pp& rng) { return haar_impl<Mat2>(rng); }
Mat4 haar_unitary4(Xoshiro256pp& rng) { return haar_impl<Mat4>(rng); }

StateVec haar_state(Xoshiro256pp& rng) {
  Vec4 v;
  double n2 = 0;
  do {
    for (int i = 0; i < 4; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      v(i) = cxd(re, im);
    }
    n2 = v.squaredNorm();
  } while (n2 < 1e-24);
  return StateVec::unchecked(v / std::sqrt(n2));
}

void canonicalize_phase(Mat2& m) { canonicalize_impl(m); }
void canonicalize_phase(Mat4& m) { canonicalize_impl(m); }
void canonicalize_phase(Vec4& v) {
  for (int i = 0; i < 4; ++i) {
    const double a = std::abs(v(i));
    if (a > 1e-6) {
      v *= std::conj(v(i)) / a;
      return;
    }
  }
}

const std::vector<Mat2>& clifford1() {
  static const std::vector<Mat2> table = build_clifford1_table();
  return table;
}

std::vector<Mat2> build_clifford1_table() {
  return bfs_closure<Mat2>({gate_h(), gate_s()}, 24);
}

std::vector<Mat4> build_clifford2_table() { return build_clifford2(); }

std::string clifford_cache_path(const std::string& dir) {
  return dir + "/clifford2_v" + std::to_string(kCacheVersion) + ".bin";
}

void save_clifford_table(const std::vector<Mat4>& table,
                         const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw InvariantError("cannot open cache file for writing: " + path);
  const std::uint32_t dim = 4;
  const std::uint32_t count = static_cast<std::uint32_t>(table.size());
  std::fwrite(kCacheMagic, 1, 4, f);
  std::fwrite(&kCacheVersion, sizeof kCacheVersion, 1, f);
  std::fwrite(&dim, sizeof dim, 1, f);
  std::fwrite(&count, sizeof count, 1, f);
  for (const Mat4& m : table)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double re = m(i, j).real(), im = m(i, j).imag();
        std::fwrite(&re, sizeof re, 1, f);
        std::fwrite(&im, sizeof im, 1, f);
      }
  if (std::fclose(f) != 0)
    throw InvariantError("cache write failed: " + path);
}

std::vector<Mat4> load_clifford_table(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw InvariantError("cannot open cache file: " + path);
  char magic[4];
  std::uint32_t version = 0, dim = 0, count = 0;
  bool ok = std::fread(magic, 1, 4, f) == 4 &&
            std::memcmp(magic, kCacheMagic, 4) == 0 &&
            std::fread(&version, sizeof version, 1, f) == 1 &&
            version == kCacheVersion &&
            std::fread(&dim, sizeof dim, 1, f) == 1 && dim == 4 &&
            std::fread(&count, sizeof count, 1, f) == 1 && count == 11520;
  std::vector<Mat4> table;
  if (ok) {
    table.resize(count);
    for (std::uint32_t k = 0; k < count && ok; ++k)
      for (int i = 0; i < 4 && ok; ++i)
        for (int j = 0; j < 4 && ok; ++j) {
          double re = 0, im = 0;
          ok = std::fread(&re, sizeof re, 1, f) == 1 &&
               std::fread(&im, sizeof im, 1, f) == 1;
          table[k](i, j) = cxd(re, im);
        }
    ok = ok && std::fgetc(f) == EOF;
  }
  std::fclose(f);
  if (!ok) throw InvariantError("corrupt Clifford cache: " + path);
  for (const Mat4& m : table)
    if (!is_unitary(m, kInternalTol))
      throw InvariantError("corrupt Clifford cache (non-unitary entry)");
  return table;
}

const std::vector<Mat4>& clifford2() {
  static const std::vector<Mat4> table = [] {
    const char* dir = std::getenv(kCacheDirEnvVar);
    if (dir && *dir) {
      const std::string path = clifford_cache_path(dir);
      try {
        return load_clifford_table(path);
      } catch (const InvariantError&) {
        // fall through to a fresh build
      }
      std::vector<Mat4> built = build_clifford2();
      try {
        save_clifford_table(built, path);
      } catch (const InvariantError&) {
        // cache is best-effort
      }
      return built;
    }
    return build_clifford2();
  }();
  return table;
}

std::vector<StateVec> build_stabilizer_orbit(const std::vector<Mat4>& table) {
  std::vector<StateVec> states;
  std::unordered_set<std::string> seen;
  for (const Mat4& c : table) {
    Vec4 v = c.col(0);
    canonicalize_phase(v);
    std::string key;
    key.reserve(64);
    for (int i = 0; i < 4; ++i) {
      const long long re = std::llround(v(i).real() * 1e10);
      const long long im = std::llround(v(i).imag() * 1e10);
      key.append(reinterpret_cast<const char*>(&re), sizeof re);
      key.append(reinterpret_cast<const char*>(&im), sizeof im);
    }
    if (seen.insert(key).second) states.push_back(StateVec::unchecked(v));
  }
  if (states.size() != 60)
    throw InvariantError("stabilizer orbit has unexpected size");
  for (const StateVec& s : states)
    if (stabilizer_entropy_pure(s) > 1e-12)
      throw InvariantError("non-stabilizer state in orbit");
  return states;
}

const std::vector<StateVec>& stabilizer_states() {
  static const std::vector<StateVec> table =
      build_stabilizer_orbit(clifford2());
  return table;
}

std::size_t group_size(GroupKind kind) {
  switch (kind) {
    case GroupKind::c_full: return 11520;
    case GroupKind::c_a:
    case GroupKind::c_b:
    case GroupKind::c_diag: return 24;
    case GroupKind::c_pair: return 576;
    default: return 0;
  }
}

bool enumerable(GroupKind kind) { return group_size(kind) != 0; }

namespace {

Mat4 conjugated(const Mat4& core, const Mat4& g) {
  return g.adjoint() * core * g;
}

}  // namespace

Mat4 draw_ensemble_element(const EnsembleSpec& spec, std::size_t index) {
  const std::size_t n = group_size(spec.group.kind);
  if (n == 0)
    throw InvariantError("indexed drawing requires an enumerable group");
  if (index >= n) throw InvariantError("ensemble element index out of range");
  const Mat2 id = Mat2::Identity();
  Mat4 g;
  switch (spec.group.kind) {
    case GroupKind::c_full: g = clifford2()[index]; break;
    case GroupKind::c_a: g = kron(clifford1()[index], id); break;
    case GroupKind::c_b: g = kron(id, clifford1()[index]); break;
    case GroupKind::c_pair:
      g = kron(clifford1()[index / 24], clifford1()[index % 24]);
      break;
    case GroupKind::c_diag:
      g = kron(clifford1()[index], clifford1()[index]);
      break;
    default: throw InvariantError("unreachable");
  }
  return conjugated(spec.core, g);
}

Mat4 draw_ensemble_element(const EnsembleSpec& spec, Xoshiro256pp& rng) {
  const Mat2 id = Mat2::Identity();
  switch (spec.group.kind) {
    case GroupKind::u_full: return conjugated(spec.core, haar_unitary4(rng));
    case GroupKind::u_a:
      return conjugated(spec.core, kron(haar_unitary2(rng), id));
    case GroupKind::u_b:
      return conjugated(spec.core, kron(id, haar_unitary2(rng)));
    default: {
      const std::size_t n = group_size(spec.group.kind);
      return draw_ensemble_element(spec, rng.next() % n);
    }
  }
}

}  // namespace chshlab
