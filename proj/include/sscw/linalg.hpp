#pragma once

#include <lapacke.h>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sscw {

using SparseInt = Eigen::SparseMatrix<std::int64_t, Eigen::RowMajor>;
using SparseReal = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Eigenvalues in ascending order and (optionally) orthonormal eigenvectors as columns.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Dense symmetric eigendecomposition (LAPACK divide and conquer). The input is consumed.
inline SymmetricEigen symmetric_eigen(Eigen::MatrixXd a, bool want_vectors = true) {
  const auto n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("symmetric_eigen: matrix not square");
  SymmetricEigen out;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', static_cast<lapack_int>(n),
                                         a.data(), static_cast<lapack_int>(n), out.values.data());
  if (info != 0) throw std::runtime_error("eigendecomposition failed (dsyevd info=" + std::to_string(info) + ")");
  if (want_vectors) out.vectors = std::move(a);
  return out;
}

inline Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) { return symmetric_eigen(a, false).values; }

/// Rank over Z/p for p = 2^61 - 1 by sparse row echelon reduction. For integer matrices this equals
/// the rational rank unless p divides every maximal nonzero minor, which does not happen for the
/// small incidence matrices used here.
inline std::size_t modular_rank(const SparseInt& m) {
  using u64 = std::uint64_t;
  using u128 = unsigned __int128;
  constexpr u64 P = (u64{1} << 61) - 1;
  auto mul = [](u64 a, u64 b) {
    u128 z = static_cast<u128>(a) * b;
    u64 r = static_cast<u64>(z & P) + static_cast<u64>(z >> 61);
    return r >= P ? r - P : r;
  };
  auto add = [](u64 a, u64 b) { u64 r = a + b; return r >= P ? r - P : r; };
  auto inv = [&](u64 a) {
    u64 r = 1, e = P - 2;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  };
  auto reduce = [](std::int64_t v) { return static_cast<u64>(((v % static_cast<std::int64_t>(P)) + static_cast<std::int64_t>(P)) % static_cast<std::int64_t>(P)); };

  using Row = std::vector<std::pair<std::int64_t, u64>>;  // sorted (col, value)
  std::vector<Row> pivots(static_cast<std::size_t>(m.cols()));
  std::vector<char> has(static_cast<std::size_t>(m.cols()), 0);
  std::size_t rank = 0;
  Row cur, tmp;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    cur.clear();
    for (SparseInt::InnerIterator it(m, r); it; ++it)
      if (auto v = reduce(it.value())) cur.push_back({it.col(), v});
    while (!cur.empty()) {
      const auto c = cur.front().first;
      if (!has[c]) {
        const u64 s = inv(cur.front().second);
        for (auto& e : cur) e.second = mul(e.second, s);
        pivots[c] = cur;
        has[c] = 1;
        ++rank;
        break;
      }
      // cur -= cur[c] * pivot[c]  (pivot rows are normalised to leading 1)
      const u64 f = P - cur.front().second;
      const auto& pv = pivots[c];
      tmp.clear();
      std::size_t a = 0, b = 0;
      while (a < cur.size() || b < pv.size()) {
        if (b == pv.size() || (a < cur.size() && cur[a].first < pv[b].first)) tmp.push_back(cur[a++]);
        else if (a == cur.size() || pv[b].first < cur[a].first) {
          tmp.push_back({pv[b].first, mul(f, pv[b].second)});
          ++b;
        } else {
          u64 v = add(cur[a].second, mul(f, pv[b].second));
          if (v) tmp.push_back({cur[a].first, v});
          ++a;
          ++b;
        }
      }
      std::swap(cur, tmp);
    }
  }
  return rank;
}

inline Eigen::MatrixXd to_dense(const SparseReal& m) { return Eigen::MatrixXd(m); }

}  // namespace sscw
