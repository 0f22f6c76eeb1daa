#pragma once

#include <cmath>
#include <deque>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "complex.hpp"
#include "exhaustion.hpp"
#include "linalg.hpp"
#include "metric.hpp"

namespace sscw {

enum class Variant {
  boundary,
  delta_plus,
  delta_minus,
  delta,
  rel_boundary,
  rel_delta_plus,
  rel_delta_minus,
  rel_delta,
  adjacency,
  degree,
  transition,
  delta_c,
  Q
};

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::boundary: return "boundary_j";
    case Variant::delta_plus: return "delta_j_plus";
    case Variant::delta_minus: return "delta_j_minus";
    case Variant::delta: return "delta_j";
    case Variant::rel_boundary: return "rel_boundary_j";
    case Variant::rel_delta_plus: return "rel_delta_j_plus";
    case Variant::rel_delta_minus: return "rel_delta_j_minus";
    case Variant::rel_delta: return "rel_delta_j";
    case Variant::adjacency: return "adjacency";
    case Variant::degree: return "degree";
    case Variant::transition: return "transition";
    case Variant::delta_c: return "delta_c";
    case Variant::Q: return "Q";
  }
  return "?";
}

/// Sparse operator on a finite level. `integer` holds exact entries for integer variants;
/// `real` always holds the floating copy used by spectral routines.
struct OperatorMatrix {
  Variant variant = Variant::delta;
  int j = 0;
  int level = -1;
  SparseReal real;
  std::optional<SparseInt> integer;

  Eigen::Index rows() const { return real.rows(); }
  Eigen::Index cols() const { return real.cols(); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(real); }
  std::string tag() const { return variant_name(variant) + "[j=" + std::to_string(j) + "]"; }
};

namespace detail {

inline OperatorMatrix from_integer(Variant v, int j, SparseInt m) {
  OperatorMatrix op;
  op.variant = v;
  op.j = j;
  op.real = m.cast<double>();
  op.integer = std::move(m);
  return op;
}

inline std::vector<std::uint8_t> interior_cells(const CWComplex& k, int j) {
  std::vector<std::uint8_t> keep(k.count(j), 1);
  if (k.dimension() >= 1) {
    auto b = boundary_subcomplex(k);
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = b.contains(j, i) ? 0 : 1;
  }
  return keep;
}

}  // namespace detail

/// ∂_j as an |E_{j-1}| × |E_j| integer matrix; with `relative`, rows and columns of cells in the
/// boundary subcomplex are zeroed.
inline OperatorMatrix boundary_matrix(const CWComplex& k, int j, bool relative = false) {
  if (j < 1 || j > k.dimension()) throw std::invalid_argument("boundary_matrix: need 1 <= j <= p");
  std::vector<std::uint8_t> keep_j, keep_f;
  if (relative) {
    keep_j = detail::interior_cells(k, j);
    keep_f = detail::interior_cells(k, j - 1);
  }
  std::vector<Eigen::Triplet<std::int64_t>> t;
  for (std::size_t c = 0; c < k.count(j); ++c) {
    if (relative && !keep_j[c]) continue;
    for (const auto& f : k.faces(j, c))
      if (!relative || keep_f[f.cell])
        t.emplace_back(static_cast<Eigen::Index>(f.cell), static_cast<Eigen::Index>(c), f.sign);
  }
  SparseInt m(static_cast<Eigen::Index>(k.count(j - 1)), static_cast<Eigen::Index>(k.count(j)));
  m.setFromTriplets(t.begin(), t.end());
  return detail::from_integer(relative ? Variant::rel_boundary : Variant::boundary, j, std::move(m));
}

enum class LaplacianKind { plus, minus, full };

inline std::string kind_name(LaplacianKind k) {
  return k == LaplacianKind::plus ? "plus" : k == LaplacianKind::minus ? "minus" : "full";
}

/// Δ_{j+} = ∂_{j+1}∂*_{j+1}, Δ_{j-} = ∂*_j∂_j, Δ_j = sum, in exact integers. The absent half
/// (Δ_{0-}, Δ_{p+}) is the zero operator.
inline OperatorMatrix laplacian(const CWComplex& k, int j, LaplacianKind kind = LaplacianKind::full,
                                bool relative = false) {
  if (j < 0 || j > k.dimension()) throw std::invalid_argument("laplacian: need 0 <= j <= p");
  const auto n = static_cast<Eigen::Index>(k.count(j));
  SparseInt m(n, n);
  if (kind != LaplacianKind::minus && j < k.dimension()) {
    auto b = boundary_matrix(k, j + 1, relative).integer.value();
    m = SparseInt(b * SparseInt(b.transpose()));
  }
  if (kind != LaplacianKind::plus && j >= 1) {
    auto b = boundary_matrix(k, j, relative).integer.value();
    m = SparseInt(m + SparseInt(SparseInt(b.transpose()) * b));
  }
  m.prune(std::int64_t{0}, 0);
  Variant v;
  if (kind == LaplacianKind::plus) v = relative ? Variant::rel_delta_plus : Variant::delta_plus;
  else if (kind == LaplacianKind::minus) v = relative ? Variant::rel_delta_minus : Variant::delta_minus;
  else v = relative ? Variant::rel_delta : Variant::delta;
  return detail::from_integer(v, j, std::move(m));
}

/// Principal submatrix on the given index list (ambient operator restricted to a window).
inline OperatorMatrix restrict_to(const OperatorMatrix& op, const std::vector<std::uint32_t>& idx) {
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(op.rows()), -1);
  for (std::size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = static_cast<Eigen::Index>(i);
  OperatorMatrix out = op;
  const auto n = static_cast<Eigen::Index>(idx.size());
  std::vector<Eigen::Triplet<double>> tr;
  std::vector<Eigen::Triplet<std::int64_t>> ti;
  for (Eigen::Index r = 0; r < op.real.outerSize(); ++r) {
    if (pos[r] < 0) continue;
    for (SparseReal::InnerIterator it(op.real, r); it; ++it)
      if (pos[it.col()] >= 0) tr.emplace_back(pos[r], pos[it.col()], it.value());
    if (op.integer)
      for (SparseInt::InnerIterator it(*op.integer, r); it; ++it)
        if (pos[it.col()] >= 0) ti.emplace_back(pos[r], pos[it.col()], it.value());
  }
  out.real = SparseReal(n, n);
  out.real.setFromTriplets(tr.begin(), tr.end());
  if (op.integer) {
    out.integer = SparseInt(n, n);
    out.integer->setFromTriplets(ti.begin(), ti.end());
  }
  return out;
}

/// The operators of the simple random walk on a connected graph.
struct WalkOperators {
  OperatorMatrix adjacency, degree, transition, delta_c, Q, laplacian;
  std::vector<std::int64_t> deg;
  std::size_t max_degree = 0;
};

/// A, C, P = C^{-1}A, Δ_c = I - P, Q = C^{-1/2} Δ C^{-1/2} and Δ = C - A for a 1-complex.
inline WalkOperators walk_operators(const CWComplex& g) {
  if (g.dimension() != 1) throw std::invalid_argument("walk_operators: need a 1-complex");
  const auto n = static_cast<Eigen::Index>(g.count(0));
  std::vector<Eigen::Triplet<std::int64_t>> ta;
  for (std::size_t e = 0; e < g.count(1); ++e) {
    auto fs = g.faces(1, e);
    ta.emplace_back(fs[0].cell, fs[1].cell, 1);
    ta.emplace_back(fs[1].cell, fs[0].cell, 1);
  }
  SparseInt a(n, n);
  a.setFromTriplets(ta.begin(), ta.end(), [](std::int64_t, std::int64_t) { return std::int64_t{1}; });
  WalkOperators w;
  w.deg.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index r = 0; r < n; ++r)
    for (SparseInt::InnerIterator it(a, r); it; ++it) w.deg[r] += it.value();
  for (Eigen::Index r = 0; r < n; ++r) {
    if (w.deg[r] == 0) throw std::invalid_argument("walk_operators: isolated vertex " + std::to_string(r));
    w.max_degree = std::max<std::size_t>(w.max_degree, static_cast<std::size_t>(w.deg[r]));
  }
  SparseInt c(n, n), lap(n, n);
  std::vector<Eigen::Triplet<std::int64_t>> tc;
  for (Eigen::Index r = 0; r < n; ++r) tc.emplace_back(r, r, w.deg[r]);
  c.setFromTriplets(tc.begin(), tc.end());
  lap = SparseInt(c - a);
  w.adjacency = detail::from_integer(Variant::adjacency, 0, a);
  w.degree = detail::from_integer(Variant::degree, 0, c);
  w.laplacian = detail::from_integer(Variant::delta, 0, lap);
  std::vector<Eigen::Triplet<double>> tp, tdc, tq;
  for (Eigen::Index r = 0; r < n; ++r) {
    tdc.emplace_back(r, r, 1.0);
    tq.emplace_back(r, r, 1.0);
    for (SparseInt::InnerIterator it(a, r); it; ++it) {
      const double pv = static_cast<double>(it.value()) / static_cast<double>(w.deg[r]);
      tp.emplace_back(r, it.col(), pv);
      tdc.emplace_back(r, it.col(), -pv);
      tq.emplace_back(r, it.col(),
                      -static_cast<double>(it.value()) / std::sqrt(static_cast<double>(w.deg[r] * w.deg[it.col()])));
    }
  }
  auto real_op = [&](Variant v, std::vector<Eigen::Triplet<double>>& t) {
    OperatorMatrix op;
    op.variant = v;
    op.real = SparseReal(n, n);
    op.real.setFromTriplets(t.begin(), t.end());
    return op;
  };
  w.transition = real_op(Variant::transition, tp);
  w.delta_c = real_op(Variant::delta_c, tdc);
  w.Q = real_op(Variant::Q, tq);
  return w;
}

/// Exact row-sum check of P = C^{-1}A: every row of A sums to the degree.
inline bool transition_rows_stochastic(const WalkOperators& w) {
  const auto& a = *w.adjacency.integer;
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    std::int64_t s = 0;
    for (SparseInt::InnerIterator it(a, r); it; ++it) s += it.value();
    if (s != w.deg[r]) return false;
  }
  return true;
}

/// Largest eigenvalue of a symmetric PSD matrix, dense below the size limit.
inline double top_eigenvalue(const SparseReal& m) {
  return m.rows() == 0 ? 0.0 : symmetric_eigenvalues(Eigen::MatrixXd(m)).maxCoeff();
}

struct NormBoundReport {
  int j = 0;
  double sigma_max_sq = 0;
  std::int64_t bound = 0;  // (V_j^-)^2 V_{j-1}^+
  bool holds = false;
  double slack() const { return static_cast<double>(bound) - sigma_max_sq; }
};

/// σ_max(∂_j)^2 against the degree bound (V_j^-)^2 V_{j-1}^+.
inline NormBoundReport norm_bound_check(const CWComplex& k, int j) {
  if (j < 1) throw std::invalid_argument("norm_bound_check: j >= 1");
  auto b = boundary_matrix(k, j).real;
  SparseReal g = b.rows() <= b.cols() ? SparseReal(b * SparseReal(b.transpose())) : SparseReal(SparseReal(b.transpose()) * b);
  auto db = degree_bounds(k);
  NormBoundReport r;
  r.j = j;
  r.sigma_max_sq = top_eigenvalue(g);
  r.bound = static_cast<std::int64_t>(db.v_minus[j] * db.v_minus[j] * db.v_plus[j - 1]);
  r.holds = r.sigma_max_sq <= static_cast<double>(r.bound) * (1 + 1e-12);
  return r;
}

/// Outcome of the graph-likeness search.
struct GraphLikeResult {
  bool graph_like = false;
  std::vector<int> orientation;     // per cell ±1 when graph_like
  std::vector<std::size_t> witness;  // cycle of cells with odd sign product, or a bad entry pair
  std::string reason;
};

/// Searches a per-cell sign flip making every off-diagonal entry 0 or -1 (BFS 2-colouring of the
/// signed support graph, lowest index first). Failing that, returns a cycle whose product of
/// negated entries is -1, which no sign flip can repair.
inline GraphLikeResult is_graph_like(const OperatorMatrix& op, bool try_reorientation = true) {
  if (!op.integer) throw std::invalid_argument("is_graph_like: needs an integer operator");
  const auto& m = *op.integer;
  const auto n = static_cast<std::size_t>(m.rows());
  GraphLikeResult res;
  std::vector<std::vector<std::pair<std::size_t, int>>> adj(n);  // (neighbour, required relative sign)
  for (Eigen::Index r = 0; r < m.outerSize(); ++r)
    for (SparseInt::InnerIterator it(m, r); it; ++it) {
      if (it.col() == r || it.value() == 0) continue;
      if (std::abs(it.value()) != 1) {
        res.witness = {static_cast<std::size_t>(r), static_cast<std::size_t>(it.col())};
        res.reason = "off-diagonal entry of absolute value " + std::to_string(std::abs(it.value()));
        return res;
      }
      // s_r s_c a_rc must equal -1
      adj[r].push_back({static_cast<std::size_t>(it.col()), it.value() > 0 ? -1 : 1});
    }
  std::vector<int> sign(n, 0);
  std::vector<std::size_t> parent(n, SIZE_MAX);
  if (!try_reorientation) {
    for (std::size_t v = 0; v < n; ++v)
      for (auto [w, rel] : adj[v])
        if (rel != 1) {
          res.witness = {v, w};
          res.reason = "positive off-diagonal entry with the given orientation";
          return res;
        }
    res.graph_like = true;
    res.orientation.assign(n, 1);
    return res;
  }
  for (std::size_t root = 0; root < n; ++root) {
    if (sign[root]) continue;
    sign[root] = 1;
    std::deque<std::size_t> q{root};
    while (!q.empty()) {
      auto v = q.front();
      q.pop_front();
      for (auto [w, rel] : adj[v]) {
        if (!sign[w]) {
          sign[w] = sign[v] * rel;
          parent[w] = v;
          q.push_back(w);
        } else if (sign[w] != sign[v] * rel) {
          // odd cycle: tree paths from v and w up to their common ancestor, closed by edge (v, w)
          std::vector<std::size_t> pv{v}, pw{w};
          while (parent[pv.back()] != SIZE_MAX) pv.push_back(parent[pv.back()]);
          while (parent[pw.back()] != SIZE_MAX) pw.push_back(parent[pw.back()]);
          while (pv.size() > 1 && pw.size() > 1 && pv[pv.size() - 2] == pw[pw.size() - 2]) {
            pv.pop_back();
            pw.pop_back();
          }
          res.witness.assign(pv.begin(), pv.end());
          for (auto it = pw.rbegin() + 1; it != pw.rend(); ++it) res.witness.push_back(*it);
          res.reason = "cycle with odd sign product";
          return res;
        }
      }
    }
  }
  res.graph_like = true;
  res.orientation = std::move(sign);
  return res;
}

/// Product over a closed cycle of the negated entries -a(c_i, c_{i+1}); -1 certifies non-graph-likeness.
inline int cycle_sign_product(const OperatorMatrix& op, const std::vector<std::size_t>& cycle) {
  int prod = 1;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    auto a = cycle[i], b = cycle[(i + 1) % cycle.size()];
    auto v = op.integer->coeff(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    if (v == 0) return 0;
    prod *= v > 0 ? -1 : 1;
  }
  return prod;
}

struct GeometricReport {
  std::size_t testable = 0;
  std::size_t failures = 0;
  std::vector<std::string> messages;
  bool passed() const { return failures == 0; }
};

/// Checks T V(γ)σ = V(γ) T σ and the adjoint identity for every j-cell σ whose r-ball lies in the
/// source and whose image's r-ball lies in the target. T must be a square operator on E_j of the
/// complex carrying `iso`.
inline GeometricReport verify_geometric(const OperatorMatrix& op, const CWComplex& k, const LocalIsomorphism& iso,
                                        std::size_t r) {
  const int j = op.j;
  GeometricReport rep;
  const SparseReal& rowm = op.real;
  const SparseReal colm = SparseReal(op.real.transpose());
  auto ball_inside = [&](std::size_t c, const SubcomplexMask& mask) {
    for (auto b : ball(k, {j, c}, r))
      if (!mask.contains(j, b)) return false;
    return true;
  };
  auto compare = [&](const SparseReal& m, std::size_t s, std::size_t gs, const char* what) {
    std::size_t nnz_s = 0, nnz_g = 0;
    for (SparseReal::InnerIterator it(m, static_cast<Eigen::Index>(s)); it; ++it) {
      if (it.value() == 0) continue;
      ++nnz_s;
      auto img = iso.apply(j, static_cast<std::size_t>(it.col()));
      if (!img || m.coeff(static_cast<Eigen::Index>(gs), static_cast<Eigen::Index>(*img)) != it.value()) return false;
    }
    for (SparseReal::InnerIterator it(m, static_cast<Eigen::Index>(gs)); it; ++it)
      if (it.value() != 0) ++nnz_g;
    (void)what;
    return nnz_s == nnz_g;
  };
  for (std::size_t s = 0; s < k.count(j); ++s) {
    if (!iso.source.contains(j, s)) continue;
    auto gs = *iso.apply(j, s);
    if (!ball_inside(s, iso.source) || !ball_inside(gs, iso.target)) continue;
    ++rep.testable;
    bool ok = compare(colm, s, gs, "column") && compare(rowm, s, gs, "row");
    if (!ok) {
      ++rep.failures;
      if (rep.messages.size() < 10)
        rep.messages.push_back("cell " + std::to_string(s) + " -> " + std::to_string(gs) + " breaks T V = V T");
    }
  }
  return rep;
}

/// Matrix Market coordinate export; integer entries when available, else decimal reals.
inline void write_matrix_market(std::ostream& os, const OperatorMatrix& op) {
  const bool ints = op.integer.has_value();
  os << "%%MatrixMarket matrix coordinate " << (ints ? "integer" : "real") << " general\n";
  os << "% " << op.tag() << " level " << op.level << '\n';
  os << op.rows() << ' ' << op.cols() << ' ' << (ints ? op.integer->nonZeros() : op.real.nonZeros()) << '\n';
  if (ints) {
    for (Eigen::Index r = 0; r < op.integer->outerSize(); ++r)
      for (SparseInt::InnerIterator it(*op.integer, r); it; ++it)
        os << r + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
  } else {
    char buf[64];
    for (Eigen::Index r = 0; r < op.real.outerSize(); ++r)
      for (SparseReal::InnerIterator it(op.real, r); it; ++it) {
        std::snprintf(buf, sizeof buf, "%.17g", it.value());
        os << r + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
      }
  }
}

/// Reads a Matrix Market coordinate file into an integer matrix (integer field only).
inline SparseInt read_matrix_market_integer(std::istream& is) {
  std::string line;
  std::getline(is, line);
  if (line.rfind("%%MatrixMarket matrix coordinate integer", 0) != 0)
    throw std::runtime_error("matrix market: expected integer coordinate header");
  while (is.peek() == '%') std::getline(is, line);
  Eigen::Index r = 0, c = 0, nnz = 0;
  is >> r >> c >> nnz;
  std::vector<Eigen::Triplet<std::int64_t>> t;
  for (Eigen::Index i = 0; i < nnz; ++i) {
    Eigen::Index a = 0, b = 0;
    std::int64_t v = 0;
    if (!(is >> a >> b >> v)) throw std::runtime_error("matrix market: truncated");
    t.emplace_back(a - 1, b - 1, v);
  }
  SparseInt m(r, c);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace sscw
