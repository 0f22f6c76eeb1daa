#pragma once

#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "exhaustion.hpp"
#include "linalg.hpp"
#include "metric.hpp"
#include "operators.hpp"
#include "tolerances.hpp"

namespace sscw {

enum class Normalization { state, volume };
enum class ErrorKind { rigorous, heuristic, none };

inline std::string normalization_name(Normalization n) { return n == Normalization::state ? "state" : "volume"; }
inline std::string error_kind_name(ErrorKind k) {
  return k == ErrorKind::rigorous ? "rigorous" : k == ErrorKind::heuristic ? "heuristic" : "none";
}

/// Thrown when the window of a truncated trace is too close to the edge of the ambient level.
struct MarginError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceEstimate {
  double value = 0.0;
  int level = 0;
  std::optional<double> error_bound;
  ErrorKind kind = ErrorKind::none;
  Normalization normalization = Normalization::state;
};

struct TraceSample {
  double t = 0.0;
  TraceEstimate estimate;
};

struct TraceCurve {
  std::string curve;  // heat, resolvent, density, power, power_paired
  std::string operator_tag;
  int j = 0;
  int level = 0;
  int ambient = 0;
  Normalization normalization = Normalization::volume;
  std::vector<TraceSample> samples;

  std::vector<double> ts() const {
    std::vector<double> out;
    for (const auto& s : samples) out.push_back(s.t);
    return out;
  }
  std::vector<double> values() const {
    std::vector<double> out;
    for (const auto& s : samples) out.push_back(s.estimate.value);
    return out;
  }
};

/// Which Laplacian to assemble.
struct OperatorSpec {
  LaplacianKind kind = LaplacianKind::full;
  int j = 0;
  bool relative = false;

  std::string tag() const {
    return std::string(relative ? "rel_" : "") + "delta_" + std::to_string(j) +
           (kind == LaplacianKind::plus ? "+" : kind == LaplacianKind::minus ? "-" : "");
  }
  OperatorMatrix assemble(const CWComplex& k) const { return laplacian(k, j, kind, relative); }
};

/// Indices in K_m of the j-cells of the window ι(K_n).
inline std::vector<std::uint32_t> window_indices(const Exhaustion& ex, int j, int n, int m) {
  return ex.embedding(n, m).image.at(static_cast<std::size_t>(j));
}

/// Upper bound for the operator norm: sqrt(max row sum * max column sum) of absolute entries.
inline double norm_upper_bound(const SparseReal& a) {
  std::vector<double> col(static_cast<std::size_t>(a.cols()), 0.0);
  double row = 0.0;
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    double s = 0.0;
    for (SparseReal::InnerIterator it(a, r); it; ++it) {
      s += std::abs(it.value());
      col[it.col()] += std::abs(it.value());
    }
    row = std::max(row, s);
  }
  double c = 0.0;
  for (double v : col) c = std::max(c, v);
  return std::sqrt(row * c);
}

/// Largest distance d(σ, σ') over the nonzero entries of a square operator on the j-cells of k.
inline std::size_t propagation_radius(const SparseReal& a, const CWComplex& k, int j) {
  if (static_cast<std::size_t>(a.rows()) != k.count(j)) throw std::invalid_argument("propagation_radius: size mismatch");
  std::size_t r = 0;
  for (Eigen::Index row = 0; row < a.outerSize(); ++row) {
    std::vector<std::size_t> targets;
    for (SparseReal::InnerIterator it(a, row); it; ++it)
      if (it.col() != row && it.value() != 0.0) targets.push_back(static_cast<std::size_t>(it.col()));
    if (targets.empty()) continue;
    for (std::size_t limit = std::max<std::size_t>(r, 1);; limit *= 2) {
      auto d = distances_from(k, {j, static_cast<std::size_t>(row)}, Flavor::d, limit);
      bool all = true;
      std::size_t far = 0;
      for (auto t : targets) {
        if (!d[t]) {
          all = false;
          break;
        }
        far = std::max(far, *d[t]);
      }
      if (all) {
        r = std::max(r, far);
        break;
      }
      if (limit > k.count(j)) throw std::invalid_argument("propagation_radius: entry joins different components");
    }
  }
  return r;
}

/// Checks that the (r-1)-neighbourhood of the window ι(K_n) avoids the frontier of K_m inside K_{m+1},
/// so that operators of propagation r see the same cells around the window as on the infinite complex.
/// Returns false when the check cannot be made (m is the top stored level); throws MarginError on failure.
inline bool check_margin(const Exhaustion& ex, int j, int n, int m, std::size_t r) {
  if (n == m || r == 0) return true;
  if (m >= ex.top()) return false;
  const auto& km = ex.level(m);
  const auto& kup = ex.level(m + 1);
  std::vector<std::size_t> stamp(kup.count(j), SIZE_MAX);
  auto edge = pulled_back_frontier(kup, ex.embedding(m, m + 1), j, stamp, 0);
  std::vector<std::uint8_t> bad(km.count(j), 0);
  for (auto i : edge) bad[i] = 1;
  std::vector<Distance> dist(km.count(j));
  std::deque<std::size_t> queue;
  for (auto i : window_indices(ex, j, n, m)) {
    dist[i] = 0;
    queue.push_back(i);
  }
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    if (bad[v])
      throw MarginError("window K_" + std::to_string(n) + " reaches the frontier of K_" + std::to_string(m) +
                        " within distance " + std::to_string(*dist[v]) + " (propagation " + std::to_string(r) +
                        "); raise the ambient level");
    if (*dist[v] + 1 >= r) continue;
    for_each_neighbor(km, j, v, Flavor::d, [&](std::size_t w) {
      if (!dist[w]) {
        dist[w] = *dist[v] + 1;
        queue.push_back(w);
      }
    });
  }
  return true;
}

namespace detail {

inline std::int64_t norm_denominator(const Exhaustion& ex, int j, int n, Normalization nz) {
  const auto& k = ex.level(n);
  return static_cast<std::int64_t>(nz == Normalization::state ? k.count(j) : k.count(k.dimension()));
}

inline bool is_scalar(const SparseReal& a) {
  if (a.rows() == 0) return true;
  const double c = a.coeff(0, 0);
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    bool diag = false;
    for (SparseReal::InnerIterator it(a, r); it; ++it) {
      if (it.col() != r && it.value() != 0.0) return false;
      if (it.col() == r) {
        if (it.value() != c) return false;
        diag = true;
      }
    }
    if (!diag && c != 0.0) return false;
  }
  return true;
}

inline TraceEstimate truncated_trace(const Exhaustion& ex, const OperatorMatrix& op, int n, int m,
                                     Normalization nz, std::optional<std::size_t> radius) {
  const int j = op.j;
  if (n > m || m > ex.top()) throw std::invalid_argument("trace: need n <= m <= top level");
  const auto& km = ex.level(m);
  if (static_cast<std::size_t>(op.rows()) != km.count(j) || op.cols() != op.rows())
    throw std::invalid_argument("trace: operator is not a square operator on E_j(K_m)");
  const std::size_t r = radius ? *radius : propagation_radius(op.real, km, j);
  const bool verified = check_margin(ex, j, n, m, r);
  double tr = 0.0;
  for (auto i : window_indices(ex, j, n, m)) tr += op.real.coeff(i, i);
  TraceEstimate e;
  e.level = n;
  e.normalization = nz;
  e.value = tr / static_cast<double>(norm_denominator(ex, j, n, nz));
  if (is_scalar(op.real)) {
    // cI has the same normalized trace c at every level.
    e.error_bound = 0.0;
    e.kind = ErrorKind::rigorous;
  } else if (n < m && verified) {
    auto fs = frontier_stats(ex, n, j);
    const double mu = static_cast<double>(degree_bounds(ex.level(ex.top())).mu[j]);
    double bound = 5.0 * norm_upper_bound(op.real) * fs.epsilon * std::pow(mu, static_cast<double>(r));
    if (nz == Normalization::volume)
      bound *= static_cast<double>(fs.cells) / static_cast<double>(norm_denominator(ex, j, n, nz));
    e.error_bound = bound;
    e.kind = ErrorKind::rigorous;
  }
  return e;
}

}  // namespace detail

/// Φ^(n)(T) = Tr(E(E_j K_n) T) / |E_j K_n| for T assembled on K_m. The bound 5‖T‖ε_nμ^r is
/// attached when copy maps above n exist and the window margin was verified.
inline TraceEstimate trace_state(const Exhaustion& ex, const OperatorMatrix& op, int n, int m,
                                 std::optional<std::size_t> radius = std::nullopt) {
  return detail::truncated_trace(ex, op, n, m, Normalization::state, radius);
}

/// Tr(E(E_j K_n) T) / |E_p K_n|; the state bound is rescaled by |E_j K_n| / |E_p K_n|.
inline TraceEstimate trace_volume(const Exhaustion& ex, const OperatorMatrix& op, int n, int m,
                                  std::optional<std::size_t> radius = std::nullopt) {
  return detail::truncated_trace(ex, op, n, m, Normalization::volume, radius);
}

/// Spectrum of a symmetric ambient operator with the window weights w_k = Σ_{σ∈W} v_k(σ)^2.
struct WindowSpectrum {
  Eigen::VectorXd values;
  Eigen::VectorXd weights;
  std::size_t window = 0;
  std::int64_t state_norm = 1;
  std::int64_t volume_norm = 1;
  int level = 0;
  int ambient = 0;
  int j = 0;
  std::string tag;

  double norm(Normalization nz) const {
    return static_cast<double>(nz == Normalization::state ? state_norm : volume_norm);
  }
  template <class F>
  double sum(F&& f) const {
    double s = 0.0;
    for (Eigen::Index k = 0; k < values.size(); ++k) s += weights[k] * f(values[k]);
    return s;
  }
  double heat(double t, Normalization nz) const {
    if (t == 0.0) return static_cast<double>(window) / norm(nz);
    return sum([t](double l) { return std::exp(-t * l); }) / norm(nz);
  }
  double resolvent(double t, Normalization nz) const {
    if (t == 0.0) return static_cast<double>(window) / norm(nz);
    return sum([t](double l) { return 1.0 / (1.0 + t * l); }) / norm(nz);
  }
  double power(int k, Normalization nz) const {
    if (k == 0) return static_cast<double>(window) / norm(nz);
    return sum([k](double l) { return std::pow(l, k); }) / norm(nz);
  }
  double counting(double lambda, Normalization nz) const {
    return sum([lambda](double l) { return l <= lambda ? 1.0 : 0.0; }) / norm(nz);
  }
  /// Window weight of the kernel (the large-time limit of the heat trace).
  double kernel_weight(Normalization nz) const { return counting(0.0, nz); }
  double lambda_max() const { return values.size() ? values.maxCoeff() : 0.0; }
  /// Smallest positive eigenvalue, or +inf when there is none.
  double lambda_min_positive() const {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < values.size(); ++k)
      if (values[k] > 0.0) m = std::min(m, values[k]);
    return m;
  }
};

/// Diagonalizes `sym` densely and records the weights of the rows in `window`. Eigenvectors are
/// skipped when the window covers every row. With `snap_zero`, eigenvalues within the spectral
/// tolerance of 0 are set to exactly 0.
inline WindowSpectrum window_spectrum(const SparseReal& sym, const std::vector<std::uint32_t>& window,
                                      bool snap_zero = true) {
  WindowSpectrum s;
  s.window = window.size();
  const bool full = window.size() == static_cast<std::size_t>(sym.rows());
  auto eig = symmetric_eigen(Eigen::MatrixXd(sym), !full);
  s.values = std::move(eig.values);
  if (full) {
    s.weights = Eigen::VectorXd::Ones(s.values.size());
  } else {
    s.weights = Eigen::VectorXd::Zero(s.values.size());
    for (auto i : window) s.weights += eig.vectors.row(i).transpose().cwiseAbs2();
  }
  if (snap_zero) {
    const double tol = Tolerances::spectral * std::max(1.0, s.values.cwiseAbs().maxCoeff());
    for (auto& v : s.values)
      if (std::abs(v) <= tol) v = 0.0;
  }
  return s;
}

/// Window spectrum of a Laplacian assembled on K_m, restricted to ι(K_n).
inline WindowSpectrum window_spectrum(const Exhaustion& ex, const OperatorSpec& spec, int n, int m) {
  if (n > m || m > ex.top()) throw std::invalid_argument("window_spectrum: need n <= m <= top level");
  auto op = spec.assemble(ex.level(m));
  check_margin(ex, spec.j, n, m, 1);
  auto s = window_spectrum(op.real, window_indices(ex, spec.j, n, m));
  s.state_norm = detail::norm_denominator(ex, spec.j, n, Normalization::state);
  s.volume_norm = detail::norm_denominator(ex, spec.j, n, Normalization::volume);
  s.level = n;
  s.ambient = m;
  s.j = spec.j;
  s.tag = spec.tag();
  return s;
}

namespace detail {

template <class F>
TraceCurve sample_curve(const std::string& name, const WindowSpectrum& s, const WindowSpectrum* coarser,
                        const std::vector<double>& args, Normalization nz, F&& eval) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!(args[i] >= 0.0)) throw std::invalid_argument(name + ": arguments must be nonnegative");
    if (i && args[i] <= args[i - 1]) throw std::invalid_argument(name + ": arguments must be ascending");
  }
  TraceCurve c;
  c.curve = name;
  c.operator_tag = s.tag;
  c.j = s.j;
  c.level = s.level;
  c.ambient = s.ambient;
  c.normalization = nz;
  for (double t : args) {
    TraceSample smp;
    smp.t = t;
    smp.estimate.value = eval(s, t);
    smp.estimate.level = s.level;
    smp.estimate.normalization = nz;
    if (coarser) {
      smp.estimate.error_bound = std::abs(smp.estimate.value - eval(*coarser, t));
      smp.estimate.kind = ErrorKind::heuristic;
    }
    c.samples.push_back(smp);
  }
  return c;
}

}  // namespace detail

/// Tr(E_W e^{-tΔ}) / norm per t; `coarser` (same window, ambient m-1) supplies the heuristic error.
inline TraceCurve heat_curve(const WindowSpectrum& s, const WindowSpectrum* coarser, const std::vector<double>& times,
                             Normalization nz = Normalization::volume) {
  return detail::sample_curve("heat", s, coarser, times, nz,
                              [nz](const WindowSpectrum& w, double t) { return w.heat(t, nz); });
}

inline TraceCurve resolvent_curve(const WindowSpectrum& s, const WindowSpectrum* coarser,
                                  const std::vector<double>& times, Normalization nz = Normalization::volume) {
  return detail::sample_curve("resolvent", s, coarser, times, nz,
                              [nz](const WindowSpectrum& w, double t) { return w.resolvent(t, nz); });
}

/// Normalized eigenvalue counting function N_λ with window weights.
inline TraceCurve density_curve(const WindowSpectrum& s, const WindowSpectrum* coarser,
                                const std::vector<double>& lambdas, Normalization nz = Normalization::volume) {
  return detail::sample_curve("density", s, coarser, lambdas, nz,
                              [nz](const WindowSpectrum& w, double l) { return w.counting(l, nz); });
}

namespace detail {

template <class Curve>
TraceCurve ambient_curve(const Exhaustion& ex, const OperatorSpec& spec, int n, int m, const std::vector<double>& args,
                         Normalization nz, Curve&& curve) {
  auto s = window_spectrum(ex, spec, n, m);
  if (m - 1 >= n) {
    auto c = window_spectrum(ex, spec, n, m - 1);
    return curve(s, &c, args, nz);
  }
  return curve(s, nullptr, args, nz);
}

}  // namespace detail

/// Heat trace of the Laplacian on K_m restricted to the window K_n, with the (m, m-1) heuristic error.
inline TraceCurve heat_trace(const Exhaustion& ex, const OperatorSpec& spec, int n, int m,
                             const std::vector<double>& times, Normalization nz = Normalization::volume) {
  return detail::ambient_curve(ex, spec, n, m, times, nz, heat_curve);
}

inline TraceCurve resolvent_trace(const Exhaustion& ex, const OperatorSpec& spec, int n, int m,
                                  const std::vector<double>& times, Normalization nz = Normalization::volume) {
  return detail::ambient_curve(ex, spec, n, m, times, nz, resolvent_curve);
}

inline TraceCurve spectral_density(const Exhaustion& ex, const OperatorSpec& spec, int n, int m,
                                   const std::vector<double>& lambdas, Normalization nz = Normalization::volume) {
  return detail::ambient_curve(ex, spec, n, m, lambdas, nz, density_curve);
}

/// Spectrum of S = C^{-1/2} A C^{-1/2} (similar to P = C^{-1}A) on a connected graph, window weighted.
inline WindowSpectrum walk_spectrum(const CWComplex& g, const std::vector<std::uint32_t>& window) {
  if (g.dimension() != 1) throw std::invalid_argument("walk_spectrum: need a 1-complex");
  if (!is_connected(g, 0, Flavor::d)) throw std::invalid_argument("walk_spectrum: graph is disconnected");
  auto w = walk_operators(g);
  SparseReal id(w.Q.rows(), w.Q.cols());
  id.setIdentity();
  SparseReal s = id - w.Q.real;
  auto sp = window_spectrum(s, window, false);
  sp.state_norm = sp.volume_norm = static_cast<std::int64_t>(window.size());
  sp.tag = "transition";
  return sp;
}

/// Walk spectrum of the graph exhaustion level m restricted to ι(K_n).
inline WindowSpectrum walk_spectrum(const Exhaustion& ex, int n, int m) {
  auto s = walk_spectrum(ex.level(m), window_indices(ex, 0, n, m));
  s.level = n;
  s.ambient = m;
  s.volume_norm = detail::norm_denominator(ex, 0, n, Normalization::volume);
  return s;
}

/// τ(P^k) and τ(P^k + P^{k+1}) for k = 0..k_max under state normalization.
struct PowerTrace {
  std::vector<double> single;
  std::vector<double> paired;
  int level = 0;
  int ambient = 0;
};

inline PowerTrace power_trace(const WindowSpectrum& s, int k_max) {
  if (k_max < 2) throw std::invalid_argument("power_trace: k_max >= 2");
  PowerTrace p;
  p.level = s.level;
  p.ambient = s.ambient;
  Eigen::VectorXd pw = s.weights;  // w_i λ_i^k
  std::vector<double> all;
  for (int k = 0; k <= k_max + 1; ++k) {
    all.push_back(k == 0 ? static_cast<double>(s.window) / s.norm(Normalization::state)
                         : pw.sum() / s.norm(Normalization::state));
    pw = pw.cwiseProduct(s.values);
  }
  for (int k = 0; k <= k_max; ++k) {
    p.single.push_back(all[k]);
    p.paired.push_back(all[k] + all[k + 1]);
  }
  return p;
}

/// Same traces by propagating P^k e_x for every window vertex x, in column blocks.
inline PowerTrace power_trace_propagated(const CWComplex& g, const std::vector<std::uint32_t>& window, int k_max) {
  if (k_max < 2) throw std::invalid_argument("power_trace: k_max >= 2");
  if (!is_connected(g, 0, Flavor::d)) throw std::invalid_argument("walk_spectrum: graph is disconnected");
  const SparseReal p = walk_operators(g).transition.real;
  const auto nv = p.rows();
  std::vector<double> all(static_cast<std::size_t>(k_max) + 2, 0.0);
  constexpr std::size_t kBlock = 256;
  for (std::size_t b0 = 0; b0 < window.size(); b0 += kBlock) {
    const auto bs = static_cast<Eigen::Index>(std::min(kBlock, window.size() - b0));
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(nv, bs), next(nv, bs);
    for (Eigen::Index c = 0; c < bs; ++c) v(window[b0 + c], c) = 1.0;
    for (std::size_t k = 0; k < all.size(); ++k) {
      if (k) {
        next.noalias() = p * v;
        v.swap(next);
      }
      for (Eigen::Index c = 0; c < bs; ++c) all[k] += v(window[b0 + c], c);
    }
  }
  PowerTrace out;
  const double w = static_cast<double>(window.size());
  for (int k = 0; k <= k_max; ++k) {
    out.single.push_back(all[k] / w);
    out.paired.push_back((all[k] + all[k + 1]) / w);
  }
  return out;
}

/// Dense walk spectrum or block propagation, whichever needs fewer flops.
inline PowerTrace power_trace(const Exhaustion& ex, int n, int m, int k_max) {
  const auto& g = ex.level(m);
  const double nv = static_cast<double>(g.count(0)), nnz = 2.0 * static_cast<double>(g.count(1));
  const auto window = window_indices(ex, 0, n, m);
  PowerTrace p = static_cast<double>(window.size()) * (k_max + 2.0) * nnz < nv * nv * nv
                     ? power_trace_propagated(g, window, k_max)
                     : power_trace(walk_spectrum(ex, n, m), k_max);
  p.level = n;
  p.ambient = m;
  return p;
}

/// Reported check of a bound |value| <= bound.
struct BoundCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// |Φ^(n)([A, B])| <= 2‖A‖‖B‖ε_nμ^r for operators on the j-cells of K_m, r the larger propagation radius.
inline BoundCheck commutator_check(const Exhaustion& ex, const OperatorMatrix& a, const OperatorMatrix& b, int n,
                                   int m) {
  const auto& km = ex.level(m);
  const int j = a.j;
  const std::size_t r = std::max(propagation_radius(a.real, km, j), propagation_radius(b.real, km, j));
  SparseReal c = SparseReal(a.real * b.real) - SparseReal(b.real * a.real);
  double tr = 0.0;
  for (auto i : window_indices(ex, j, n, m)) tr += c.coeff(i, i);
  auto fs = frontier_stats(ex, n, j);
  const double mu = static_cast<double>(degree_bounds(ex.level(ex.top())).mu[j]);
  BoundCheck out;
  out.name = "commutator";
  out.value = std::abs(tr / static_cast<double>(fs.cells));
  out.bound = 2.0 * norm_upper_bound(a.real) * norm_upper_bound(b.real) * fs.epsilon * std::pow(mu, double(r));
  out.holds = out.value <= out.bound + Tolerances::identity;
  return out;
}

/// |Φ^(n)(T) - Φ^(n2)(T)| <= 5‖T‖ε_nμ^r for n < n2 <= m, T assembled on K_m.
inline BoundCheck cauchy_check(const Exhaustion& ex, const OperatorMatrix& t, int n, int n2, int m) {
  if (!(n < n2 && n2 <= m)) throw std::invalid_argument("cauchy_check: need n < n2 <= m");
  const auto& km = ex.level(m);
  const std::size_t r = propagation_radius(t.real, km, t.j);
  auto a = trace_state(ex, t, n, m, r);
  auto b = trace_state(ex, t, n2, m, r);
  auto fs = frontier_stats(ex, n, t.j);
  const double mu = static_cast<double>(degree_bounds(ex.level(ex.top())).mu[t.j]);
  BoundCheck out;
  out.name = "cauchy";
  out.value = std::abs(a.value - b.value);
  out.bound = 5.0 * norm_upper_bound(t.real) * fs.epsilon * std::pow(mu, double(r));
  out.holds = out.value <= out.bound + Tolerances::identity;
  return out;
}

/// CSV rendering `t,value,error_bound,kind` with 17 significant digits; a missing bound is left empty.
inline void write_curve_csv(std::ostream& os, const TraceCurve& c) {
  char buf[64];
  os << "t,value,error_bound,kind\n";
  for (const auto& s : c.samples) {
    std::snprintf(buf, sizeof buf, "%.17g", s.t);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", s.estimate.value);
    os << buf << ',';
    if (s.estimate.error_bound) {
      std::snprintf(buf, sizeof buf, "%.17g", *s.estimate.error_bound);
      os << buf;
    }
    os << ',' << error_kind_name(s.estimate.kind) << '\n';
  }
}

/// Log-spaced grid of `count` points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo && count >= 2)) throw std::invalid_argument("log_grid: need 0 < lo < hi and count >= 2");
  std::vector<double> out;
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out.push_back(std::exp(a + (b - a) * i / (count - 1)));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace sscw
