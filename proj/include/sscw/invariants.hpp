#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "builders.hpp"
#include "operators.hpp"
#include "tolerances.hpp"
#include "trace.hpp"

namespace sscw {

// ---------------------------------------------------------------------------
// Log-log fits

struct FitResult {
  double exponent = std::numeric_limits<double>::quiet_NaN();  // -slope: γ, or α/2 for heat curves
  double amplitude = std::numeric_limits<double>::quiet_NaN();
  double lo = 0.0, hi = 0.0;  // fit window in the curve's abscissa
  double residual = std::numeric_limits<double>::quiet_NaN();
  double beta_subtracted = 0.0;
  double slope_stderr = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;
  bool indeterminate = true;
  std::string message;

  double alpha() const { return 2.0 * exponent; }
};

struct WindowPolicy {
  bool automatic = true;
  double lo = 0.0, hi = 0.0;  // fixed window (inclusive), used when !automatic
  double clip_lo = 1.0;       // automatic windows start at or after this abscissa
  double clip_hi = std::numeric_limits<double>::infinity();
  double variation = Tolerances::slope_variation;
  std::size_t min_points = 5;
  /// Width, in decades of the abscissa, of the secant used as the local slope. Log-periodic
  /// oscillations shorter than this are averaged out before the variation test.
  double slope_scale = 1.0;

  static WindowPolicy fixed(double lo, double hi) {
    WindowPolicy p;
    p.automatic = false;
    p.lo = lo;
    p.hi = hi;
    return p;
  }
};

namespace detail {

struct Ols {
  double slope = 0, intercept = 0, stderr_slope = 0, residual = 0;
};

inline Ols ols(const std::vector<double>& x, const std::vector<double>& y, std::size_t a, std::size_t b) {
  const double n = static_cast<double>(b - a + 1);
  double mx = 0, my = 0;
  for (std::size_t i = a; i <= b; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = a; i <= b; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Ols o;
  o.slope = sxy / sxx;
  o.intercept = my - o.slope * mx;
  double sse = 0;
  for (std::size_t i = a; i <= b; ++i) {
    const double d = y[i] - (o.intercept + o.slope * x[i]);
    sse += d * d;
    o.residual = std::max(o.residual, std::abs(d));
  }
  o.stderr_slope = n > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
  return o;
}

}  // namespace detail

/// OLS of log(y - beta) on log(x). The automatic policy takes the widest run of admissible samples
/// (clip_lo <= x <= clip_hi, y > beta) on which every local slope stays within `variation` of the
/// fitted slope; the fixed policy fits every admissible sample in [lo, hi].
inline FitResult fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys, double beta,
                               const WindowPolicy& pol) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  FitResult fr;
  fr.beta_subtracted = beta;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool in = pol.automatic ? (xs[i] >= pol.clip_lo && xs[i] <= pol.clip_hi) : (xs[i] >= pol.lo * (1 - 1e-9) && xs[i] <= pol.hi * (1 + 1e-9));
    const double d = ys[i] - beta;
    if (!in || !(xs[i] > 0.0)) continue;
    if (!(d > 1e-13 * std::max(1.0, std::abs(ys[i])))) {
      if (pol.automatic) break;  // the admissible run ends where the curve meets its plateau
      continue;
    }
    x.push_back(std::log(xs[i]));
    y.push_back(std::log(d));
  }
  if (x.size() < std::max<std::size_t>(pol.min_points, 3)) {
    fr.message = "empty admissible window (finite-size limited): " + std::to_string(x.size()) + " usable samples";
    return fr;
  }
  std::size_t a = 0, b = x.size() - 1;
  if (pol.automatic) {
    const std::size_t n = x.size();
    const double half = 0.5 * pol.slope_scale * std::log(10.0);
    std::vector<double> local(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t l = i, r = i;
      while (l > 0 && x[i] - x[l] < half) --l;
      while (r + 1 < n && x[r] - x[i] < half) ++r;
      if (l == r) r = std::min(n - 1, i + 1), l = r == i ? i - 1 : i;
      local[i] = (y[r] - y[l]) / (x[r] - x[l]);
    }
    double best = -1;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = i + pol.min_points - 1; k < n; ++k) {
        const double span = x[k] - x[i];
        if (span <= best) continue;
        const auto o = detail::ols(x, y, i, k);
        bool ok = o.slope != 0.0;
        for (std::size_t q = i; ok && q <= k; ++q) ok = std::abs(local[q] - o.slope) <= pol.variation * std::abs(o.slope);
        if (ok) {
          best = span;
          a = i;
          b = k;
          found = true;
        }
      }
    if (!found) {
      fr.message = "empty admissible window: local slope varies by more than " +
                   std::to_string(pol.variation * 100) + "% on every sub-window";
      return fr;
    }
  }
  const auto o = detail::ols(x, y, a, b);
  fr.exponent = -o.slope;
  fr.amplitude = std::exp(o.intercept);
  fr.lo = std::exp(x[a]);
  fr.hi = std::exp(x[b]);
  fr.residual = o.residual;
  fr.slope_stderr = o.stderr_slope;
  fr.points = b - a + 1;
  fr.indeterminate = !(fr.exponent > 0.0);
  fr.message = fr.indeterminate ? "non-positive decay exponent" : "ok";
  return fr;
}

/// α fit of a heat curve: slope of log(value - β) against log t, α = -2 slope. The automatic window
/// is also clipped at t <= c / λ_min, beyond which the finite level dominates.
inline FitResult estimate_alpha(const TraceCurve& curve, double beta, WindowPolicy pol,
                                double lambda_min = 0.0, double c = 1.0) {
  if (pol.automatic && lambda_min > 0.0) pol.clip_hi = std::min(pol.clip_hi, c / lambda_min);
  return fit_power_law(curve.ts(), curve.values(), beta, pol);
}

// ---------------------------------------------------------------------------
// Kernel dimensions and β

/// Rank of ∂_j (exact). Graph incidence ranks use connected components.
inline std::size_t boundary_rank(const CWComplex& k, int j, bool relative = false) {
  if (j < 1 || j > k.dimension()) return 0;
  if (j == 1 && !relative) {
    detail::UnionFind uf(k.count(0));
    std::size_t r = 0;
    for (std::size_t e = 0; e < k.count(1); ++e) {
      auto fs = k.faces(1, e);
      if (fs.size() == 2 && uf.unite(fs[0].cell, fs[1].cell)) ++r;
    }
    return r;
  }
  return modular_rank(boundary_matrix(k, j, relative).integer.value());
}

/// dim ker of Δ_{j±} or Δ_j from exact boundary ranks (Hodge decomposition).
inline std::size_t kernel_dimension(const CWComplex& k, int j, LaplacianKind kind = LaplacianKind::full,
                                    bool relative = false) {
  std::size_t dim = k.count(j);
  if (kind != LaplacianKind::minus) dim -= boundary_rank(k, j + 1, relative);
  if (kind != LaplacianKind::plus) dim -= boundary_rank(k, j, relative);
  return dim;
}

struct BetaEstimate {
  double primary = 0.0;   // window kernel weight of the ambient operator / |E_p K_n|
  double tail = 0.0;      // last sample of the heat curve
  double discrepancy = 0.0;
  std::vector<std::pair<int, Rational>> trend;  // exact dim ker Δ^(n) / |E_p K_n| per level
};

/// Primary β̂ from the window kernel weight, the heat tail as secondary, and the exact finite-level
/// kernel trend over levels 0..up_to.
inline BetaEstimate estimate_beta(const WindowSpectrum& s, const TraceCurve& curve, const Exhaustion& ex,
                                  const OperatorSpec& spec, int up_to) {
  BetaEstimate b;
  b.primary = s.kernel_weight(curve.normalization);
  b.tail = curve.samples.empty() ? b.primary : curve.samples.back().estimate.value;
  b.discrepancy = std::abs(b.primary - b.tail);
  for (int n = 0; n <= up_to; ++n) {
    const auto& k = ex.level(n);
    b.trend.push_back({n, Rational(static_cast<std::int64_t>(kernel_dimension(k, spec.j, spec.kind, spec.relative)),
                                   static_cast<std::int64_t>(k.count(k.dimension())))});
  }
  return b;
}

// ---------------------------------------------------------------------------
// Euler characteristic

struct EulerResult {
  std::vector<std::vector<std::int64_t>> counts;  // counts[n][j]
  std::vector<Rational> sequence;                 // χ(K_n) / |E_p K_n|
  std::vector<Rational> alternating;              // Σ (-1)^j |E_j K_n| / |E_p K_n|
  std::optional<Rational> limit;
  std::string certificate;
};

/// Exact sequences from cell counts, with the limit read off closed-form counts when they are supplied
/// and agree with every level.
inline EulerResult euler_from_counts(std::vector<std::vector<std::int64_t>> counts,
                                     const std::optional<std::vector<ClosedForm>>& forms) {
  EulerResult r;
  r.counts = std::move(counts);
  for (const auto& c : r.counts) {
    const auto p = c.size() - 1;
    std::int64_t chi = 0;
    Rational alt = 0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      chi += (j % 2 ? -1 : 1) * c[j];
      alt += Rational(j % 2 ? -c[j] : c[j], c[p]);
    }
    r.sequence.push_back(Rational(chi, c[p]));
    r.alternating.push_back(alt);
  }
  if (!forms) {
    r.certificate = "no closed-form counts for this family; limit not certified";
    return r;
  }
  const auto& f = *forms;
  for (std::size_t n = 0; n < r.counts.size(); ++n) {
    if (r.counts[n].size() != f.size()) {
      r.certificate = "closed forms have the wrong number of dimensions";
      return r;
    }
    for (std::size_t j = 0; j < f.size(); ++j)
      if (f[j].at(static_cast<int>(n)) != Rational(r.counts[n][j])) {
        r.certificate = "closed form for dimension " + std::to_string(j) + " disagrees with level " + std::to_string(n);
        return r;
      }
  }
  const auto [lead, base] = f.back().leading();
  Rational lim = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    Rational coef = 0;
    for (const auto& [c, b] : f[j].terms) {
      if (b > base && c != 0) {
        r.certificate = "dimension " + std::to_string(j) + " grows faster than the top cells";
        return r;
      }
      if (b == base) coef += c;
    }
    lim += (j % 2 ? -coef : coef) / lead;
  }
  r.limit = lim;
  r.certificate = "closed forms match levels 0.." + std::to_string(r.counts.size() - 1) +
                  "; limit is the ratio of the coefficients of " + std::to_string(base) + "^n";
  return r;
}

inline EulerResult euler_characteristic(const Exhaustion& ex) {
  std::vector<std::vector<std::int64_t>> counts;
  for (const auto& k : ex.levels) {
    std::vector<std::int64_t> c;
    for (auto v : k.counts()) c.push_back(static_cast<std::int64_t>(v));
    counts.push_back(std::move(c));
  }
  return euler_from_counts(std::move(counts), closed_form_counts(ex.family));
}

/// Uses count propagation for the graph substitution families, so high levels need no complex.
inline EulerResult euler_characteristic(const std::string& family, int levels) {
  if (auto rule = substitution_rule(family)) {
    std::vector<std::vector<std::int64_t>> counts;
    for (const auto& c : substitution_counts(*rule, levels)) counts.push_back({c[0], c[1]});
    return euler_from_counts(std::move(counts), closed_form_counts(family));
  }
  return euler_characteristic(build_family(family, levels));
}

// ---------------------------------------------------------------------------
// Identity table

struct IdentityCheck {
  std::string name;
  double value = 0.0;  // measured discrepancy
  double bound = 0.0;  // allowed discrepancy
  bool passed = false;
  std::string detail;
};

namespace detail {

inline bool integer_zero(const SparseInt& m) {
  for (Eigen::Index r = 0; r < m.outerSize(); ++r)
    for (SparseInt::InnerIterator it(m, r); it; ++it)
      if (it.value() != 0) return false;
  return true;
}

inline std::vector<double> nonzero_sorted(const Eigen::VectorXd& v, double tol) {
  std::vector<double> out;
  for (auto x : v)
    if (std::abs(x) > tol) out.push_back(x);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Identity checks for dimension j with the window K_n inside the ambient K_m (n == m: intrinsic).
/// Dense spectra are taken on K_m.
inline std::vector<IdentityCheck> check_identities(const Exhaustion& ex, int j, int n, int m,
                                                   const std::vector<double>& times, int power_k = 3,
                                                   bool relative = false) {
  const auto& k = ex.level(m);
  const int p = k.dimension();
  std::vector<IdentityCheck> out;
  auto add = [&](std::string name, double value, double bound, bool passed, std::string d = {}) {
    out.push_back({std::move(name), value, bound, passed, std::move(d)});
  };

  if (j + 1 <= p && j >= 1) {
    auto a = boundary_matrix(k, j, relative).integer.value();
    auto b = boundary_matrix(k, j + 1, relative).integer.value();
    add("boundary_squared", 0, 0, detail::integer_zero(SparseInt(a * b)));
  }
  {
    auto lp = laplacian(k, j, LaplacianKind::plus, relative).integer.value();
    auto lm = laplacian(k, j, LaplacianKind::minus, relative).integer.value();
    add("plus_times_minus", 0, 0, detail::integer_zero(SparseInt(lp * lm)) && detail::integer_zero(SparseInt(lm * lp)));
  }
  auto full = window_spectrum(ex, {LaplacianKind::full, j, relative}, m, m);
  {
    std::size_t zeros = 0;
    for (auto v : full.values) zeros += v == 0.0;
    const auto hodge = kernel_dimension(k, j, LaplacianKind::full, relative);
    add("hodge_rank", std::abs(double(zeros) - double(hodge)), 0, zeros == hodge,
        "spectral kernel " + std::to_string(zeros) + ", rank formula " + std::to_string(hodge));
  }
  if (j >= 1) {
    auto bd = boundary_matrix(k, j, relative);
    SparseReal dd = bd.real * SparseReal(bd.real.transpose());   // on E_{j-1}
    SparseReal sd = SparseReal(bd.real.transpose()) * bd.real;   // on E_j
    auto ev1 = symmetric_eigenvalues(Eigen::MatrixXd(dd));
    auto ev2 = symmetric_eigenvalues(Eigen::MatrixXd(sd));
    const double top = std::max({1.0, ev1.size() ? ev1.maxCoeff() : 0.0, ev2.size() ? ev2.maxCoeff() : 0.0});
    auto a = detail::nonzero_sorted(ev1, Tolerances::spectral * top);
    auto b = detail::nonzero_sorted(ev2, Tolerances::spectral * top);
    double diff = a.size() == b.size() ? 0.0 : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    add("singular_spectrum", diff, Tolerances::identity * top, diff <= Tolerances::identity * top,
        std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " nonzero eigenvalues");

    const auto& ib = *bd.integer;
    std::int64_t fro = 0;
    for (Eigen::Index r = 0; r < ib.outerSize(); ++r)
      for (SparseInt::InnerIterator it(ib, r); it; ++it) fro += it.value() * it.value();
    SparseInt idd = ib * SparseInt(ib.transpose()), isd = SparseInt(ib.transpose()) * ib;
    add("power_trace_k1", std::abs(double(idd.diagonal().sum() - isd.diagonal().sum())), 0,
        idd.diagonal().sum() == fro && isd.diagonal().sum() == fro);

    if (n < m && n < ex.top()) {
      auto w0 = window_spectrum(dd, window_indices(ex, j - 1, n, m), false);
      auto w1 = window_spectrum(sd, window_indices(ex, j, n, m), false);
      const double ep = static_cast<double>(ex.level(n).count(ex.level(n).dimension()));
      const double lhs = std::abs(w0.sum([&](double l) { return std::pow(l, power_k); }) -
                                  w1.sum([&](double l) { return std::pow(l, power_k); })) / ep;
      auto fs = frontier_stats(ex, n, j - 1);
      const double mu = static_cast<double>(degree_bounds(ex.level(ex.top())).mu[j - 1]);
      const double nrm = ev1.size() ? ev1.maxCoeff() * (1 + 1e-12) : 0.0;
      const double rhs = (mu + 1) * std::pow(nrm, power_k) * static_cast<double>(fs.cells) / ep * fs.epsilon;
      add("power_trace_bound", lhs, rhs, lhs <= rhs + Tolerances::identity,
          "k=" + std::to_string(power_k) + ", eps=" + std::to_string(fs.epsilon) + ", mu=" + std::to_string(int(mu)));
    }
  }
  {
    const auto win = n == m ? std::vector<std::uint32_t>{} : window_indices(ex, j, n, m);
    auto spec_of = [&](LaplacianKind kind) {
      if (n == m) return window_spectrum(ex, {kind, j, relative}, m, m);
      auto op = laplacian(k, j, kind, relative);
      auto s = window_spectrum(op.real, win);
      s.volume_norm = static_cast<std::int64_t>(ex.level(n).count(ex.level(n).dimension()));
      return s;
    };
    auto sf = n == m ? full : spec_of(LaplacianKind::full);
    auto sp = spec_of(LaplacianKind::plus), sm = spec_of(LaplacianKind::minus);
    const double vol = static_cast<double>(sf.window) / sf.norm(Normalization::volume);
    double worst = 0.0;
    for (double t : times)
      worst = std::max(worst, std::abs(sf.heat(t, Normalization::volume) -
                                       (sp.heat(t, Normalization::volume) + sm.heat(t, Normalization::volume) - vol)));
    add("heat_identity", worst, Tolerances::identity, worst <= Tolerances::identity);
  }
  return out;
}

/// α_j against min(α_{j+}, α_{j-}); absent halves (indeterminate fits) are skipped.
inline IdentityCheck min_rule_check(const FitResult& full, const FitResult& plus, const FitResult& minus,
                                    double tol = Tolerances::fit) {
  double m = std::numeric_limits<double>::infinity();
  if (!plus.indeterminate) m = std::min(m, plus.alpha());
  if (!minus.indeterminate) m = std::min(m, minus.alpha());
  IdentityCheck c;
  c.name = "min_rule";
  if (full.indeterminate || !std::isfinite(m)) {
    c.passed = false;
    c.detail = "indeterminate fits";
    return c;
  }
  c.value = std::abs(full.alpha() - m);
  c.bound = tol;
  c.passed = c.value <= tol;
  return c;
}

// ---------------------------------------------------------------------------
// Sandwich inequality for graphs

struct SandwichReport {
  std::vector<double> t, left, middle, right;
  double mu = 0;
  double worst_slack = std::numeric_limits<double>::infinity();  // min over samples of both gaps
  bool holds = false;
};

/// τ(1/(1+μtΔ_c)) <= τ(1/(1+tΔ)) <= τ(1/(1+tΔ_c)) with state normalization on a finite graph.
inline SandwichReport sandwich_check(const CWComplex& g, const std::vector<double>& times) {
  auto w = walk_operators(g);
  const auto qs = symmetric_eigenvalues(w.Q.dense());
  const auto ls = symmetric_eigenvalues(w.laplacian.dense());
  const double nv = static_cast<double>(g.count(0));
  SandwichReport r;
  r.mu = static_cast<double>(w.max_degree);
  r.holds = true;
  auto res = [nv](const Eigen::VectorXd& ev, double s) {
    double acc = 0;
    for (auto l : ev) acc += 1.0 / (1.0 + s * std::max(l, 0.0));
    return acc / nv;
  };
  for (double t : times) {
    r.t.push_back(t);
    r.left.push_back(res(qs, r.mu * t));
    r.middle.push_back(res(ls, t));
    r.right.push_back(res(qs, t));
    const double s = std::min(r.middle.back() - r.left.back(), r.right.back() - r.middle.back());
    r.worst_slack = std::min(r.worst_slack, s);
    if (s < -Tolerances::identity) r.holds = false;
  }
  return r;
}

// ---------------------------------------------------------------------------
// φ_γ and the Tauberian comparison

/// φ_γ(x) = Σ_n x^n Γ(γ+1)/Γ(n+γ+1), summed until the terms stop mattering.
inline double phi_gamma(double x, double gamma) {
  if (x < 0 || gamma <= 0) throw std::invalid_argument("phi_gamma: need x >= 0, gamma > 0");
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < 100000; ++n) {
    term *= x / (n + gamma + 1.0);
    sum += term;
    if (n > x && term < 1e-17 * sum) break;
  }
  return sum;
}

/// e^x x^{-γ} ∫_0^x e^{-t} d(t^γ) = e^x x^{-γ} Γ(γ+1) P(γ, x).
inline double phi_gamma_integral(double x, double gamma) {
  if (x == 0.0) return 1.0;
  return std::exp(x) * std::pow(x, -gamma) * std::tgamma(gamma + 1.0) * boost::math::gamma_p(gamma, x);
}

struct TauberianReport {
  std::vector<double> t, f, fhat, ratio;  // ratio = f̂(1/t) / f(t)
  double k = 1.0;                          // best two-sided comparability constant over the grid
  double or_c = 0.0, or_alpha = 0.0;       // empirical OR(1) constants on the upper half of the grid
};

/// f̂(1/t) = ∫_0^∞ e^{-y} f(ty) dy for f interpolated log-log linearly on the grid, constant below the
/// first sample and extended as a power law beyond the last one.
inline TauberianReport tauberian_check(const std::vector<double>& t, const std::vector<double>& f) {
  const std::size_t n = t.size();
  if (n < 4 || f.size() != n) throw std::invalid_argument("tauberian_check: need >= 4 samples");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(t[i] > 0 && f[i] > 0)) throw std::invalid_argument("tauberian_check: samples must be positive");
    if (i && !(t[i] > t[i - 1])) throw std::invalid_argument("tauberian_check: grid must be ascending");
    if (i && t[i] / t[i - 1] > 2.0)
      throw std::runtime_error("tauberian_check: grid under-resolved (consecutive ratio above 2)");
  }
  const double tail = std::min(0.0, std::log(f[n - 1] / f[n - 2]) / std::log(t[n - 1] / t[n - 2]));
  auto interp = [&](double s) {
    if (s <= t[0]) return f[0];
    if (s >= t[n - 1]) return f[n - 1] * std::pow(s / t[n - 1], tail);
    auto it = std::upper_bound(t.begin(), t.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
    const double u = std::log(s / t[i]) / std::log(t[i + 1] / t[i]);
    return f[i] * std::pow(f[i + 1] / f[i], u);
  };
  using boost::math::quadrature::gauss;
  boost::math::quadrature::exp_sinh<double> tail_rule;
  TauberianReport r;
  r.t = t;
  r.f = f;
  for (std::size_t q = 0; q < n; ++q) {
    const double s = t[q];
    auto g = [&](double y) { return std::exp(-y) * interp(s * y); };
    double acc = f[0] * (1.0 - std::exp(-t[0] / s));
    for (std::size_t i = 0; i + 1 < n; ++i) acc += gauss<double, 20>::integrate(g, t[i] / s, t[i + 1] / s);
    acc += tail_rule.integrate(g, t[n - 1] / s, std::numeric_limits<double>::infinity());
    r.fhat.push_back(acc);
    r.ratio.push_back(acc / f[q]);
    r.k = std::max(r.k, std::max(acc / f[q], f[q] / acc));
  }
  // OR(1): α from the log-log slope over the upper half, c = max f(t_b)/f(t_a) (t_b/t_a)^α there.
  const std::size_t h = n / 2;
  r.or_alpha = std::max(0.0, -std::log(f[n - 1] / f[h]) / std::log(t[n - 1] / t[h]));
  for (std::size_t a = h; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) r.or_c = std::max(r.or_c, f[b] / f[a] * std::pow(t[b] / t[a], r.or_alpha));
  return r;
}

// ---------------------------------------------------------------------------
// Return probabilities

struct ReturnProbabilityResult {
  std::string mode;
  std::vector<double> single;        // τ(P^k), k = 0..k_max
  std::vector<double> paired;        // τ(P^k + P^{k+1})
  std::vector<double> paired_error;  // Monte Carlo: 2 standard errors per k
  double plateau = 0.0;              // stationary return weight, subtracted from the paired sums
  FitResult fit;                     // γ fit on the paired sums
  std::optional<FitResult> fit_single;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double gamma_error = std::numeric_limits<double>::quiet_NaN();  // 2σ
  bool bipartite = false;
  std::uint64_t steps = 0;
  std::size_t walkers = 0, batches = 0;
  std::string message;

  double alpha() const { return 2.0 * gamma; }
  double alpha_error() const { return 2.0 * gamma_error; }
};

inline bool is_bipartite(const CWComplex& g) {
  auto adj = adjacency_lists(g);
  std::vector<int> colour(adj.size(), -1);
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (colour[s] >= 0) continue;
    colour[s] = 0;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto w : adj[v]) {
        if (colour[w] < 0) {
          colour[w] = 1 - colour[v];
          stack.push_back(w);
        } else if (colour[w] == colour[v]) {
          return false;
        }
      }
    }
  }
  return true;
}

/// Finite-size plateau of τ(P^k + P^{k+1}): twice the stationary mass deg(x)/2|E| averaged over the window.
/// On the infinite graph it vanishes; on K_m it is the window weight of the eigenvalue 1 (counted twice).
inline double stationary_plateau(const CWComplex& g, const std::vector<std::uint32_t>& window) {
  double s = 0.0;
  for (auto x : window) s += static_cast<double>(g.cofaces(0, x).size());
  return 2.0 * s / (2.0 * static_cast<double>(g.count(1))) / static_cast<double>(window.size());
}

namespace detail {

inline std::vector<double> k_axis(std::size_t n) {
  std::vector<double> k(n);
  std::iota(k.begin(), k.end(), 0.0);
  return k;
}

inline WindowPolicy walk_policy(WindowPolicy pol) {
  if (pol.automatic) pol.clip_lo = std::max(pol.clip_lo, 2.0);
  return pol;
}

}  // namespace detail

/// Exact mode: paired power traces from the walk spectrum on K_m restricted to ι(K_n). The γ error
/// is twice the standard error of the regression slope.
inline ReturnProbabilityResult return_probability_exact(const Exhaustion& g, int n, int m, int k_max,
                                                        const WindowPolicy& pol = {}) {
  auto pt = power_trace(g, n, m, k_max);
  ReturnProbabilityResult r;
  r.mode = "exact";
  r.single = pt.single;
  r.paired = pt.paired;
  r.bipartite = is_bipartite(g.level(m));
  r.plateau = stationary_plateau(g.level(m), window_indices(g, 0, n, m));
  const auto ks = detail::k_axis(r.paired.size());
  r.fit = fit_power_law(ks, r.paired, r.plateau, detail::walk_policy(pol));
  if (!r.bipartite) r.fit_single = fit_power_law(ks, r.single, r.plateau / 2, detail::walk_policy(pol));
  r.gamma = r.fit.exponent;
  r.gamma_error = 2.0 * r.fit.slope_stderr;
  r.message = r.fit.message;
  return r;
}

/// Counter-based 64-bit generator: value depends only on (seed, walker, step).
inline std::uint64_t walk_random(std::uint64_t seed, std::uint64_t walker, std::uint64_t step) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ walker) ^ step);
}

/// Monte Carlo mode: `budget` walkers of length k_max + 1, started in turn at each window vertex and grouped into batches. γ is fitted on the pooled paired estimates
/// and its error is twice the leave-one-batch-out jackknife standard error on the same window.
inline ReturnProbabilityResult return_probability_mc(const Exhaustion& g, int n, int m, int k_max,
                                                     const WindowPolicy& pol, std::uint64_t budget,
                                                     std::uint64_t seed, int threads = 1, std::size_t batches = 32) {
  if (k_max < 2) throw std::invalid_argument("return_probability_mc: k_max >= 2");
  const auto& km = g.level(m);
  if (!is_connected(km, 0, Flavor::d)) throw std::invalid_argument("return_probability_mc: graph is disconnected");
  const auto adj = adjacency_lists(km);
  const auto window = window_indices(g, 0, n, m);
  const std::size_t len = static_cast<std::size_t>(k_max) + 1;
  // budget = sampled walks behind every reported p_k; rounded down to whole sweeps of the window
  std::size_t walkers = static_cast<std::size_t>(budget);
  if (walkers >= window.size()) walkers -= walkers % window.size();
  ReturnProbabilityResult r;
  r.mode = "monte_carlo";
  r.bipartite = is_bipartite(km);
  r.walkers = walkers;
  r.batches = batches;
  r.steps = static_cast<std::uint64_t>(walkers) * len;
  if (walkers < batches * 8) {
    r.message = "Monte Carlo budget too small: " + std::to_string(walkers) + " walkers for " +
                std::to_string(batches) + " batches";
    return r;
  }
  // returns[b][k]: walkers of batch b at their start after k steps
  std::vector<std::vector<std::int64_t>> returns(batches, std::vector<std::int64_t>(len + 1, 0));
  std::vector<std::size_t> batch_size(batches, 0);
  auto batch_of = [&](std::size_t w) { return w * batches / walkers; };
  for (std::size_t w = 0; w < walkers; ++w) ++batch_size[batch_of(w)];
  const int nt = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      // thread t owns batches t, t + nt, ...; counts are integers so the split does not affect results
      for (std::size_t b = static_cast<std::size_t>(t); b < batches; b += static_cast<std::size_t>(nt)) {
        const std::size_t w0 = (b * walkers + batches - 1) / batches, w1 = ((b + 1) * walkers + batches - 1) / batches;
        for (std::size_t w = w0; w < w1; ++w) {
          const std::size_t start = window[w % window.size()];
          std::size_t v = start;
          ++returns[b][0];
          for (std::size_t s = 0; s < len; ++s) {
            const auto& nb = adj[v];
            const auto x = walk_random(seed, w, s);
            v = nb[static_cast<std::size_t>((static_cast<unsigned __int128>(x) * nb.size()) >> 64)];
            if (v == start) ++returns[b][s + 1];
          }
        }
      }
    });
  for (auto& th : pool) th.join();

  std::vector<double> pooled(len + 1, 0.0);
  for (std::size_t k = 0; k <= len; ++k) {
    std::int64_t c = 0;
    for (std::size_t b = 0; b < batches; ++b) c += returns[b][k];
    pooled[k] = static_cast<double>(c) / static_cast<double>(walkers);
  }
  for (std::size_t k = 0; k + 1 <= len && k <= static_cast<std::size_t>(k_max); ++k) {
    r.single.push_back(pooled[k]);
    r.paired.push_back(pooled[k] + pooled[k + 1]);
    double var = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const double x = static_cast<double>(returns[b][k] + returns[b][k + 1]) / static_cast<double>(batch_size[b]);
      var += (x - r.paired.back()) * (x - r.paired.back());
    }
    r.paired_error.push_back(2.0 * std::sqrt(var / double(batches - 1) / double(batches)));
  }
  r.plateau = stationary_plateau(km, window);
  const auto ks = detail::k_axis(r.paired.size());
  r.fit = fit_power_law(ks, r.paired, r.plateau, detail::walk_policy(pol));
  if (!r.bipartite) r.fit_single = fit_power_law(ks, r.single, r.plateau / 2, detail::walk_policy(pol));
  r.gamma = r.fit.exponent;
  r.message = r.fit.message;
  if (r.fit.indeterminate) return r;
  // leave-one-batch-out jackknife on the pooled fit window
  const auto fixed = WindowPolicy::fixed(r.fit.lo, r.fit.hi);
  std::vector<double> gs;
  for (std::size_t b = 0; b < batches; ++b) {
    const double rest = static_cast<double>(walkers - batch_size[b]);
    std::vector<double> pb;
    for (std::size_t k = 0; k <= static_cast<std::size_t>(k_max); ++k) {
      std::int64_t c = 0;
      for (std::size_t q = 0; q < batches; ++q)
        if (q != b) c += returns[q][k] + returns[q][k + 1];
      pb.push_back(static_cast<double>(c) / rest);
    }
    auto fb = fit_power_law(ks, pb, r.plateau, fixed);
    if (fb.indeterminate || fb.points != r.fit.points) {
      r.message = "Monte Carlo budget too small: jackknife sample " + std::to_string(b) + " falls below the plateau inside the fit window";
      r.gamma_error = std::numeric_limits<double>::quiet_NaN();
      return r;
    }
    gs.push_back(fb.exponent);
  }
  const double nb = static_cast<double>(gs.size());
  const double mean = std::accumulate(gs.begin(), gs.end(), 0.0) / nb;
  double var = 0.0;
  for (double x : gs) var += (x - mean) * (x - mean);
  r.gamma_error = 2.0 * std::sqrt(var * (nb - 1.0) / nb);
  return r;
}

}  // namespace sscw
