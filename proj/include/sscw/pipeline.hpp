#pragma once

#include <cstdio>
#include <nlohmann/json.hpp>
#include <random>
#include <string>
#include <vector>

#include "builders.hpp"
#include "invariants.hpp"
#include "trace.hpp"

namespace sscw {

using OrderedJson = nlohmann::ordered_json;

/// Parameters shared by the CLI commands. Negative levels mean "family default".
struct RunConfig {
  std::string family;
  int levels = -1;
  int window = -1;
  int ambient = -1;
  int j = 0;
  bool relative = false;
  LaplacianKind kind = LaplacianKind::full;
  double t_lo = 0.1, t_hi = 1e6;
  int t_count = 121;
  bool include_zero = false;  // curve: prepend a t = 0 sample to the log grid
  int k_max = 300;
  std::uint64_t seed = 42;
  std::uint64_t budget = 1000000;
  std::string mode = "exact";
  int threads = 1;
  std::string output_dir;
  std::optional<double> fit_lo, fit_hi;
};

/// Largest operator size (cells of dimension j on the ambient level) chosen by default.
inline constexpr std::size_t kDefaultCellLimit = 6561;

/// Fills window/ambient/levels from family defaults and validates n < m <= N.
inline RunConfig resolve_config(RunConfig c) {
  const auto& names = family_names();
  if (std::find(names.begin(), names.end(), c.family) == names.end())
    throw std::invalid_argument("unknown family '" + c.family + "'");
  if (c.ambient < 0) {
    int m = c.family == "gasket" || c.family == "dodecagon2" ? 8 : c.family == "vicsek" ? 5 : c.family == "lindstrom" ? 3 : 4;
    if (c.window >= 0) m = c.window + 1;
    else if (c.levels >= 1) m = std::min(m, std::max(1, c.levels - 1));
    // shrink until the j-cells fit the dense limit
    if (auto cf = closed_form_counts(c.family); cf && c.j < static_cast<int>(cf->size()))
      while (m > 1 && (*cf)[c.j].at(m) > Rational(static_cast<std::int64_t>(kDefaultCellLimit))) --m;
    c.ambient = m;
  }
  if (c.window < 0) c.window = c.ambient - 1;
  if (c.levels < 0) c.levels = c.ambient + 1;
  if (!(0 <= c.window && c.window < c.ambient && c.ambient <= c.levels))
    throw std::invalid_argument("need window < ambient <= levels (got " + std::to_string(c.window) + ", " +
                                std::to_string(c.ambient) + ", " + std::to_string(c.levels) + ")");
  if (!(c.t_lo > 0 && c.t_hi > c.t_lo && c.t_count >= 2)) throw std::invalid_argument("invalid time grid");
  return c;
}

/// The d-skeleton of a complex (cells of dimension <= d).
inline CWComplex skeleton(const CWComplex& k, int d) {
  std::vector<std::size_t> counts;
  for (int j = 0; j <= std::min(d, k.dimension()); ++j) counts.push_back(k.count(j));
  std::vector<IncidenceRecord> recs;
  for (const auto& r : k.records())
    if (r.cell.dim <= d) recs.push_back(r);
  return CWComplex(std::move(counts), std::move(recs));
}

/// Rounds to 12 significant digits for golden-stable JSON; non-finite values become null.
inline OrderedJson num(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::stod(buf);
}

inline std::string rational_text(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator())
                              : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline OrderedJson fit_json(const FitResult& f) {
  OrderedJson o;
  o["alpha"] = num(f.alpha());
  o["exponent"] = num(f.exponent);
  o["amplitude"] = num(f.amplitude);
  o["window"] = {num(f.lo), num(f.hi)};
  o["points"] = f.points;
  o["residual"] = num(f.residual);
  o["slope_stderr"] = num(f.slope_stderr);
  o["beta_subtracted"] = num(f.beta_subtracted);
  o["indeterminate"] = f.indeterminate;
  o["message"] = f.message;
  return o;
}

inline OrderedJson identity_json(const std::vector<IdentityCheck>& v) {
  OrderedJson a = OrderedJson::array();
  for (const auto& c : v) {
    OrderedJson o;
    o["name"] = c.name;
    o["value"] = num(c.value);
    o["bound"] = num(c.bound);
    o["passed"] = c.passed;
    o["detail"] = c.detail;
    a.push_back(o);
  }
  return a;
}

inline OrderedJson euler_json(const EulerResult& e) {
  OrderedJson o;
  OrderedJson seq = OrderedJson::array(), alt = OrderedJson::array();
  for (const auto& r : e.sequence) seq.push_back(rational_text(r));
  for (const auto& r : e.alternating) alt.push_back(rational_text(r));
  o["sequence"] = seq;
  o["alternating_sum"] = alt;
  o["limit"] = e.limit ? OrderedJson(rational_text(*e.limit)) : OrderedJson(nullptr);
  o["certificate"] = e.certificate;
  return o;
}

/// Largest ambient level m < top whose cells of dimensions j-1..j+1 stay below `limit`.
inline int identity_ambient(const Exhaustion& ex, int j, std::size_t limit = 1200) {
  int best = 1;
  for (int m = 1; m < ex.top(); ++m) {
    const auto& k = ex.level(m);
    std::size_t big = 0;
    for (int d = std::max(0, j - 1); d <= std::min(k.dimension(), j + 1); ++d) big = std::max(big, k.count(d));
    if (big <= limit) best = m;
  }
  return best;
}

/// Identity table for dimension j: algebraic identities, the power-trace and heat identities, the
/// commutator and Cauchy bounds on K_{m-1} ⊂ K_m, and the sandwich inequality on the 1-skeleton of K_m.
inline std::vector<IdentityCheck> identity_suite(const Exhaustion& ex, int j, bool relative, int m,
                                                 std::uint64_t seed) {
  const int n = m - 1;
  const auto times = log_grid(0.01, 1e4, 25);
  auto out = check_identities(ex, j, n, m, times, 3, relative);
  const auto a = laplacian(ex.level(m), j, LaplacianKind::full, relative);
  OperatorMatrix b = a;
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SparseReal d(a.rows(), a.cols());
    std::vector<Eigen::Triplet<double>> tr;
    for (Eigen::Index i = 0; i < a.rows(); ++i) tr.emplace_back(i, i, u(rng));
    d.setFromTriplets(tr.begin(), tr.end());
    b.real = d * a.real;
    b.integer.reset();
  }
  auto cm = commutator_check(ex, a, b, n, m);
  out.push_back({"commutator_bound", cm.value, cm.bound, cm.holds, "B = D * Delta, D random diagonal"});
  if (n >= 1) {
    auto cc = cauchy_check(ex, a, n - 1, n, m);
    out.push_back({"cauchy_bound", cc.value, cc.bound, cc.holds,
                   "levels " + std::to_string(n - 1) + " and " + std::to_string(n)});
  }
  auto sw = sandwich_check(skeleton(ex.level(m), 1), times);
  out.push_back({"sandwich", std::max(0.0, -sw.worst_slack), Tolerances::identity, sw.holds,
                 "1-skeleton of level " + std::to_string(m) + ", mu=" + std::to_string(int(sw.mu))});
  return out;
}

struct InvariantReport {
  OrderedJson json;
  bool identities_passed = true;
  bool indeterminate = false;
};

inline WindowPolicy fit_policy(const RunConfig& c) {
  if (c.fit_lo && c.fit_hi) return WindowPolicy::fixed(*c.fit_lo, *c.fit_hi);
  return {};
}

/// Default clip constant c in t <= c / λ_min for automatic heat-curve windows.
inline constexpr double kFiniteSizeClip = 0.1;

/// Full pipeline for one (family, j, relative) configuration.
inline InvariantReport run_invariants(RunConfig cfg) {
  cfg = resolve_config(cfg);
  auto ex = build_family(cfg.family, cfg.levels);
  const int p = ex.dimension();
  if (cfg.j < 0 || cfg.j > p) throw std::invalid_argument("j out of range for " + cfg.family);
  const int n = cfg.window, m = cfg.ambient;
  InvariantReport rep;
  auto& o = rep.json;
  o["family"] = cfg.family;
  o["levels"] = cfg.levels;
  o["window"] = n;
  o["ambient"] = m;
  o["j"] = cfg.j;
  o["relative"] = cfg.relative;
  o["tolerances"] = {{"fit", Tolerances::fit}, {"identity", Tolerances::identity}, {"spectral", Tolerances::spectral}};

  // On graphs Δ_{1+} is absent, so α_1 = α_{1-} = α_{0+}: the j = 1 exponent is fitted on Δ_0.
  const bool graph_j1 = p == 1 && cfg.j == 1;
  const OperatorSpec spec{cfg.kind, cfg.j, cfg.relative};
  const OperatorSpec fit_spec = graph_j1 ? OperatorSpec{LaplacianKind::full, 0, cfg.relative} : spec;
  o["operator"] = spec.tag();

  auto times = log_grid(cfg.t_lo, cfg.t_hi, cfg.t_count);
  auto s = window_spectrum(ex, spec, n, m);
  auto sc = window_spectrum(ex, spec, n, m - 1);
  auto curve = heat_curve(s, &sc, times);
  auto beta = estimate_beta(s, curve, ex, spec, std::min(cfg.levels, m + 1));
  {
    OperatorSpec trend_spec = spec;
    OrderedJson b;
    b["primary"] = num(beta.primary);
    b["tail"] = num(beta.tail);
    b["discrepancy"] = num(beta.discrepancy);
    OrderedJson tr = OrderedJson::array();
    for (const auto& [lvl, v] : beta.trend)
      tr.push_back({{"level", lvl}, {"value", rational_text(v)}, {"decimal", num(boost::rational_cast<double>(v))}});
    b["trend"] = tr;
    b["note"] = "primary: window weight of ker " + trend_spec.tag() + " on K_" + std::to_string(m) +
                " over |E_p K_" + std::to_string(n) + "|; trend: exact dim ker on each level";
    o["beta"] = b;
  }

  FitResult alpha;
  if (graph_j1) {
    auto s0 = window_spectrum(ex, fit_spec, n, m);
    auto c0 = heat_curve(s0, nullptr, times);
    alpha = estimate_alpha(c0, s0.kernel_weight(Normalization::volume), fit_policy(cfg), s0.lambda_min_positive(),
                           kFiniteSizeClip);
  } else {
    alpha = estimate_alpha(curve, beta.primary, fit_policy(cfg), s.lambda_min_positive(), kFiniteSizeClip);
  }
  {
    auto a = fit_json(alpha);
    a["note"] = graph_j1 ? "alpha_1 = alpha_0: Delta_{1+} vanishes on a 1-complex, so alpha_1 = alpha_{1-} = "
                           "alpha_{0+} (fitted on the Delta_0 heat curve)"
                         : "finite-size fit of the heat curve at window " + std::to_string(n) + ", ambient " +
                               std::to_string(m) + "; the target is a t -> infinity limit, compared at tolerance " +
                               std::to_string(Tolerances::fit);
    o["alpha"] = a;
  }
  rep.indeterminate = alpha.indeterminate;

  // min rule when both halves are present
  if (cfg.kind == LaplacianKind::full && cfg.j >= 1 && cfg.j < p) {
    auto fit_kind = [&](LaplacianKind k) {
      OperatorSpec sp{k, cfg.j, cfg.relative};
      auto w = window_spectrum(ex, sp, n, m);
      return estimate_alpha(heat_curve(w, nullptr, times), w.kernel_weight(Normalization::volume), fit_policy(cfg),
                            w.lambda_min_positive(), kFiniteSizeClip);
    };
    auto fp = fit_kind(LaplacianKind::plus), fm = fit_kind(LaplacianKind::minus);
    o["alpha_plus"] = fit_json(fp);
    o["alpha_minus"] = fit_json(fm);
    auto mr = min_rule_check(alpha, fp, fm);
    o["min_rule"] = identity_json({mr})[0];
  }

  // return probabilities: the graph itself, or the dual graph for the relative top dimension
  if ((p == 1 && cfg.j <= 1) || (p >= 2 && cfg.relative && cfg.j == p)) {
    Exhaustion g = p == 1 ? ex : dual_exhaustion(ex);
    auto ex_rp = return_probability_exact(g, n, m, cfg.k_max);
    ReturnProbabilityResult rp = ex_rp;
    if (cfg.mode == "monte_carlo") {
      rp = return_probability_mc(g, n, m, cfg.k_max,
                                 ex_rp.fit.indeterminate ? WindowPolicy{} : WindowPolicy::fixed(ex_rp.fit.lo, ex_rp.fit.hi),
                                 cfg.budget, cfg.seed, cfg.threads);
    }
    OrderedJson r;
    r["mode"] = rp.mode;
    r["graph"] = p == 1 ? "complex" : "dual graph";
    r["bipartite"] = rp.bipartite;
    r["plateau_subtracted"] = num(rp.plateau);
    r["gamma"] = num(rp.gamma);
    r["gamma_error"] = num(rp.gamma_error);
    r["alpha"] = num(rp.alpha());
    r["fit"] = fit_json(rp.fit);
    if (rp.fit_single) r["fit_single"] = fit_json(*rp.fit_single);
    if (rp.mode == "monte_carlo") {
      r["steps"] = rp.steps;
      r["walkers"] = rp.walkers;
      r["seed"] = cfg.seed;
    }
    r["heat_alpha"] = num(alpha.alpha());
    r["message"] = rp.message;
    o["return_probability"] = r;
  }

  o["euler"] = euler_json(euler_characteristic(cfg.family, cfg.levels));

  const int mid = identity_ambient(ex, cfg.j);
  auto ids = identity_suite(ex, cfg.j, cfg.relative, mid, cfg.seed);
  for (const auto& c : ids) rep.identities_passed = rep.identities_passed && c.passed;
  o["identities"] = identity_json(ids);
  o["identity_levels"] = {mid - 1, mid};
  o["status"] = !rep.identities_passed ? "identity_failure" : rep.indeterminate ? "indeterminate" : "ok";
  return rep;
}

/// Curve command: heat, resolvent, density (N_λ at the grid points) or power / power_paired.
inline TraceCurve run_curve(RunConfig cfg, const std::string& kind) {
  cfg = resolve_config(cfg);
  auto ex = build_family(cfg.family, cfg.levels);
  const int n = cfg.window, m = cfg.ambient;
  if (kind == "power" || kind == "power_paired") {
    if (ex.dimension() != 1) throw std::invalid_argument("power traces need a graph family");
    auto pt = power_trace(ex, n, m, cfg.k_max);
    TraceCurve c;
    c.curve = kind;
    c.operator_tag = "transition";
    c.level = n;
    c.ambient = m;
    c.normalization = Normalization::state;
    const auto& v = kind == "power" ? pt.single : pt.paired;
    for (std::size_t k = 0; k < v.size(); ++k) {
      TraceSample smp;
      smp.t = static_cast<double>(k);
      smp.estimate.value = v[k];
      smp.estimate.level = n;
      smp.estimate.normalization = Normalization::state;
      c.samples.push_back(smp);
    }
    return c;
  }
  const OperatorSpec spec{cfg.kind, cfg.j, cfg.relative};
  auto times = log_grid(cfg.t_lo, cfg.t_hi, cfg.t_count);
  if (cfg.include_zero) times.insert(times.begin(), 0.0);
  if (kind == "heat") return heat_trace(ex, spec, n, m, times);
  if (kind == "resolvent") return resolvent_trace(ex, spec, n, m, times);
  if (kind == "density") return spectral_density(ex, spec, n, m, times);
  throw std::invalid_argument("unknown curve kind '" + kind + "'");
}

inline OrderedJson curve_json(const TraceCurve& c) {
  OrderedJson o;
  o["curve"] = c.curve;
  o["operator"] = c.operator_tag;
  o["j"] = c.j;
  o["level"] = c.level;
  o["ambient"] = c.ambient;
  o["normalization"] = normalization_name(c.normalization);
  OrderedJson rows = OrderedJson::array();
  for (const auto& s : c.samples)
    rows.push_back({{"t", s.t},
                    {"value", s.estimate.value},
                    {"error_bound", s.estimate.error_bound ? OrderedJson(*s.estimate.error_bound) : OrderedJson(nullptr)},
                    {"kind", error_kind_name(s.estimate.kind)}});
  o["samples"] = rows;
  return o;
}

}  // namespace sscw
