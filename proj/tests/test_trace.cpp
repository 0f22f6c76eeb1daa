#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <sscw/builders.hpp>
#include <sscw/trace.hpp>

using namespace sscw;

namespace {

OperatorMatrix identity_on(const CWComplex& k, int j) {
  OperatorMatrix id;
  id.variant = Variant::delta;
  id.j = j;
  const auto n = static_cast<Eigen::Index>(k.count(j));
  id.real = SparseReal(n, n);
  id.real.setIdentity();
  return id;
}

double p3(int n) { return std::pow(3.0, n); }

}  // namespace

TEST(TraceState, IdentityIsOneWithZeroError) {
  auto ex = build_gasket(5);
  for (int n = 1; n <= 3; ++n) {
    auto e = trace_state(ex, identity_on(ex.level(4), 0), n, 4);
    EXPECT_EQ(e.value, 1.0);
    ASSERT_TRUE(e.error_bound.has_value());
    EXPECT_EQ(*e.error_bound, 0.0);
    EXPECT_EQ(e.kind, ErrorKind::rigorous);
  }
}

TEST(TraceState, GasketDegreeAverageIntrinsic) {
  auto ex = build_gasket(6);
  for (int n = 1; n <= 6; ++n) {
    auto e = trace_state(ex, laplacian(ex.level(n), 0), n, n);
    EXPECT_NEAR(e.value, 2 * p3(n) / ((p3(n) + 3) / 2), 1e-12);
  }
}

TEST(TraceState, GasketAmbientDegreeAndRigorousBound) {
  auto ex = build_gasket(6);
  const int m = 5;
  auto op = laplacian(ex.level(m), 0);
  for (int n = 1; n < m; ++n) {
    double oracle = 0;
    const auto emb = ex.embedding(n, m);
    for (auto v : emb.image[0]) oracle += static_cast<double>(ex.level(m).cofaces(0, v).size());
    oracle /= static_cast<double>(ex.level(n).count(0));
    auto e = trace_state(ex, op, n, m);
    EXPECT_NEAR(e.value, oracle, 1e-12);
    ASSERT_TRUE(e.error_bound.has_value());
    EXPECT_EQ(e.kind, ErrorKind::rigorous);
    // the limit state value is the bulk degree 4
    EXPECT_LE(std::abs(e.value - 4.0), *e.error_bound);
  }
}

TEST(TraceState, TopLevelHasNoRigorousBound) {
  auto ex = build_gasket(4);
  auto e = trace_state(ex, laplacian(ex.level(4), 0), 2, 4);
  EXPECT_FALSE(e.error_bound.has_value());
  EXPECT_EQ(e.kind, ErrorKind::none);
}

TEST(TraceState, RejectsWrongShapes) {
  auto ex = build_gasket(4);
  EXPECT_THROW(trace_state(ex, laplacian(ex.level(3), 0), 2, 4), std::invalid_argument);
  EXPECT_THROW(trace_state(ex, laplacian(ex.level(3), 0), 3, 2), std::invalid_argument);
}

TEST(TraceVolume, GasketVertexRatio) {
  auto ex = build_gasket(6);
  for (int n = 1; n <= 5; ++n) {
    auto e = trace_volume(ex, identity_on(ex.level(5), 0), n, 5);
    EXPECT_NEAR(e.value, (p3(n) + 3) / (2 * p3(n)), 1e-15);
  }
}

TEST(TraceVolume, VicsekVertexRatio) {
  auto ex = build_vicsek(4);
  for (int n = 1; n <= 3; ++n) {
    auto e = trace_volume(ex, identity_on(ex.level(3), 0), n, 3);
    EXPECT_NEAR(e.value, (3 * std::pow(5.0, n) + 1) / (4 * std::pow(5.0, n)), 1e-15);
  }
}

TEST(TraceVolume, TopDimensionIdentityIsOne) {
  auto ex = build_carpet_complex(3);
  EXPECT_EQ(trace_volume(ex, identity_on(ex.level(2), 2), 1, 2).value, 1.0);
}

TEST(TraceVolume, BoundRescaledByVolumeRatio) {
  auto ex = build_gasket(6);
  auto op = laplacian(ex.level(5), 0);
  auto s = trace_state(ex, op, 3, 5), v = trace_volume(ex, op, 3, 5);
  const double ratio = static_cast<double>(ex.level(3).count(0)) / static_cast<double>(ex.level(3).count(1));
  EXPECT_NEAR(v.value, s.value * ratio, 1e-12);
  EXPECT_NEAR(*v.error_bound, *s.error_bound * ratio, 1e-12);
}

TEST(Radius, PropagationOfLaplacianPowers) {
  auto ex = build_gasket(3);
  const auto& k = ex.level(3);
  auto d = laplacian(k, 0).real;
  EXPECT_EQ(propagation_radius(d, k, 0), 1u);
  EXPECT_EQ(propagation_radius(SparseReal(d * d), k, 0), 2u);
  EXPECT_EQ(propagation_radius(identity_on(k, 0).real, k, 0), 0u);
}

TEST(Radius, NormUpperBoundDominatesSpectralNorm) {
  for (const auto& fam : family_names()) {
    auto k = build_family(fam, 2).level(2);
    auto op = laplacian(k, 1);
    EXPECT_GE(norm_upper_bound(op.real) + 1e-12, symmetric_eigenvalues(op.dense()).cwiseAbs().maxCoeff()) << fam;
  }
}

TEST(Margin, ThrowsWhenWindowTouchesFrontier) {
  auto ex = build_gasket(5);
  EXPECT_TRUE(check_margin(ex, 0, 2, 3, 1));
  EXPECT_THROW(check_margin(ex, 0, 2, 3, 40), MarginError);
  EXPECT_FALSE(check_margin(ex, 0, 2, 5, 1));
  EXPECT_TRUE(check_margin(ex, 0, 3, 3, 5));
}

TEST(Heat, TimeZeroEqualsVolumeOfIdentity) {
  auto ex = build_vicsek(3);
  OperatorSpec spec{LaplacianKind::full, 0, false};
  auto c = heat_trace(ex, spec, 1, 2, {0.0, 1.0});
  EXPECT_EQ(c.samples[0].estimate.value, trace_volume(ex, identity_on(ex.level(2), 0), 1, 2).value);
}

TEST(Heat, IntrinsicGasketKernelLimit) {
  auto ex = build_gasket(5);
  for (int n = 2; n <= 5; ++n) {
    auto s = window_spectrum(ex, OperatorSpec{LaplacianKind::full, 0, false}, n, n);
    EXPECT_NEAR(s.kernel_weight(Normalization::volume), 1.0 / p3(n), 1e-15);
    EXPECT_NEAR(s.heat(1e9, Normalization::volume), 1.0 / p3(n), 1e-12);
  }
}

TEST(Heat, MonotoneAndBounded) {
  auto ex = build_lindstrom(3);
  auto times = log_grid(0.01, 1e4, 60);
  auto c = heat_trace(ex, OperatorSpec{LaplacianKind::full, 1, false}, 1, 2, times);
  const double top = trace_volume(ex, identity_on(ex.level(2), 1), 1, 2).value;
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    const double v = c.samples[i].estimate.value;
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, top + 1e-12);
    if (i) EXPECT_LE(v, c.samples[i - 1].estimate.value + 1e-12);
    EXPECT_EQ(c.samples[i].estimate.kind, ErrorKind::heuristic);
  }
  EXPECT_EQ(c.level, 1);
  EXPECT_EQ(c.ambient, 2);
}

TEST(Heat, FullEqualsPlusPlusMinusMinusIdentity) {
  auto ex = build_carpet_complex(3);
  auto times = log_grid(0.01, 100, 25);
  for (int j = 0; j <= 2; ++j) {
    auto full = heat_trace(ex, {LaplacianKind::full, j, false}, 1, 2, times).values();
    auto plus = heat_trace(ex, {LaplacianKind::plus, j, false}, 1, 2, times).values();
    auto minus = heat_trace(ex, {LaplacianKind::minus, j, false}, 1, 2, times).values();
    const double id = trace_volume(ex, identity_on(ex.level(2), j), 1, 2).value;
    for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(full[i], plus[i] + minus[i] - id, 1e-10) << "j=" << j;
  }
}

TEST(Heat, MatchesDenseMatrixExponential) {
  auto ex = build_gasket(4);
  auto op = laplacian(ex.level(3), 0).dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op);
  auto win = window_indices(ex, 0, 2, 3);
  auto c = heat_trace(ex, {LaplacianKind::full, 0, false}, 2, 3, {0.5, 3.0}, Normalization::state);
  for (const auto& s : c.samples) {
    Eigen::MatrixXd e = es.eigenvectors() * (-s.t * es.eigenvalues().array()).exp().matrix().asDiagonal() *
                        es.eigenvectors().transpose();
    double tr = 0;
    for (auto i : win) tr += e(i, i);
    EXPECT_NEAR(s.estimate.value, tr / static_cast<double>(win.size()), 1e-12);
  }
}

TEST(Heat, RejectsBadTimes) {
  auto ex = build_gasket(3);
  EXPECT_THROW(heat_trace(ex, {LaplacianKind::full, 0, false}, 1, 2, {1.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(heat_trace(ex, {LaplacianKind::full, 0, false}, 1, 2, {-1.0}), std::invalid_argument);
}

TEST(Resolvent, SingleEdgeClosedForm) {
  auto ex = build_gasket(1);  // level 0 is one edge
  auto c = resolvent_trace(ex, {LaplacianKind::full, 0, false}, 0, 0, {0.0, 0.3, 1.0, 10.0}, Normalization::state);
  for (const auto& s : c.samples) EXPECT_NEAR(s.estimate.value, (1 + 1 / (1 + 2 * s.t)) / 2, 1e-14);
}

TEST(Resolvent, SandwichOnGasketLevel5) {
  auto ex = build_gasket(5);
  const auto& k = ex.level(5);
  auto w = walk_operators(k);
  ASSERT_EQ(w.max_degree, 4u);
  std::vector<std::uint32_t> all(k.count(0));
  std::iota(all.begin(), all.end(), 0u);
  auto lap = window_spectrum(laplacian(k, 0).real, all);
  auto q = window_spectrum(w.Q.real, all);
  for (double t : log_grid(1e-3, 1e3, 40)) {
    const double mid = lap.resolvent(t, Normalization::state);
    EXPECT_LE(q.resolvent(4 * t, Normalization::state), mid + 1e-12);
    EXPECT_LE(mid, q.resolvent(t, Normalization::state) + 1e-12);
  }
}

TEST(Power, TriangleClosedForm) {
  auto ex = build_gasket(1);
  auto p = power_trace(ex, 1, 1, 12);
  for (int k = 0; k <= 12; ++k) {
    EXPECT_NEAR(p.single[k], (1 + 2 * std::pow(-0.5, k)) / 3, 1e-14);
    EXPECT_NEAR(p.paired[k], p.single[k] + (1 + 2 * std::pow(-0.5, k + 1)) / 3, 1e-14);
  }
  EXPECT_EQ(p.single[0], 1.0);
}

TEST(Power, FourCycleOscillatesPairedSumDoesNot) {
  auto ex = build_vicsek(1);  // level 0 is the 4-cycle
  auto p = power_trace(ex, 0, 0, 9);
  for (int k = 1; k <= 9; ++k) {
    EXPECT_NEAR(p.single[k], (1 + std::pow(-1.0, k)) / 4, 1e-14);
    EXPECT_NEAR(p.paired[k], 0.5, 1e-14);
  }
  EXPECT_THROW(power_trace(ex, 0, 0, 1), std::invalid_argument);
}

TEST(Power, PropagationMatchesSpectrum) {
  auto ex = build_gasket(5);
  auto a = power_trace(walk_spectrum(ex, 3, 4), 40);
  auto b = power_trace_propagated(ex.level(4), window_indices(ex, 0, 3, 4), 40);
  for (int k = 0; k <= 40; ++k) {
    EXPECT_NEAR(a.single[k], b.single[k], 1e-12);
    EXPECT_NEAR(a.paired[k], b.paired[k], 1e-12);
  }
}

TEST(Power, DisconnectedGraphRejected) {
  CWComplex g = detail::graph_complex(4, {{0, 1}, {2, 3}});
  EXPECT_THROW(walk_spectrum(g, {0, 1}), std::invalid_argument);
}

TEST(Density, CountingFunction) {
  auto ex = build_gasket(4);
  auto s = window_spectrum(ex, {LaplacianKind::full, 0, false}, 3, 3);
  auto lambdas = log_grid(1e-6, 10, 50);
  auto c = density_curve(s, nullptr, lambdas, Normalization::state);
  for (std::size_t i = 1; i < c.samples.size(); ++i)
    EXPECT_GE(c.samples[i].estimate.value, c.samples[i - 1].estimate.value);
  EXPECT_NEAR(c.samples.back().estimate.value, 1.0, 1e-15);
  EXPECT_NEAR(s.counting(0.0, Normalization::state), 1.0 / static_cast<double>(ex.level(3).count(0)), 1e-15);
  auto amb = spectral_density(ex, {LaplacianKind::full, 0, false}, 2, 3, {0.0, 100.0}, Normalization::volume);
  EXPECT_NEAR(amb.samples[1].estimate.value, trace_volume(ex, identity_on(ex.level(3), 0), 2, 3).value, 1e-12);
}

TEST(Bounds, CommutatorWithWeightedLaplacian) {
  auto ex = build_gasket(6);
  const int m = 5;
  auto a = laplacian(ex.level(m), 0);
  OperatorMatrix d = identity_on(ex.level(m), 0);
  for (Eigen::Index i = 0; i < d.real.rows(); ++i) d.real.coeffRef(i, i) = std::sin(1.0 + static_cast<double>(i));
  d.real = SparseReal(d.real * a.real);
  for (int n = 1; n < m; ++n) {
    auto c = commutator_check(ex, a, d, n, m);
    EXPECT_TRUE(c.holds) << n << ' ' << c.value << ' ' << c.bound;
    EXPECT_GT(c.value, 0.0);
  }
}

TEST(Bounds, CauchyAcrossLevels) {
  for (const auto& fam : family_names()) {
    auto ex = build_family(fam, 4);
    for (int j = 0; j <= ex.dimension(); ++j) {
      auto t = laplacian(ex.level(3), j, LaplacianKind::full);
      auto c = cauchy_check(ex, t, 1, 2, 3);
      EXPECT_TRUE(c.holds) << fam << " j=" << j << ' ' << c.value << ' ' << c.bound;
    }
  }
  auto ex = build_gasket(3);
  EXPECT_THROW(cauchy_check(ex, laplacian(ex.level(2), 0), 2, 2, 2), std::invalid_argument);
}

TEST(Output, CsvRendering) {
  TraceCurve c;
  c.samples.push_back({0.5, {0.25, 1, std::nullopt, ErrorKind::none, Normalization::volume}});
  c.samples.push_back({1.0, {1.0 / 3.0, 1, 0.001, ErrorKind::heuristic, Normalization::volume}});
  std::ostringstream os;
  write_curve_csv(os, c);
  EXPECT_EQ(os.str(),
            "t,value,error_bound,kind\n0.5,0.25,,none\n1,0.33333333333333331,0.001,heuristic\n");
}

TEST(Output, LogGrid) {
  auto g = log_grid(0.1, 1e4, 60);
  ASSERT_EQ(g.size(), 60u);
  EXPECT_EQ(g.front(), 0.1);
  EXPECT_EQ(g.back(), 1e4);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(std::log(g[i] / g[i - 1]), std::log(1e5) / 59, 1e-12);
  EXPECT_THROW(log_grid(0.0, 1.0, 5), std::invalid_argument);
}
