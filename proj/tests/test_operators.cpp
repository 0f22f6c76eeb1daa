#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <sstream>

#include <sscw/builders.hpp>
#include <sscw/operators.hpp>

using namespace sscw;

namespace {

CWComplex triangle2() {
  return CWComplex({3, 3, 1}, {{{1, 0}, {0, 0}, -1}, {{1, 0}, {0, 1}, 1}, {{1, 1}, {0, 1}, -1}, {{1, 1}, {0, 2}, 1},
                               {{1, 2}, {0, 2}, -1}, {{1, 2}, {0, 0}, 1}, {{2, 0}, {1, 0}, 1}, {{2, 0}, {1, 1}, 1},
                               {{2, 0}, {1, 2}, 1}});
}

CWComplex square() {
  std::vector<IncidenceRecord> r;
  for (std::size_t e = 0; e < 4; ++e) {
    r.push_back({{1, e}, {0, e}, -1});
    r.push_back({{1, e}, {0, (e + 1) % 4}, 1});
    r.push_back({{2, 0}, {1, e}, 1});
  }
  return CWComplex({4, 4, 1}, r);
}

CWComplex graph(std::size_t nv, const std::vector<std::pair<std::size_t, std::size_t>>& e) {
  return detail::graph_complex(nv, e);
}

Eigen::MatrixXd dense_int(const SparseInt& m) { return Eigen::MatrixXd(m.cast<double>()); }

std::vector<double> nonzero_eigs(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-9) out.push_back(es.eigenvalues()(i));
  return out;
}

Eigen::Index float_rank(const Eigen::MatrixXd& m) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-9);
  return lu.rank();
}

}  // namespace

TEST(Boundary, TriangleIncidenceMatrix) {
  auto b = boundary_matrix(triangle2(), 1);
  Eigen::MatrixXd want(3, 3);
  want << -1, 0, 1, 1, -1, 0, 0, 1, -1;
  EXPECT_EQ(dense_int(*b.integer), want);
  EXPECT_EQ(b.variant, Variant::boundary);
  EXPECT_EQ(want.colwise().sum(), Eigen::RowVectorXd::Zero(3));
}

TEST(Boundary, GasketLevel2Columns) {
  auto b = boundary_matrix(build_gasket(2).level(2), 1);
  ASSERT_EQ(b.rows(), 6);
  ASSERT_EQ(b.cols(), 9);
  auto d = dense_int(*b.integer);
  for (Eigen::Index c = 0; c < 9; ++c) {
    EXPECT_EQ(d.col(c).maxCoeff(), 1);
    EXPECT_EQ(d.col(c).minCoeff(), -1);
    EXPECT_EQ(d.col(c).cwiseAbs().sum(), 2);
  }
}

TEST(Boundary, SquareComposesToZero) {
  auto k = square();
  SparseInt p = *boundary_matrix(k, 1).integer * *boundary_matrix(k, 2).integer;
  EXPECT_EQ(dense_int(p).cwiseAbs().sum(), 0);
  EXPECT_THROW(boundary_matrix(k, 0), std::invalid_argument);
  EXPECT_THROW(boundary_matrix(k, 3), std::invalid_argument);
}

TEST(Laplacian, TriangleGraph) {
  auto k = graph(3, {{0, 1}, {1, 2}, {2, 0}});
  auto d = dense_int(*laplacian(k, 0).integer);
  Eigen::MatrixXd want = 3 * Eigen::MatrixXd::Identity(3, 3) - Eigen::MatrixXd::Ones(3, 3);
  EXPECT_EQ(d, want);
  // the absent half is zero
  EXPECT_EQ(dense_int(*laplacian(k, 0, LaplacianKind::minus).integer).cwiseAbs().sum(), 0);
  EXPECT_THROW(laplacian(k, 2), std::invalid_argument);
}

TEST(Laplacian, SquareMinusDiagonal) {
  auto d = dense_int(*laplacian(square(), 1, LaplacianKind::minus).integer);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(d(i, i), 2);
}

TEST(Laplacian, PlusDiagonalCountsCofaces) {
  auto k = build_carpet_complex(2).level(2);
  auto d = *laplacian(k, 1, LaplacianKind::plus).integer;
  for (std::size_t e = 0; e < k.count(1); ++e)
    EXPECT_EQ(d.coeff(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(e)),
              static_cast<std::int64_t>(k.cofaces(1, e).size()));
}

TEST(Laplacian, SymmetricPsdAndHalvesOrthogonal) {
  for (const auto& fam : family_names()) {
    const auto k = build_family(fam, 2).level(2);
    for (int j = 0; j <= k.dimension(); ++j)
      for (bool rel : {false, true}) {
        auto full = dense_int(*laplacian(k, j, LaplacianKind::full, rel).integer);
        EXPECT_EQ(full, full.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full, Eigen::EigenvaluesOnly);
        EXPECT_GT(es.eigenvalues().minCoeff(), -1e-9);
        SparseInt prod = *laplacian(k, j, LaplacianKind::plus, rel).integer * *laplacian(k, j, LaplacianKind::minus, rel).integer;
        EXPECT_EQ(dense_int(prod).cwiseAbs().sum(), 0) << fam << " j=" << j;
      }
  }
}

TEST(Laplacian, HodgeRankIdentity) {
  for (const auto& fam : family_names()) {
    const auto k = build_family(fam, 2).level(2);
    for (int j = 0; j <= k.dimension(); ++j) {
      auto p = *laplacian(k, j, LaplacianKind::plus).integer;
      auto m = *laplacian(k, j, LaplacianKind::minus).integer;
      auto f = *laplacian(k, j).integer;
      const auto rp = modular_rank(p), rm = modular_rank(m), rf = modular_rank(f);
      EXPECT_EQ(rp + rm, rf) << fam << " j=" << j;
      EXPECT_EQ(static_cast<Eigen::Index>(rf), float_rank(dense_int(f)));
      EXPECT_EQ(static_cast<Eigen::Index>(rp), float_rank(dense_int(p)));
    }
  }
}

TEST(Laplacian, SingularSpectraOfHalvesCoincide) {
  const auto k = build_carpet_complex(2).level(2);
  for (int j = 1; j <= 2; ++j) {
    auto b = dense_int(*boundary_matrix(k, j).integer);
    auto a = nonzero_eigs(b * b.transpose()), c = nonzero_eigs(b.transpose() * b);
    ASSERT_EQ(a.size(), c.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], c[i], 1e-10);
  }
}

TEST(Laplacian, RelativeVanishesOnBoundaryCells) {
  const auto k = build_carpet_complex(2).level(2);
  auto bm = boundary_subcomplex(k);
  for (int j = 0; j <= 2; ++j) {
    auto d = dense_int(*laplacian(k, j, LaplacianKind::full, true).integer);
    for (std::size_t i = 0; i < k.count(j); ++i)
      if (bm.contains(j, i)) {
        EXPECT_EQ(d.row(static_cast<Eigen::Index>(i)).cwiseAbs().sum(), 0);
      }
  }
}

TEST(Laplacian, CarpetRelativeTopIsDualGraphLaplacian) {
  const auto k = build_carpet_complex(1).level(1);
  auto rel = laplacian(k, 2, LaplacianKind::minus, true);
  auto w = walk_operators(dual_graph(k));
  EXPECT_EQ(dense_int(*rel.integer), dense_int(*w.laplacian.integer));
}

TEST(NormBound, PathAndEdge) {
  auto path = norm_bound_check(graph(3, {{0, 1}, {1, 2}}), 1);
  EXPECT_NEAR(path.sigma_max_sq, 3.0, 1e-12);
  EXPECT_EQ(path.bound, 8);
  EXPECT_TRUE(path.holds);
  auto edge = norm_bound_check(graph(2, {{0, 1}}), 1);
  EXPECT_NEAR(edge.sigma_max_sq, 2.0, 1e-12);
  EXPECT_EQ(edge.bound, 4);
  auto g3 = norm_bound_check(build_gasket(3).level(3), 1);
  EXPECT_TRUE(g3.holds);
  EXPECT_GE(g3.slack(), 0.0);
}

TEST(Walk, TriangleAndStar) {
  auto w = walk_operators(graph(3, {{0, 1}, {1, 2}, {2, 0}}));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(w.transition.real.coeff(r, c), r == c ? 0.0 : 0.5);
  auto s = walk_operators(graph(4, {{0, 1}, {0, 2}, {0, 3}}));
  EXPECT_DOUBLE_EQ(s.transition.real.coeff(0, 1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.transition.real.coeff(1, 0), 1.0);
  EXPECT_EQ(s.max_degree, 3u);
}

TEST(Walk, RowsStochasticAndIntegerIdentity) {
  auto k = build_gasket(2).level(2);
  auto w = walk_operators(k);
  EXPECT_TRUE(transition_rows_stochastic(w));
  SparseInt diff = SparseInt(*w.degree.integer - *w.adjacency.integer) - *laplacian(k, 0).integer;
  EXPECT_EQ(dense_int(diff).cwiseAbs().sum(), 0);
  EXPECT_EQ(dense_int(*w.laplacian.integer), dense_int(*laplacian(k, 0).integer));
}

TEST(Walk, IsolatedVertexThrows) {
  EXPECT_THROW(walk_operators(graph(3, {{0, 1}})), std::invalid_argument);
}

TEST(Walk, QAndDeltaCAreSimilar) {
  auto w = walk_operators(build_lindstrom(1).level(1));
  Eigen::VectorXd q = symmetric_eigenvalues(w.Q.dense());
  Eigen::EigenSolver<Eigen::MatrixXd> es(w.delta_c.dense());
  std::vector<double> dc;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    EXPECT_NEAR(es.eigenvalues()(i).imag(), 0.0, 1e-10);
    dc.push_back(es.eigenvalues()(i).real());
  }
  std::sort(dc.begin(), dc.end());
  for (Eigen::Index i = 0; i < q.size(); ++i) EXPECT_NEAR(q(i), dc[static_cast<std::size_t>(i)], 1e-10);
}

TEST(Walk, OperatorSandwich) {
  auto k = build_vicsek(1).level(1);
  auto w = walk_operators(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.Q.dense());
  Eigen::MatrixXd root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                         es.eigenvectors().transpose();
  Eigen::MatrixXd mid = root * w.degree.dense() * root;
  const double mu = static_cast<double>(w.max_degree);
  EXPECT_GT(symmetric_eigenvalues(mid - w.Q.dense()).minCoeff(), -1e-10);
  EXPECT_GT(symmetric_eigenvalues(mu * w.Q.dense() - mid).minCoeff(), -1e-10);
}

TEST(GraphLike, GraphBuildersYes) {
  for (const std::string fam : {"gasket", "vicsek", "lindstrom"}) {
    auto r = is_graph_like(laplacian(build_family(fam, 3).level(3), 0, LaplacianKind::plus));
    EXPECT_TRUE(r.graph_like) << fam;
  }
}

TEST(GraphLike, TriangleTwoComplexHasOddCycle) {
  auto op = laplacian(triangle2(), 1, LaplacianKind::plus);
  auto r = is_graph_like(op);
  EXPECT_FALSE(r.graph_like);
  ASSERT_EQ(r.witness.size(), 3u);
  EXPECT_EQ(std::set<std::size_t>(r.witness.begin(), r.witness.end()), (std::set<std::size_t>{0, 1, 2}));
  EXPECT_EQ(cycle_sign_product(op, r.witness), -1);
}

TEST(GraphLike, SquareEdgesNotGraphLike) {
  auto r = is_graph_like(laplacian(square(), 1, LaplacianKind::plus));
  EXPECT_FALSE(r.graph_like);
  EXPECT_FALSE(r.witness.empty());
}

TEST(GraphLike, CarpetRelativeTopWithPlanarOrientation) {
  auto k = build_carpet_complex(1).level(1);
  auto op = laplacian(k, 2, LaplacianKind::minus, true);
  EXPECT_TRUE(is_graph_like(op, false).graph_like);
  auto r = is_graph_like(op, true);
  ASSERT_TRUE(r.graph_like);
  // the orientation found makes every off-diagonal entry -1 or 0
  auto d = dense_int(*op.integer);
  for (Eigen::Index a = 0; a < d.rows(); ++a)
    for (Eigen::Index b = 0; b < d.cols(); ++b)
      if (a != b) {
        EXPECT_LE(r.orientation[a] * r.orientation[b] * d(a, b), 0.0);
      }
}

TEST(GraphLike, RejectsLargeEntries) {
  auto op = laplacian(graph(2, {{0, 1}, {0, 1}}), 0);
  auto r = is_graph_like(op);
  EXPECT_FALSE(r.graph_like);
  EXPECT_EQ(r.witness.size(), 2u);
}

TEST(Geometric, GasketLaplacianCommutesWithCopies) {
  auto ex = build_gasket(3);
  auto op = laplacian(ex.level(3), 0);
  for (int c = 0; c < 3; ++c) {
    auto rep = verify_geometric(op, ex.level(3), local_isomorphism(ex, 2, {c}), 1);
    EXPECT_GT(rep.testable, 0u);
    EXPECT_TRUE(rep.passed()) << rep.messages.front();
  }
}

TEST(Geometric, IdentityAtRadiusZero) {
  auto ex = build_vicsek(2);
  OperatorMatrix id;
  id.j = 0;
  id.real = SparseReal(static_cast<Eigen::Index>(ex.level(2).count(0)), static_cast<Eigen::Index>(ex.level(2).count(0)));
  id.real.setIdentity();
  auto iso = local_isomorphism(ex, 1, {3});
  auto rep = verify_geometric(id, ex.level(2), iso, 0);
  EXPECT_EQ(rep.testable, ex.level(1).count(0));
  EXPECT_TRUE(rep.passed());
}

TEST(Geometric, CarpetRelativeTopWithEnlargedMargin) {
  // a radius-4 ball fits inside a 27x27 copy but not inside a 9x9 one
  auto ex = build_carpet_complex(4);
  auto op = laplacian(ex.level(4), 2, LaplacianKind::minus, true);
  const auto vm = degree_bounds(ex.level(4)).v_minus[2];
  for (int c : {0, 4, 7}) {
    auto rep = verify_geometric(op, ex.level(4), local_isomorphism(ex, 3, {c}), 1 + (vm - 1));
    EXPECT_GT(rep.testable, 0u);
    EXPECT_TRUE(rep.passed());
  }
}

TEST(Geometric, DetectsNonGeometricOperator) {
  auto ex = build_gasket(3);
  auto op = laplacian(ex.level(3), 0);
  // a diagonal perturbation at one interior cell of the source breaks equivariance
  auto iso = local_isomorphism(ex, 2, {1});
  auto rep0 = verify_geometric(op, ex.level(3), iso, 1);
  ASSERT_TRUE(rep0.passed());
  std::size_t target = 0;
  for (std::size_t s = 0; s < ex.level(3).count(0); ++s)
    if (iso.source.contains(0, s) && ex.level(3).cofaces(0, s).size() == 4) {
      bool inside = true;
      for (auto b : ball(ex.level(3), {0, s}, 1)) inside = inside && iso.source.contains(0, b);
      if (inside) {
        target = s;
        break;
      }
    }
  op.real.coeffRef(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(target)) += 1.0;
  EXPECT_FALSE(verify_geometric(op, ex.level(3), iso, 1).passed());
}

TEST(RestrictTo, PrincipalSubmatrix) {
  auto ex = build_gasket(3);
  auto op = laplacian(ex.level(3), 0);
  auto idx = ex.embedding(2, 3).image[0];
  auto r = restrict_to(op, idx);
  ASSERT_EQ(r.rows(), static_cast<Eigen::Index>(idx.size()));
  auto full = op.dense();
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b)
      EXPECT_EQ(r.real.coeff(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)), full(idx[a], idx[b]));
}

TEST(MatrixMarket, IntegerRoundTrip) {
  auto op = laplacian(build_carpet_complex(1).level(1), 1);
  std::stringstream ss;
  write_matrix_market(ss, op);
  auto back = read_matrix_market_integer(ss);
  EXPECT_EQ(dense_int(back), dense_int(*op.integer));
  std::stringstream bad("%%MatrixMarket matrix coordinate real general\n1 1 0\n");
  EXPECT_THROW(read_matrix_market_integer(bad), std::runtime_error);
}
