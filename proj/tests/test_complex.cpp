#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include <sscw/builders.hpp>
#include <sscw/complex.hpp>
#include <sscw/metric.hpp>

using namespace sscw;

namespace {

// 3 vertices, edges 0->1, 1->2, 2->0, one 2-cell
CWComplex triangle() {
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

// bottom row 0 1 2, top row 3 4 5; squares (0,1,4,3) and (1,2,5,4)
CWComplex two_squares() {
  const std::vector<std::pair<std::size_t, std::size_t>> ed{{0, 1}, {1, 2}, {3, 4}, {4, 5}, {0, 3}, {1, 4}, {2, 5}};
  std::vector<IncidenceRecord> r;
  for (std::size_t e = 0; e < ed.size(); ++e) {
    r.push_back({{1, e}, {0, ed[e].first}, -1});
    r.push_back({{1, e}, {0, ed[e].second}, 1});
  }
  for (auto [e, s] : std::vector<std::pair<std::size_t, int>>{{0, 1}, {5, 1}, {2, -1}, {4, -1}}) r.push_back({{2, 0}, {1, e}, s});
  for (auto [e, s] : std::vector<std::pair<std::size_t, int>>{{1, 1}, {6, 1}, {3, -1}, {5, -1}}) r.push_back({{2, 1}, {1, e}, s});
  return CWComplex({6, 7, 2}, r);
}

bool has_kind(const ValidationReport& rep, const std::string& kind) {
  return std::any_of(rep.begin(), rep.end(), [&](const Violation& v) { return v.kind == kind; });
}

// independent oracle: BFS over explicitly materialised neighbour sets
std::vector<long> brute_distances(const CWComplex& k, int j, std::size_t from, Flavor fl) {
  const auto n = k.count(j);
  std::vector<std::set<std::size_t>> nb(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      bool minus = false, plus = false;
      if (j >= 1)
        for (const auto& fa : k.faces(j, a))
          for (const auto& fb : k.faces(j, b)) minus = minus || fa.cell == fb.cell;
      for (const auto& ca : k.cofaces(j, a))
        for (const auto& cb : k.cofaces(j, b)) plus = plus || ca.cell == cb.cell;
      if ((fl != Flavor::d_plus && minus) || (fl != Flavor::d_minus && plus)) nb[a].insert(b);
    }
  std::vector<long> d(n, -1);
  std::deque<std::size_t> q{from};
  d[from] = 0;
  while (!q.empty()) {
    auto v = q.front();
    q.pop_front();
    for (auto w : nb[v])
      if (d[w] < 0) {
        d[w] = d[v] + 1;
        q.push_back(w);
      }
  }
  return d;
}

}  // namespace

TEST(Validate, TriangleIsClean) { EXPECT_TRUE(validate(triangle()).empty()); }

TEST(Validate, EdgeWithTwoPositiveEndpoints) {
  CWComplex k({2, 1}, {{{1, 0}, {0, 0}, 1}, {{1, 0}, {0, 1}, 1}});
  auto rep = validate(k);
  ASSERT_TRUE(has_kind(rep, "orientation"));
  EXPECT_EQ(rep.front().cells.front(), (CellId{1, 0}));
}

TEST(Validate, NonRegularIncidence) {
  CWComplex k({1, 1}, {{{1, 0}, {0, 0}, 2}});
  EXPECT_TRUE(has_kind(validate(k), "non_regular"));
}

TEST(Validate, BoundarySquaredWitness) {
  // flip one edge sign in the 2-cell of the triangle
  auto recs = triangle().records();
  recs.back().number = -recs.back().number;
  CWComplex k({3, 3, 1}, recs);
  EXPECT_TRUE(has_kind(validate(k), "boundary_squared"));
}

TEST(Validate, UnreferencedVertex) {
  CWComplex k({3, 1}, {{{1, 0}, {0, 0}, -1}, {{1, 0}, {0, 1}, 1}});
  auto rep = validate(k);
  ASSERT_TRUE(has_kind(rep, "unreferenced"));
}

TEST(Validate, GasketLevel4) { EXPECT_TRUE(validate(build_gasket(4).level(4)).empty()); }

TEST(CWComplexTest, RejectsZeroIncidenceAndBadIndex) {
  EXPECT_THROW(CWComplex({2, 1}, {{{1, 0}, {0, 0}, 0}}), std::invalid_argument);
  EXPECT_THROW(CWComplex({2, 1}, {{{1, 0}, {0, 5}, 1}}), std::invalid_argument);
  EXPECT_THROW(CWComplex({2, 1}, {{{1, 0}, {1, 0}, 1}}), std::invalid_argument);
}

TEST(CWComplexTest, TextRoundTripIsBitStable) {
  auto k = build_gasket(3).level(3);
  auto text = to_text(k);
  std::istringstream is(text);
  auto back = read_complex(is);
  EXPECT_EQ(back, k);
  EXPECT_EQ(to_text(back), text);
  EXPECT_EQ(text.rfind("dim 1\ncells 0 15\ncells 1 27\n1 0 ", 0), 0u);
}

TEST(CWComplexTest, MalformedTextThrows) {
  std::istringstream a("dim x");
  EXPECT_THROW(read_complex(a), std::runtime_error);
  std::istringstream b("dim 1\ncells 0 2\ncells 1 1\n1 0 0 -1\n1 0 oops\n");
  EXPECT_THROW(read_complex(b), std::runtime_error);
}

TEST(Distance, TriangleEdges) {
  auto k = triangle();
  EXPECT_EQ(distance(k, {1, 0}, {1, 1}, Flavor::d_minus), 1u);
  EXPECT_EQ(distance(k, {1, 0}, {1, 2}, Flavor::d_plus), 1u);
  EXPECT_EQ(distance(k, {1, 0}, {1, 0}, Flavor::d), 0u);
  EXPECT_THROW(distance(k, {1, 0}, {0, 0}), std::invalid_argument);
}

TEST(Distance, InfinityAcrossComponents) {
  CWComplex k({4, 2}, {{{1, 0}, {0, 0}, -1}, {{1, 0}, {0, 1}, 1}, {{1, 1}, {0, 2}, -1}, {{1, 1}, {0, 3}, 1}});
  EXPECT_FALSE(distance(k, {0, 0}, {0, 3}).has_value());
  EXPECT_FALSE(is_connected(k, 0, Flavor::d));
}

TEST(Distance, MatchesBruteForceOnGasketEdges) {
  auto k = build_gasket(2).level(2);
  for (auto fl : {Flavor::d, Flavor::d_minus})
    for (std::size_t a = 0; a < k.count(1); ++a) {
      auto d = distances_from(k, {1, a}, fl);
      auto oracle = brute_distances(k, 1, a, fl);
      for (std::size_t b = 0; b < k.count(1); ++b) {
        ASSERT_EQ(d[b].has_value(), oracle[b] >= 0);
        if (d[b]) {
          EXPECT_EQ(static_cast<long>(*d[b]), oracle[b]);
        }
      }
    }
}

TEST(Distance, MixedStepsOnTwoSquares) {
  auto k = two_squares();
  for (std::size_t a = 0; a < k.count(1); ++a) {
    auto d = distances_from(k, {1, a}, Flavor::d);
    auto dp = distances_from(k, {1, a}, Flavor::d_plus);
    auto dm = distances_from(k, {1, a}, Flavor::d_minus);
    auto oracle = brute_distances(k, 1, a, Flavor::d);
    for (std::size_t b = 0; b < k.count(1); ++b) {
      EXPECT_EQ(static_cast<long>(*d[b]), oracle[b]);
      if (dp[b]) {
        EXPECT_LE(*d[b], *dp[b]);
      }
      if (dm[b]) {
        EXPECT_LE(*d[b], *dm[b]);
      }
    }
  }
}

TEST(Distance, SymmetricAndTriangleInequality) {
  auto k = build_vicsek(2).level(2);
  const auto n = k.count(1);
  std::vector<std::vector<Distance>> d(n);
  for (std::size_t a = 0; a < n; ++a) d[a] = distances_from(k, {1, a});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      ASSERT_EQ(d[a][b], d[b][a]);
      EXPECT_EQ(*d[a][b] == 0, a == b);
      for (std::size_t c = 0; c < n; c += 7) EXPECT_LE(*d[a][b], *d[a][c] + *d[c][b]);
    }
}

TEST(Ball, RadiusZeroAndLarge) {
  auto k = build_gasket(3).level(3);
  EXPECT_EQ(ball(k, {0, 5}, 0), (std::vector<std::size_t>{5}));
  EXPECT_EQ(ball(k, {0, 5}, 1000).size(), k.count(0));
}

TEST(Ball, InteriorGasketEdgeNeighbourhood) {
  auto k = build_gasket(3).level(3);
  for (std::size_t e = 0; e < k.count(1); ++e) {
    std::set<std::size_t> oracle{e};
    for (const auto& v : k.faces(1, e))
      for (const auto& c : k.cofaces(0, v.cell)) oracle.insert(c.cell);
    auto b = ball(k, {1, e}, 1);
    EXPECT_EQ(std::set<std::size_t>(b.begin(), b.end()), oracle);
  }
}

TEST(Ball, RecursionAndMuPowerBound) {
  auto k = build_lindstrom(2).level(2);
  auto db = degree_bounds(k);
  for (std::size_t s = 0; s < k.count(0); s += 3)
    for (std::size_t r = 0; r < 4; ++r) {
      std::set<std::size_t> grown;
      for (auto c : ball(k, {0, s}, r))
        for (auto x : ball(k, {0, c}, 1)) grown.insert(x);
      auto next = ball(k, {0, s}, r + 1);
      EXPECT_EQ(std::set<std::size_t>(next.begin(), next.end()), grown);
      EXPECT_LE(static_cast<double>(next.size()), std::pow(static_cast<double>(db.mu[0]), double(r + 1)));
    }
}

TEST(Frontier, WholeComplexIsEmpty) {
  auto k = build_gasket(2).level(2);
  EXPECT_TRUE(frontier(k, SubcomplexMask(k, true), 0).empty());
}

TEST(Frontier, SingleVertex) {
  auto k = build_gasket(2).level(2);
  SubcomplexMask m(k);
  m.insert(0, 4);
  EXPECT_EQ(frontier(k, m, 0), (std::vector<std::size_t>{4}));
}

TEST(Frontier, GasketLevel1InsideLevel2IsTheGluedCorners) {
  auto ex = build_gasket(2);
  auto mask = ex.window_mask(1, 2);
  std::set<std::size_t> other;
  for (std::size_t c = 1; c < ex.copy_maps[1].size(); ++c)
    for (auto v : ex.copy_maps[1][c].image[0]) other.insert(v);
  std::vector<std::size_t> oracle;
  for (auto v : ex.copy_maps[1][0].image[0])
    if (other.count(v)) oracle.push_back(v);
  std::sort(oracle.begin(), oracle.end());
  auto fr = frontier(ex.level(2), mask, 0);
  EXPECT_EQ(fr, oracle);
  EXPECT_EQ(fr.size(), 2u);
  for (auto v : fr) EXPECT_TRUE(mask.contains(0, v));
}

TEST(BoundarySubcomplex, Square) {
  auto k = square();
  auto b = boundary_subcomplex(k);
  EXPECT_EQ(b.count(1), 4u);
  EXPECT_EQ(b.count(0), 4u);
  EXPECT_EQ(b.count(2), 0u);
  EXPECT_TRUE(b.is_closed());
}

TEST(BoundarySubcomplex, TwoSquaresExcludeSharedEdge) {
  auto k = two_squares();
  auto b = boundary_subcomplex(k);
  EXPECT_EQ(b.count(1), 6u);
  EXPECT_FALSE(b.contains(1, 5));
  EXPECT_EQ(b.count(0), 6u);
  EXPECT_TRUE(b.is_closed());
}

TEST(BoundarySubcomplex, CarpetLevel2PerimeterAndHoles) {
  auto k = build_carpet_complex(2).level(2);
  auto b = boundary_subcomplex(k);
  std::size_t oracle = 0;
  for (std::size_t e = 0; e < k.count(1); ++e) oracle += k.cofaces(1, e).size() == 1;
  EXPECT_EQ(b.count(1), oracle);
  // outer perimeter 4*9 edges, big hole 4*3, eight small holes 4 each
  EXPECT_EQ(oracle, 36u + 12u + 32u);
  EXPECT_TRUE(b.is_closed());
}

TEST(BoundarySubcomplex, NeedsPositiveDimension) {
  EXPECT_THROW(boundary_subcomplex(CWComplex({1}, {})), std::invalid_argument);
}

TEST(SubcomplexMaskTest, ClosureAndFullness) {
  auto k = triangle();
  SubcomplexMask m(k);
  m.insert(1, 0);
  EXPECT_EQ(m.closure_violation(), (CellId{1, 0}));
  auto c = m.closure();
  EXPECT_TRUE(c.is_closed());
  EXPECT_EQ(c.count(0), 2u);
  // all three vertices but only one edge: edges 1 and 2 have all faces present
  c.insert(0, 2);
  EXPECT_FALSE(c.is_full());
  SubcomplexMask all(k, true);
  EXPECT_TRUE(all.is_full());
}

TEST(DegreeBoundsTest, CorrectedMuBound) {
  for (const auto& fam : family_names()) {
    auto ex = build_family(fam, 2);
    const auto& k = ex.level(2);
    auto db = degree_bounds(k);
    for (int j = 0; j <= k.dimension(); ++j) {
      EXPECT_LE(db.mu[j], db.mu_bound(j)) << fam << " j=" << j;
      std::size_t oracle = 0;
      for (std::size_t s = 0; s < k.count(j); ++s) oracle = std::max(oracle, ball(k, {j, s}, 1).size());
      EXPECT_EQ(db.mu[j], oracle);
    }
  }
  // gasket vertex of degree 4: |B_1| = 5 exceeds V+ + V- = 4
  auto db = degree_bounds(build_gasket(2).level(2));
  EXPECT_EQ(db.mu[0], 5u);
  EXPECT_EQ(db.v_plus[0] + db.v_minus[0], 4u);
}

TEST(Connectivity, PlusConnectedImpliesMinusConnected) {
  for (const auto& fam : family_names()) {
    auto ex = build_family(fam, 2);
    for (int n = 0; n <= 2; ++n) {
      const auto& k = ex.level(n);
      for (int j = 0; j <= k.dimension(); ++j)
        if (is_connected(k, j, Flavor::d_plus) && k.count(j) > 0 && j >= 1) {
          EXPECT_TRUE(is_connected(k, j, Flavor::d_minus)) << fam << " n=" << n << " j=" << j;
        }
    }
  }
}

TEST(Validate, AllBuildersComposeToZero) {
  for (const auto& fam : family_names()) {
    auto ex = build_family(fam, 2);
    for (const auto& k : ex.levels) EXPECT_TRUE(validate(k).empty()) << fam;
  }
}
