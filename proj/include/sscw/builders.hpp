#pragma once

#include <array>
#include <boost/rational.hpp>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "complex.hpp"
#include "exhaustion.hpp"

namespace sscw {

using Rational = boost::rational<std::int64_t>;

/// Count formula sum_i coef_i * base_i^n.
struct ClosedForm {
  std::vector<std::pair<Rational, std::int64_t>> terms;

  Rational at(int n) const {
    Rational s = 0;
    for (const auto& [c, b] : terms) {
      std::int64_t pw = 1;
      for (int i = 0; i < n; ++i) pw *= b;
      s += c * pw;
    }
    return s;
  }
  /// Coefficient of the dominant exponential.
  std::pair<Rational, std::int64_t> leading() const {
    auto it = std::max_element(terms.begin(), terms.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
    return *it;
  }
};

/// Closed-form cell counts per dimension, when known for a family.
inline std::optional<std::vector<ClosedForm>> closed_form_counts(const std::string& family) {
  using R = Rational;
  if (family == "gasket") return std::vector<ClosedForm>{{{{R(1, 2), 3}, {R(3, 2), 1}}}, {{{R(1), 3}}}};
  if (family == "vicsek") return std::vector<ClosedForm>{{{{R(3), 5}, {R(1), 1}}}, {{{R(4), 5}}}};
  if (family == "lindstrom") return std::vector<ClosedForm>{{{{R(4), 7}, {R(2), 1}}}, {{{R(6), 7}}}};
  if (family == "carpet2")
    return std::vector<ClosedForm>{{{{R(44, 35), 8}, {R(8, 5), 3}, {R(8, 7), 1}}},
                                   {{{R(12, 5), 8}, {R(8, 5), 3}}},
                                   {{{R(1), 8}}}};
  if (family == "dodecagon2")
    return std::vector<ClosedForm>{{{{R(7), 3}, {R(27), 1}}}, {{{R(8), 3}, {R(27), 1}}}, {{{R(1, 2), 3}, {R(3, 2), 1}}}};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Graph substitution engine

/// Gluing data for one substitution step K_n → K_{n+1} of a graph family.
struct GluingStep {
  std::vector<std::array<std::size_t, 4>> glue;                 // (copy a, corner a, copy b, corner b)
  std::vector<std::pair<std::size_t, std::size_t>> new_corners;  // corner k of K_{n+1} = (copy, corner)
};

/// Graph family given by a base graph with labelled corners and a per-level gluing rule.
struct SubstitutionRule {
  std::string family;
  std::size_t copies = 0;
  std::vector<std::pair<std::size_t, std::size_t>> base_edges;  // (tail, head)
  std::size_t base_vertices = 0;
  std::vector<std::size_t> base_corners;
  std::function<GluingStep(int)> step;
};

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

inline CWComplex graph_complex(std::size_t nv, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<IncidenceRecord> recs;
  recs.reserve(2 * edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    recs.push_back({{1, e}, {0, edges[e].first}, -1});
    recs.push_back({{1, e}, {0, edges[e].second}, +1});
  }
  return CWComplex({nv, edges.size()}, std::move(recs));
}

}  // namespace detail

inline SubstitutionRule gasket_rule() {
  SubstitutionRule r{"gasket", 3, {{0, 1}}, 2, {0, 1}, {}};
  r.step = [](int n) {
    GluingStep s;
    if (n == 0) {
      // an edge becomes a triangle; copy c runs from corner c to corner c+1
      for (std::size_t c = 0; c < 3; ++c) s.glue.push_back({c, 1, (c + 1) % 3, 0});
      for (std::size_t c = 0; c < 3; ++c) s.new_corners.push_back({c, 0});
    } else {
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a + 1; b < 3; ++b) s.glue.push_back({a, b, b, a});
      for (std::size_t c = 0; c < 3; ++c) s.new_corners.push_back({c, c});
    }
    return s;
  };
  return r;
}

/// Corners 0..3 = SW, SE, NE, NW; copies 0..3 sit at those corners, copy 4 in the centre.
inline SubstitutionRule vicsek_rule() {
  SubstitutionRule r{"vicsek", 5, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, 4, {0, 1, 2, 3}, {}};
  r.step = [](int) {
    GluingStep s;
    for (std::size_t c = 0; c < 4; ++c) s.glue.push_back({c, (c + 2) % 4, 4, c});
    for (std::size_t c = 0; c < 4; ++c) s.new_corners.push_back({c, c});
    return s;
  };
  return r;
}

/// Hexagon corners 0..5; copies 0..5 form the outer ring, copy 6 the centre.
inline SubstitutionRule lindstrom_rule() {
  SubstitutionRule r{"lindstrom", 7, {}, 6, {0, 1, 2, 3, 4, 5}, {}};
  for (std::size_t i = 0; i < 6; ++i) r.base_edges.push_back({i, (i + 1) % 6});
  r.step = [](int) {
    GluingStep s;
    for (std::size_t k = 0; k < 6; ++k) {
      s.glue.push_back({k, (k + 3) % 6, 6, k});
      s.glue.push_back({k, (k + 2) % 6, (k + 1) % 6, (k + 5) % 6});
    }
    for (std::size_t k = 0; k < 6; ++k) s.new_corners.push_back({k, k});
    return s;
  };
  return r;
}

inline Exhaustion build_substitution(const SubstitutionRule& rule, int levels) {
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  Exhaustion ex;
  ex.family = rule.family;
  std::size_t nv = rule.base_vertices;
  auto edges = rule.base_edges;
  auto corners = rule.base_corners;
  ex.levels.push_back(detail::graph_complex(nv, edges));
  for (int n = 0; n < levels; ++n) {
    const auto st = rule.step(n);
    const std::size_t q = rule.copies, ne = edges.size();
    detail::UnionFind uf(q * nv);
    for (const auto& g : st.glue) uf.unite(g[0] * nv + corners[g[1]], g[2] * nv + corners[g[3]]);
    std::vector<std::size_t> id(q * nv, SIZE_MAX);
    std::size_t next = 0;
    for (std::size_t x = 0; x < q * nv; ++x) {
      auto root = uf.find(x);
      if (id[root] == SIZE_MAX) id[root] = next++;
      id[x] = id[root];
    }
    std::vector<std::pair<std::size_t, std::size_t>> new_edges;
    new_edges.reserve(q * ne);
    std::vector<CellMap> maps(q);
    for (std::size_t c = 0; c < q; ++c) {
      maps[c].image.assign(2, {});
      for (std::size_t v = 0; v < nv; ++v) maps[c].image[0].push_back(static_cast<std::uint32_t>(id[c * nv + v]));
      for (std::size_t e = 0; e < ne; ++e) {
        maps[c].image[1].push_back(static_cast<std::uint32_t>(c * ne + e));
        new_edges.push_back({id[c * nv + edges[e].first], id[c * nv + edges[e].second]});
      }
    }
    std::vector<std::size_t> new_corners;
    for (const auto& [c, k] : st.new_corners) new_corners.push_back(id[c * nv + corners[k]]);
    nv = next;
    edges = std::move(new_edges);
    corners = std::move(new_corners);
    ex.levels.push_back(detail::graph_complex(nv, edges));
    ex.copy_maps.push_back(std::move(maps));
  }
  return ex;
}

/// Vertex and edge counts propagated through the gluing rule without building the levels.
/// Each level multiplies counts by q and removes one vertex per effective identification.
inline std::vector<std::array<std::int64_t, 2>> substitution_counts(const SubstitutionRule& rule, int levels) {
  std::vector<std::array<std::int64_t, 2>> out;
  std::int64_t nv = static_cast<std::int64_t>(rule.base_vertices), ne = static_cast<std::int64_t>(rule.base_edges.size());
  std::size_t ncorners = rule.base_corners.size();
  out.push_back({nv, ne});
  for (int n = 0; n < levels; ++n) {
    const auto st = rule.step(n);
    detail::UnionFind uf(rule.copies * ncorners);
    std::int64_t merges = 0;
    for (const auto& g : st.glue) merges += uf.unite(g[0] * ncorners + g[1], g[2] * ncorners + g[3]) ? 1 : 0;
    nv = static_cast<std::int64_t>(rule.copies) * nv - merges;
    ne = static_cast<std::int64_t>(rule.copies) * ne;
    ncorners = st.new_corners.size();
    out.push_back({nv, ne});
  }
  return out;
}

inline Exhaustion build_gasket(int levels) { return build_substitution(gasket_rule(), levels); }
inline Exhaustion build_vicsek(int levels) { return build_substitution(vicsek_rule(), levels); }
inline Exhaustion build_lindstrom(int levels) { return build_substitution(lindstrom_rule(), levels); }

// ---------------------------------------------------------------------------
// Carpet 2-complex

namespace detail {

/// Unit squares of the level-n carpet, as (x, y) lower-left corners sorted by (y, x).
inline std::vector<std::pair<std::int64_t, std::int64_t>> carpet_squares(int n) {
  std::int64_t side = 1;
  for (int i = 0; i < n; ++i) side *= 3;
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::int64_t y = 0; y < side; ++y)
    for (std::int64_t x = 0; x < side; ++x) {
      bool keep = true;
      for (std::int64_t a = x, b = y; a > 0 || b > 0; a /= 3, b /= 3)
        if (a % 3 == 1 && b % 3 == 1) keep = false;
      if (keep) out.push_back({x, y});
    }
  return out;
}

struct CarpetLevel {
  CWComplex complex;
  std::map<std::pair<std::int64_t, std::int64_t>, std::uint32_t> vertex, hedge, vedge, square;
};

inline CarpetLevel carpet_level(int n) {
  CarpetLevel L;
  auto sq = carpet_squares(n);
  std::set<std::pair<std::int64_t, std::int64_t>> verts, hs, vs;
  for (auto [x, y] : sq) {
    verts.insert({y, x});
    verts.insert({y, x + 1});
    verts.insert({y + 1, x});
    verts.insert({y + 1, x + 1});
    hs.insert({y, x});
    hs.insert({y + 1, x});
    vs.insert({y, x});
    vs.insert({y, x + 1});
  }
  // indices in (y, x) order; horizontal edges first, then vertical
  for (auto [y, x] : verts) L.vertex.emplace(std::pair{x, y}, static_cast<std::uint32_t>(L.vertex.size()));
  std::uint32_t e = 0;
  for (auto [y, x] : hs) L.hedge.emplace(std::pair{x, y}, e++);
  for (auto [y, x] : vs) L.vedge.emplace(std::pair{x, y}, e++);
  for (auto [x, y] : sq) L.square.emplace(std::pair{x, y}, static_cast<std::uint32_t>(L.square.size()));
  std::vector<IncidenceRecord> recs;
  for (const auto& [xy, id] : L.hedge) {
    recs.push_back({{1, id}, {0, L.vertex.at(xy)}, -1});
    recs.push_back({{1, id}, {0, L.vertex.at({xy.first + 1, xy.second})}, +1});
  }
  for (const auto& [xy, id] : L.vedge) {
    recs.push_back({{1, id}, {0, L.vertex.at(xy)}, -1});
    recs.push_back({{1, id}, {0, L.vertex.at({xy.first, xy.second + 1})}, +1});
  }
  for (const auto& [xy, id] : L.square) {
    auto [x, y] = xy;
    recs.push_back({{2, id}, {1, L.hedge.at({x, y})}, +1});
    recs.push_back({{2, id}, {1, L.vedge.at({x + 1, y})}, +1});
    recs.push_back({{2, id}, {1, L.hedge.at({x, y + 1})}, -1});
    recs.push_back({{2, id}, {1, L.vedge.at({x, y})}, -1});
  }
  L.complex = CWComplex({L.vertex.size(), L.hedge.size() + L.vedge.size(), L.square.size()}, std::move(recs));
  return L;
}

}  // namespace detail

/// Carpet 2-complex: level n is the level-n carpet of 8^n unit squares; copies are the eight translations.
inline Exhaustion build_carpet_complex(int levels) {
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  Exhaustion ex;
  ex.family = "carpet2";
  std::vector<detail::CarpetLevel> L;
  for (int n = 0; n <= levels; ++n) {
    L.push_back(detail::carpet_level(n));
    ex.levels.push_back(L.back().complex);
  }
  const std::array<std::pair<int, int>, 8> offsets{{{0, 0}, {1, 0}, {2, 0}, {0, 1}, {2, 1}, {0, 2}, {1, 2}, {2, 2}}};
  std::int64_t side = 1;
  for (int n = 0; n < levels; ++n, side *= 3) {
    std::vector<CellMap> maps;
    for (auto [a, b] : offsets) {
      const std::int64_t dx = a * side, dy = b * side;
      auto shift = [&](const auto& src, const auto& dst, std::vector<std::uint32_t>& img) {
        img.assign(src.size(), 0);
        for (const auto& [xy, id] : src) img[id] = dst.at({xy.first + dx, xy.second + dy});
      };
      CellMap m;
      m.image.resize(3);
      shift(L[n].vertex, L[n + 1].vertex, m.image[0]);
      m.image[1].assign(L[n].hedge.size() + L[n].vedge.size(), 0);
      for (const auto& [xy, id] : L[n].hedge) m.image[1][id] = L[n + 1].hedge.at({xy.first + dx, xy.second + dy});
      for (const auto& [xy, id] : L[n].vedge) m.image[1][id] = L[n + 1].vedge.at({xy.first + dx, xy.second + dy});
      shift(L[n].square, L[n + 1].square, m.image[2]);
      maps.push_back(std::move(m));
    }
    ex.copy_maps.push_back(std::move(maps));
  }
  return ex;
}

// ---------------------------------------------------------------------------
// Dual graph and graph isomorphism

/// Vertices = top cells; one edge per pair of top cells sharing a codimension-1 face,
/// oriented from the lower to the higher index, edges sorted by (lower, higher).
inline CWComplex dual_graph(const CWComplex& k) {
  const int p = k.dimension();
  if (p < 2) throw std::invalid_argument("dual_graph needs dimension >= 2");
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t f = 0; f < k.count(p - 1); ++f) {
    auto cs = k.cofaces(p - 1, f);
    for (std::size_t a = 0; a < cs.size(); ++a)
      for (std::size_t b = a + 1; b < cs.size(); ++b)
        pairs.insert({std::min<std::size_t>(cs[a].cell, cs[b].cell), std::max<std::size_t>(cs[a].cell, cs[b].cell)});
  }
  return detail::graph_complex(k.count(p), {pairs.begin(), pairs.end()});
}

/// Exhaustion by the dual graphs of the levels. Vertex maps are the top-cell maps; dual edges map
/// to the dual edge joining the image cells (orientation is not tracked).
inline Exhaustion dual_exhaustion(const Exhaustion& ex) {
  const int p = ex.dimension();
  Exhaustion out;
  out.family = ex.family + "_dual";
  std::vector<std::map<std::pair<std::size_t, std::size_t>, std::uint32_t>> edge_index;
  for (const auto& k : ex.levels) {
    out.levels.push_back(dual_graph(k));
    const auto& g = out.levels.back();
    std::map<std::pair<std::size_t, std::size_t>, std::uint32_t> idx;
    for (std::size_t e = 0; e < g.count(1); ++e) {
      auto fs = g.faces(1, e);
      idx[{std::min(fs[0].cell, fs[1].cell), std::max(fs[0].cell, fs[1].cell)}] = static_cast<std::uint32_t>(e);
    }
    edge_index.push_back(std::move(idx));
  }
  for (std::size_t n = 0; n + 1 < ex.levels.size(); ++n) {
    std::vector<CellMap> maps;
    for (const auto& c : ex.copy_maps[n]) {
      CellMap m;
      m.image.resize(2);
      m.image[0] = c.image[p];
      const auto& g = out.levels[n];
      for (std::size_t e = 0; e < g.count(1); ++e) {
        auto fs = g.faces(1, e);
        std::size_t a = m.image[0][fs[0].cell], b = m.image[0][fs[1].cell];
        auto it = edge_index[n + 1].find({std::min(a, b), std::max(a, b)});
        if (it == edge_index[n + 1].end()) throw std::logic_error("dual_exhaustion: copy map does not preserve adjacency");
        m.image[1].push_back(it->second);
      }
      maps.push_back(std::move(m));
    }
    out.copy_maps.push_back(std::move(maps));
  }
  return out;
}

/// Undirected simple adjacency lists of a 1-complex.
inline std::vector<std::vector<std::size_t>> adjacency_lists(const CWComplex& g) {
  std::vector<std::vector<std::size_t>> adj(g.count(0));
  for (std::size_t e = 0; e < g.count(1); ++e) {
    auto fs = g.faces(1, e);
    if (fs.size() != 2) continue;
    adj[fs[0].cell].push_back(fs[1].cell);
    adj[fs[1].cell].push_back(fs[0].cell);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return adj;
}

/// True if `map` (vertex i of a ↦ map[i] of b) is an isomorphism of the underlying simple graphs.
inline bool is_graph_isomorphism(const CWComplex& a, const CWComplex& b, const std::vector<std::size_t>& map) {
  if (a.count(0) != b.count(0) || map.size() != a.count(0)) return false;
  std::vector<std::uint8_t> hit(b.count(0), 0);
  for (auto v : map) {
    if (v >= hit.size() || hit[v]) return false;
    hit[v] = 1;
  }
  auto aa = adjacency_lists(a), bb = adjacency_lists(b);
  for (std::size_t v = 0; v < aa.size(); ++v) {
    std::vector<std::size_t> img;
    for (auto w : aa[v]) img.push_back(map[w]);
    std::sort(img.begin(), img.end());
    if (img != bb[map[v]]) return false;
  }
  return true;
}

namespace detail {

/// Joint colour refinement of two graphs; returns false if the colour histograms diverge.
inline bool refine(const std::vector<std::vector<std::size_t>>& ga, const std::vector<std::vector<std::size_t>>& gb,
                   std::vector<std::size_t>& ca, std::vector<std::size_t>& cb) {
  std::size_t classes = 0;
  while (true) {
    std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::size_t> sig;
    auto relabel = [&](const std::vector<std::vector<std::size_t>>& g, const std::vector<std::size_t>& c) {
      std::vector<std::pair<std::size_t, std::vector<std::size_t>>> keys(g.size());
      for (std::size_t v = 0; v < g.size(); ++v) {
        keys[v].first = c[v];
        for (auto w : g[v]) keys[v].second.push_back(c[w]);
        std::sort(keys[v].second.begin(), keys[v].second.end());
      }
      return keys;
    };
    auto ka = relabel(ga, ca), kb = relabel(gb, cb);
    for (const auto& k : ka) sig.emplace(k, 0);
    for (const auto& k : kb) sig.emplace(k, 0);
    std::size_t id = 0;
    for (auto& [k, v] : sig) v = id++;
    std::vector<std::size_t> ha(id, 0), hb(id, 0);
    for (std::size_t v = 0; v < ka.size(); ++v) ++ha[ca[v] = sig[ka[v]]];
    for (std::size_t v = 0; v < kb.size(); ++v) ++hb[cb[v] = sig[kb[v]]];
    if (ha != hb) return false;
    if (id == classes) return true;
    classes = id;
  }
}

inline bool iso_search(const std::vector<std::vector<std::size_t>>& ga, const std::vector<std::vector<std::size_t>>& gb,
                       std::vector<std::size_t> ca, std::vector<std::size_t> cb, std::vector<std::size_t>& out) {
  if (!refine(ga, gb, ca, cb)) return false;
  std::map<std::size_t, std::size_t> size;
  for (auto c : ca) ++size[c];
  std::size_t target = SIZE_MAX, best = SIZE_MAX;
  for (auto [c, s] : size)
    if (s > 1 && s < best) best = s, target = c;
  if (target == SIZE_MAX) {
    std::vector<std::size_t> where(ca.size());
    for (std::size_t v = 0; v < cb.size(); ++v) where[cb[v]] = v;
    out.resize(ca.size());
    for (std::size_t v = 0; v < ca.size(); ++v) out[v] = where[ca[v]];
    for (std::size_t v = 0; v < ga.size(); ++v) {
      std::vector<std::size_t> img;
      for (auto w : ga[v]) img.push_back(out[w]);
      std::sort(img.begin(), img.end());
      if (img != gb[out[v]]) return false;
    }
    return true;
  }
  std::size_t x = std::find(ca.begin(), ca.end(), target) - ca.begin();
  const std::size_t fresh = ca.size() + cb.size() + 1;
  for (std::size_t y = 0; y < cb.size(); ++y) {
    if (cb[y] != target) continue;
    auto na = ca, nb = cb;
    na[x] = fresh;
    nb[y] = fresh;
    if (iso_search(ga, gb, na, nb, out)) return true;
  }
  return false;
}

}  // namespace detail

/// Isomorphism of simple graphs by colour refinement with individualisation; nullopt if none exists.
inline std::optional<std::vector<std::size_t>> find_graph_isomorphism(const CWComplex& a, const CWComplex& b) {
  if (a.count(0) != b.count(0) || a.count(1) != b.count(1)) return std::nullopt;
  auto ga = adjacency_lists(a), gb = adjacency_lists(b);
  std::vector<std::size_t> ca(ga.size(), 0), cb(gb.size(), 0), out;
  if (!detail::iso_search(ga, gb, ca, cb, out)) return std::nullopt;
  return out;
}

// ---------------------------------------------------------------------------
// Dodecagon 2-complex

/// Dodecagon complex plus the per-level certificate: 2-cell u corresponds to gasket vertex cert[n][u].
struct DodecagonExhaustion {
  Exhaustion complex;
  Exhaustion gasket;
  std::vector<std::vector<std::size_t>> certificate;
};

namespace detail {

using Axial = std::pair<std::int64_t, std::int64_t>;

inline Axial rotate60(Axial p, int times) {
  for (int i = 0; i < ((times % 6) + 6) % 6; ++i) p = {-p.second, p.first + p.second};
  return p;
}

inline int direction_of(Axial d) {
  static const std::array<Axial, 6> dirs{{{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};
  for (int i = 0; i < 6; ++i)
    if (dirs[i] == d) return i;
  return -1;
}

/// Lattice coordinates of the gasket vertices at every level, propagated through the copy maps.
inline std::vector<std::vector<Axial>> gasket_coordinates(const Exhaustion& g) {
  std::vector<std::vector<Axial>> coord(g.levels.size());
  coord[0] = {{0, 0}, {1, 0}};
  const std::array<Axial, 3> tri{{{0, 0}, {1, 0}, {0, 1}}};
  std::int64_t side = 1;  // side length of K_n for n >= 1
  for (int n = 0; n < g.top(); ++n) {
    auto& next = coord[n + 1];
    next.assign(g.level(n + 1).count(0), {INT64_MIN, INT64_MIN});
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t v = 0; v < coord[n].size(); ++v) {
        Axial p;
        if (n == 0) {
          auto r = rotate60(coord[0][v], 2 * static_cast<int>(c));
          p = {tri[c].first + r.first, tri[c].second + r.second};
        } else {
          p = {coord[n][v].first + tri[c].first * side, coord[n][v].second + tri[c].second * side};
        }
        auto& slot = next[g.copy_maps[n][c].image[0][v]];
        if (slot.first != INT64_MIN && slot != p) throw std::logic_error("gasket coordinates inconsistent");
        slot = p;
      }
    if (n > 0) side *= 2;
  }
  return coord;
}

// Each 12-gon has corners v_0..v_11 (v_k at angle 30k-15 degrees) and side i from v_i to v_{i+1};
// even side 2d faces lattice direction d. Odd sides carry a midpoint vertex, so the boundary is an
// 18-cycle of positions v_0, v_1, m_1, v_2, v_3, m_3, ...; edge t runs from position t to t+1.
// Without the midpoints a hole-side of one polygon would have both endpoints in its two
// neighbours and copies would not be full subcomplexes.
constexpr int kDodecagonRing = 18;

inline int dodecagon_corner_position(int i) {
  i = ((i % 12) + 12) % 12;
  return i + i / 2;
}

/// Sign of boundary edge t: +1 except on the even sides 2, 6, 10. The pattern is invariant
/// under a 120-degree rotation (6 positions) and opposite on the two sides of a glued pair.
inline int dodecagon_edge_sign(int t) {
  for (int i : {2, 6, 10})
    if (t == dodecagon_corner_position(i)) return -1;
  return 1;
}

struct DodecagonLevel {
  CWComplex complex;
  std::vector<std::array<std::uint32_t, kDodecagonRing>> vertex, side;  // per polygon, ring position → global
};

inline DodecagonLevel dodecagon_level(const CWComplex& g, const std::vector<Axial>& coord) {
  constexpr std::size_t R = kDodecagonRing;
  const std::size_t np = g.count(0);
  UnionFind uv(np * R), us(np * R);
  auto L = [](std::size_t u, int pos) { return u * R + static_cast<std::size_t>(pos % static_cast<int>(R)); };
  for (std::size_t e = 0; e < g.count(1); ++e) {
    auto fs = g.faces(1, e);
    std::size_t a = fs[0].cell, b = fs[1].cell;
    int d = direction_of({coord[b].first - coord[a].first, coord[b].second - coord[a].second});
    if (d < 0) throw std::logic_error("gasket edge is not a unit lattice step");
    if (d >= 3) {
      std::swap(a, b);
      d -= 3;
    }
    us.unite(L(a, dodecagon_corner_position(2 * d)), L(b, dodecagon_corner_position(2 * d + 6)));
    uv.unite(L(a, dodecagon_corner_position(2 * d)), L(b, dodecagon_corner_position(2 * d + 7)));
    uv.unite(L(a, dodecagon_corner_position(2 * d + 1)), L(b, dodecagon_corner_position(2 * d + 6)));
  }
  DodecagonLevel out;
  out.vertex.resize(np);
  out.side.resize(np);
  auto number = [&](UnionFind& uf, std::vector<std::array<std::uint32_t, R>>& dst) {
    std::vector<std::size_t> id(np * R, SIZE_MAX);
    std::size_t next = 0;
    for (std::size_t x = 0; x < np * R; ++x) {
      auto r = uf.find(x);
      if (id[r] == SIZE_MAX) id[r] = next++;
      dst[x / R][x % R] = static_cast<std::uint32_t>(id[r]);
    }
    return next;
  };
  const std::size_t nv = number(uv, out.vertex), ns = number(us, out.side);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> orient(ns, {UINT32_MAX, UINT32_MAX});
  std::vector<IncidenceRecord> recs;
  for (std::size_t u = 0; u < np; ++u)
    for (int t = 0; t < static_cast<int>(R); ++t) {
      const int s = dodecagon_edge_sign(t);
      auto tail = out.vertex[u][t], head = out.vertex[u][(t + 1) % R];
      if (s < 0) std::swap(tail, head);
      auto& o = orient[out.side[u][t]];
      if (o.first == UINT32_MAX) o = {tail, head};
      else if (o != std::pair{tail, head}) throw std::logic_error("dodecagon side orientation clash");
      recs.push_back({{2, u}, {1, out.side[u][t]}, s});
    }
  for (std::size_t e = 0; e < ns; ++e) {
    recs.push_back({{1, e}, {0, orient[e].first}, -1});
    recs.push_back({{1, e}, {0, orient[e].second}, +1});
  }
  out.complex = CWComplex({nv, ns, np}, std::move(recs));
  return out;
}

}  // namespace detail

/// Dodecagon 2-complex: one 12-gon per gasket vertex (odd sides subdivided), glued along a side
/// for every gasket edge.
/// The dual graph is certified equal to the gasket level by the identity correspondence.
inline DodecagonExhaustion build_dodecagon_complex(int levels) {
  DodecagonExhaustion out;
  out.gasket = build_gasket(levels);
  auto coord = detail::gasket_coordinates(out.gasket);
  std::vector<detail::DodecagonLevel> L;
  out.complex.family = "dodecagon2";
  for (int n = 0; n <= levels; ++n) {
    L.push_back(detail::dodecagon_level(out.gasket.level(n), coord[n]));
    out.complex.levels.push_back(L.back().complex);
    std::vector<std::size_t> cert(out.gasket.level(n).count(0));
    std::iota(cert.begin(), cert.end(), std::size_t{0});
    if (!is_graph_isomorphism(dual_graph(L.back().complex), out.gasket.level(n), cert))
      throw std::runtime_error("dodecagon dual graph does not match gasket level " + std::to_string(n));
    out.certificate.push_back(std::move(cert));
  }
  for (int n = 0; n < levels; ++n) {
    std::vector<CellMap> maps;
    for (std::size_t c = 0; c < 3; ++c) {
      // copy c of the first step is a rotation by 120c degrees: 6 ring positions per 120 degrees
      const int shift = n == 0 ? 6 * static_cast<int>(c) : 0;
      const auto& gv = out.gasket.copy_maps[n][c].image[0];
      CellMap m;
      m.image.assign(3, {});
      m.image[0].assign(L[n].complex.count(0), 0);
      m.image[1].assign(L[n].complex.count(1), 0);
      for (std::size_t u = 0; u < gv.size(); ++u) {
        m.image[2].push_back(gv[u]);
        for (int t = 0; t < detail::kDodecagonRing; ++t) {
          m.image[0][L[n].vertex[u][t]] = L[n + 1].vertex[gv[u]][(t + shift) % detail::kDodecagonRing];
          m.image[1][L[n].side[u][t]] = L[n + 1].side[gv[u]][(t + shift) % detail::kDodecagonRing];
        }
      }
      maps.push_back(std::move(m));
    }
    out.complex.copy_maps.push_back(std::move(maps));
  }
  return out;
}

/// Builds an exhaustion by CLI family name.
inline Exhaustion build_family(const std::string& family, int levels) {
  if (family == "gasket") return build_gasket(levels);
  if (family == "vicsek") return build_vicsek(levels);
  if (family == "lindstrom") return build_lindstrom(levels);
  if (family == "carpet2") return build_carpet_complex(levels);
  if (family == "dodecagon2") return build_dodecagon_complex(levels).complex;
  throw std::invalid_argument("unknown family '" + family + "'");
}

inline const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names{"gasket", "vicsek", "lindstrom", "carpet2", "dodecagon2"};
  return names;
}

inline std::optional<SubstitutionRule> substitution_rule(const std::string& family) {
  if (family == "gasket") return gasket_rule();
  if (family == "vicsek") return vicsek_rule();
  if (family == "lindstrom") return lindstrom_rule();
  return std::nullopt;
}

}  // namespace sscw
