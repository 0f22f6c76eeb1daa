#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "complex.hpp"
#include "metric.hpp"

namespace sscw {

/// Per-dimension cell map: image[j][i] is the index of the image of the j-cell i.
struct CellMap {
  std::vector<std::vector<std::uint32_t>> image;

  static CellMap identity(const CWComplex& k) {
    CellMap m;
    m.image.resize(static_cast<std::size_t>(k.dimension()) + 1);
    for (int j = 0; j <= k.dimension(); ++j) {
      m.image[j].resize(k.count(j));
      std::iota(m.image[j].begin(), m.image[j].end(), 0u);
    }
    return m;
  }
  bool operator==(const CellMap&) const = default;
};

/// `second ∘ first`.
inline CellMap compose(const CellMap& second, const CellMap& first) {
  CellMap out;
  out.image.resize(first.image.size());
  for (std::size_t j = 0; j < first.image.size(); ++j) {
    out.image[j].reserve(first.image[j].size());
    for (auto i : first.image[j]) out.image[j].push_back(second.image[j][i]);
  }
  return out;
}

/// Nested finite levels K_0 ⊂ ... ⊂ K_N together with the copy maps G(n, n+1).
/// copy_maps[n][c] maps K_n into K_{n+1}; copy 0 is the embedding K_n ⊂ K_{n+1}.
struct Exhaustion {
  std::string family;
  std::vector<CWComplex> levels;
  std::vector<std::vector<CellMap>> copy_maps;

  int top() const { return static_cast<int>(levels.size()) - 1; }
  int dimension() const { return levels.empty() ? 0 : levels.front().dimension(); }
  const CWComplex& level(int n) const { return levels.at(static_cast<std::size_t>(n)); }

  /// Embedding of K_n into K_m (composition of copy-0 maps).
  CellMap embedding(int n, int m) const {
    check_range(n, m);
    CellMap map = CellMap::identity(level(n));
    for (int l = n; l < m; ++l) map = compose(copy_maps[l][0], map);
    return map;
  }

  /// Mask of the image of K_n inside K_m.
  SubcomplexMask window_mask(int n, int m) const {
    SubcomplexMask mask(level(m));
    auto e = embedding(n, m);
    for (std::size_t j = 0; j < e.image.size(); ++j)
      for (auto i : e.image[j]) mask.insert(static_cast<int>(j), i);
    return mask;
  }

  /// Calls fn(path, map) for every composed copy map γ ∈ G(n, m), where path lists copy indices.
  void for_each_copy(int n, int m, const std::function<void(const std::vector<int>&, const CellMap&)>& fn) const {
    check_range(n, m);
    std::vector<int> path;
    std::function<void(int, const CellMap&)> rec = [&](int l, const CellMap& cur) {
      if (l == m) {
        fn(path, cur);
        return;
      }
      for (std::size_t c = 0; c < copy_maps[l].size(); ++c) {
        path.push_back(static_cast<int>(c));
        rec(l + 1, compose(copy_maps[l][c], cur));
        path.pop_back();
      }
    };
    rec(n, CellMap::identity(level(n)));
  }

  /// The composed copy map K_n → K_m along the given copy indices.
  CellMap copy_path(int n, const std::vector<int>& path) const {
    CellMap map = CellMap::identity(level(n));
    for (std::size_t s = 0; s < path.size(); ++s)
      map = compose(copy_maps.at(n + s).at(static_cast<std::size_t>(path[s])), map);
    return map;
  }

 private:
  void check_range(int n, int m) const {
    if (n < 0 || n > m || m > top()) throw std::out_of_range("exhaustion level range");
  }
};

/// Incidence-preserving bijection between two full subcomplexes of one complex.
struct LocalIsomorphism {
  SubcomplexMask source;
  SubcomplexMask target;
  std::vector<std::vector<std::int64_t>> forward;  // forward[j][i] = image of source cell i, or -1

  std::optional<std::size_t> apply(int j, std::size_t i) const {
    auto v = forward[j][i];
    return v < 0 ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(v));
  }
};

/// Local isomorphism of K_m taking the window ι(K_n) onto γ(K_n), γ given by a copy path.
inline LocalIsomorphism local_isomorphism(const Exhaustion& ex, int n, const std::vector<int>& path) {
  const int m = n + static_cast<int>(path.size());
  const auto& km = ex.level(m);
  auto iota = ex.embedding(n, m);
  auto gamma = ex.copy_path(n, path);
  LocalIsomorphism iso{SubcomplexMask(km), SubcomplexMask(km), {}};
  iso.forward.resize(static_cast<std::size_t>(km.dimension()) + 1);
  for (int j = 0; j <= km.dimension(); ++j) {
    iso.forward[j].assign(km.count(j), -1);
    for (std::size_t i = 0; i < iota.image[j].size(); ++i) {
      iso.source.insert(j, iota.image[j][i]);
      iso.target.insert(j, gamma.image[j][i]);
      iso.forward[j][iota.image[j][i]] = gamma.image[j][i];
    }
  }
  return iso;
}

/// Frontier sizes and the amenability ratio eps_n for E_j(K_n).
struct FrontierStats {
  int level = 0;
  int j = 0;
  std::size_t cells = 0;         // |E_j K_n|
  std::size_t frontier = 0;      // |F(E_j K_n)| inside the top level
  std::size_t frontier_g = 0;    // |F_G(E_j K_n)|
  double epsilon = 0.0;          // |F_G| / |E_j K_n|
  bool g_invariant = false;      // true when copy maps were available (n < top)
};

/// Frontier of the image of a cell map of K_n inside K_N (dimension j), returned as K_n indices.
inline std::vector<std::size_t> pulled_back_frontier(const CWComplex& kN, const CellMap& g, int j,
                                                     std::vector<std::size_t>& stamp, std::size_t tag) {
  const auto& img = g.image[j];
  for (auto c : img) stamp[c] = tag;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < img.size(); ++i) {
    bool hit = false;
    for_each_neighbor(kN, j, img[i], Flavor::d, [&](std::size_t w) { hit = hit || stamp[w] != tag; });
    if (hit) out.push_back(i);
  }
  return out;
}

/// F_G(E_j K_n) approximated inside the top stored level: union over γ ∈ G(n, N) of γ^{-1} F(γ K_n).
/// Every γ ∈ G(n, m) with m < N reappears in G(n, N) after composing with the embedding, so
/// this covers all stored copies. Frontiers are taken in K_N rather than in the infinite complex.
inline std::vector<std::size_t> g_invariant_frontier(const Exhaustion& ex, int n, int j) {
  const int N = ex.top();
  const auto& kN = ex.level(N);
  std::vector<std::uint8_t> in_fg(ex.level(n).count(j), 0);
  std::vector<std::size_t> stamp(kN.count(j), SIZE_MAX);
  std::size_t tag = 0;
  ex.for_each_copy(n, N, [&](const std::vector<int>&, const CellMap& g) {
    for (auto i : pulled_back_frontier(kN, g, j, stamp, tag++)) in_fg[i] = 1;
  });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < in_fg.size(); ++i)
    if (in_fg[i]) out.push_back(i);
  return out;
}

inline FrontierStats frontier_stats(const Exhaustion& ex, int n, int j) {
  FrontierStats s;
  s.level = n;
  s.j = j;
  s.cells = ex.level(n).count(j);
  const int N = ex.top();
  std::vector<std::size_t> stamp(ex.level(N).count(j), SIZE_MAX);
  s.frontier = pulled_back_frontier(ex.level(N), ex.embedding(n, N), j, stamp, 0).size();
  if (n < N) {
    s.frontier_g = g_invariant_frontier(ex, n, j).size();
    s.g_invariant = true;
  } else {
    s.frontier_g = s.frontier;
  }
  s.epsilon = s.cells == 0 ? 0.0 : static_cast<double>(s.frontier_g) / static_cast<double>(s.cells);
  return s;
}

/// Result of checking the self-similarity axioms between K_n and K_{n+1}.
struct LevelCheck {
  int level = 0;
  bool valid = true;            // K_{n+1} passes validate
  bool covers = true;           // (a)
  bool overlaps_in_frontier = true;  // (b), strict form
  std::size_t relaxed_r = 0;    // smallest r with overlaps inside r-balls of both frontiers
  std::size_t max_overlap = 0;  // largest pairwise overlap (cells, all dimensions)
  bool isomorphic = true;       // (c)
  std::vector<std::string> failures;
};

struct SelfSimilarityReport {
  std::vector<LevelCheck> levels;
  std::vector<FrontierStats> epsilon;  // (d)

  bool passed() const {
    return std::all_of(levels.begin(), levels.end(), [](const LevelCheck& l) {
      return l.valid && l.covers && l.isomorphic && (l.overlaps_in_frontier || l.relaxed_r > 0);
    });
  }
  bool strict() const {
    return std::all_of(levels.begin(), levels.end(), [](const LevelCheck& l) { return l.overlaps_in_frontier; });
  }
  std::size_t relaxed_r() const {
    std::size_t r = 0;
    for (const auto& l : levels) r = std::max(r, l.relaxed_r);
    return r;
  }

  std::string summary() const {
    std::ostringstream os;
    for (const auto& l : levels) {
      os << "level " << l.level << "->" << l.level + 1 << ": valid=" << l.valid << " covers=" << l.covers
         << " overlaps_in_frontier=" << l.overlaps_in_frontier;
      if (!l.overlaps_in_frontier) os << " (relaxed r=" << l.relaxed_r << ")";
      os << " isomorphic=" << l.isomorphic << " max_overlap=" << l.max_overlap << '\n';
      for (const auto& f : l.failures) os << "  failure: " << f << '\n';
    }
    for (const auto& e : epsilon)
      os << "eps level " << e.level << " j=" << e.j << ": " << e.frontier_g << '/' << e.cells << " = " << e.epsilon
         << '\n';
    if (passed())
      os << (strict() ? "all checks passed (strict frontier overlap condition)\n"
                      : "all checks passed (relaxed overlap condition, r=" + std::to_string(relaxed_r()) + ")\n");
    else
      os << "self-similarity check FAILED\n";
    return os.str();
  }
};

namespace detail {

/// Checks that copy c of K_n is an incidence-preserving bijection onto a full subcomplex of K_{n+1}.
inline void check_copy(const CWComplex& kn, const CWComplex& kn1, const CellMap& g, int n, std::size_t c,
                       LevelCheck& out) {
  const int p = kn.dimension();
  auto fail = [&](const std::string& msg) {
    out.isomorphic = false;
    out.failures.push_back("copy " + std::to_string(c) + " of level " + std::to_string(n) + ": " + msg);
  };
  if (g.image.size() != static_cast<std::size_t>(p) + 1) return fail("wrong number of dimensions");
  SubcomplexMask img(kn1);
  for (int j = 0; j <= p; ++j) {
    if (g.image[j].size() != kn.count(j)) return fail("map size differs from cell count in dim " + std::to_string(j));
    for (std::size_t i = 0; i < kn.count(j); ++i) {
      auto t = g.image[j][i];
      if (t >= kn1.count(j)) return fail("image index out of range");
      if (img.contains(j, t)) return fail("not injective in dim " + std::to_string(j));
      img.insert(j, t);
    }
  }
  for (int j = 1; j <= p; ++j)
    for (std::size_t i = 0; i < kn.count(j); ++i) {
      auto fs = kn.faces(j, i);
      auto t = g.image[j][i];
      if (kn1.faces(j, t).size() != fs.size())
        return fail("cell (" + std::to_string(j) + "," + std::to_string(i) + ") gains or loses faces");
      for (const auto& f : fs) {
        int got = kn1.incidence(j, t, g.image[j - 1][f.cell]);
        if (got != f.sign)
          return fail("record (" + std::to_string(j) + " " + std::to_string(i) + " " + std::to_string(f.cell) + " " +
                      std::to_string(f.sign) + ") maps to incidence " + std::to_string(got));
      }
    }
  if (auto v = img.fullness_violation())
    fail("image not full: cell (" + std::to_string(v->dim) + "," + std::to_string(v->index) + ") missing");
}

}  // namespace detail

/// Checks the self-similarity axioms on every stored level pair and tabulates eps_n.
inline SelfSimilarityReport verify_self_similarity(const Exhaustion& ex) {
  SelfSimilarityReport rep;
  const int p = ex.dimension();
  for (int n = 0; n < ex.top(); ++n) {
    const auto& kn = ex.level(n);
    const auto& kn1 = ex.level(n + 1);
    LevelCheck lc;
    lc.level = n;
    lc.valid = validate(kn1).empty() && (n > 0 || validate(kn).empty());
    if (!lc.valid) lc.failures.push_back("level fails validation");
    const auto& copies = ex.copy_maps[n];
    for (std::size_t c = 0; c < copies.size(); ++c) detail::check_copy(kn, kn1, copies[c], n, c, lc);
    if (!lc.isomorphic) {
      rep.levels.push_back(lc);
      continue;
    }
    for (int j = 0; j <= p; ++j) {
      std::vector<std::uint8_t> covered(kn1.count(j), 0);
      for (const auto& g : copies)
        for (auto t : g.image[j]) covered[t] = 1;
      if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
        lc.covers = false;
        lc.failures.push_back("copies do not cover dimension " + std::to_string(j));
      }
    }
    // (b): overlaps against frontiers computed in K_{n+1}; a frontier there is contained in the frontier
    // in any larger complex, so passing here implies the condition in M.
    std::vector<SubcomplexMask> masks;
    for (const auto& g : copies) {
      SubcomplexMask m(kn1);
      for (int j = 0; j <= p; ++j)
        for (auto t : g.image[j]) m.insert(j, t);
      masks.push_back(std::move(m));
    }
    for (int j = 0; j <= p; ++j) {
      std::vector<std::vector<std::uint8_t>> fr(copies.size(), std::vector<std::uint8_t>(kn1.count(j), 0));
      std::vector<std::vector<Distance>> dist_to_fr(copies.size());
      for (std::size_t c = 0; c < copies.size(); ++c)
        for (auto t : frontier(kn1, masks[c], j)) fr[c][t] = 1;
      for (std::size_t a = 0; a < copies.size(); ++a)
        for (std::size_t b = a + 1; b < copies.size(); ++b) {
          std::size_t overlap = 0;
          for (std::size_t t = 0; t < kn1.count(j); ++t) {
            if (!masks[a].contains(j, t) || !masks[b].contains(j, t)) continue;
            ++overlap;
            if (fr[a][t] && fr[b][t]) continue;
            lc.overlaps_in_frontier = false;
            for (auto c : {a, b}) {
              if (dist_to_fr[c].empty()) {
                // multi-source BFS from the frontier of copy c
                dist_to_fr[c].assign(kn1.count(j), std::nullopt);
                std::deque<std::size_t> q;
                for (std::size_t s = 0; s < kn1.count(j); ++s)
                  if (fr[c][s]) {
                    dist_to_fr[c][s] = 0;
                    q.push_back(s);
                  }
                while (!q.empty()) {
                  auto v = q.front();
                  q.pop_front();
                  for_each_neighbor(kn1, j, v, Flavor::d, [&](std::size_t w) {
                    if (!dist_to_fr[c][w]) {
                      dist_to_fr[c][w] = *dist_to_fr[c][v] + 1;
                      q.push_back(w);
                    }
                  });
                }
              }
              auto d = dist_to_fr[c][t];
              lc.relaxed_r = std::max(lc.relaxed_r, d ? *d : SIZE_MAX);
            }
          }
          lc.max_overlap = std::max(lc.max_overlap, overlap);
        }
    }
    rep.levels.push_back(lc);
  }
  for (int n = 0; n < ex.top(); ++n)
    for (int j = 0; j <= p; ++j) rep.epsilon.push_back(frontier_stats(ex, n, j));
  return rep;
}

/// Writes the copy maps K_n → K_{n+1} as index pairs.
inline void write_copy_maps(std::ostream& os, const Exhaustion& ex, int n) {
  const auto& copies = ex.copy_maps.at(static_cast<std::size_t>(n));
  os << "copymaps " << n << ' ' << n + 1 << ' ' << copies.size() << '\n';
  for (std::size_t c = 0; c < copies.size(); ++c)
    for (std::size_t j = 0; j < copies[c].image.size(); ++j) {
      os << "copy " << c << " dim " << j << ' ' << copies[c].image[j].size() << '\n';
      for (std::size_t i = 0; i < copies[c].image[j].size(); ++i) os << i << ' ' << copies[c].image[j][i] << '\n';
    }
}

inline std::vector<CellMap> read_copy_maps(std::istream& is) {
  std::string w;
  int n = 0, n1 = 0;
  std::size_t q = 0;
  if (!(is >> w >> n >> n1 >> q) || w != "copymaps") throw std::runtime_error("copy-map file: bad header");
  std::vector<CellMap> out(q);
  std::string w2;
  std::size_t c = 0, j = 0, len = 0;
  while (is >> w >> c >> w2 >> j >> len) {
    if (w != "copy" || w2 != "dim" || c >= q) throw std::runtime_error("copy-map file: bad section header");
    if (out[c].image.size() <= j) out[c].image.resize(j + 1);
    out[c].image[j].resize(len);
    for (std::size_t i = 0; i < len; ++i) {
      std::size_t a = 0, b = 0;
      if (!(is >> a >> b) || a != i) throw std::runtime_error("copy-map file: bad pair");
      out[c].image[j][i] = static_cast<std::uint32_t>(b);
    }
  }
  return out;
}

}  // namespace sscw
