#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "complex.hpp"

namespace sscw {

/// Step relation used by the combinatorial distance.
enum class Flavor { d, d_plus, d_minus };

/// Distance value; `std::nullopt` is the infinity sentinel (different components).
using Distance = std::optional<std::size_t>;

/// Calls `fn(k)` for every j-cell k != i one step away from i.
/// d_minus: shared (j-1)-face. d_plus: common (j+1)-coface. d: either.
/// A neighbour reachable both ways may be reported twice.
template <class Fn>
void for_each_neighbor(const CWComplex& k, int j, std::size_t i, Flavor fl, Fn&& fn) {
  if (fl != Flavor::d_plus)
    for (const auto& f : k.faces(j, i))
      for (const auto& c : k.cofaces(j - 1, f.cell))
        if (c.cell != i) fn(static_cast<std::size_t>(c.cell));
  if (fl != Flavor::d_minus)
    for (const auto& c : k.cofaces(j, i))
      for (const auto& f : k.faces(j + 1, c.cell))
        if (f.cell != i) fn(static_cast<std::size_t>(f.cell));
}

/// BFS distances from `center` to every j-cell (nullopt if unreachable), cut off at `limit` if given.
inline std::vector<Distance> distances_from(const CWComplex& k, CellId center, Flavor fl = Flavor::d,
                                            std::optional<std::size_t> limit = std::nullopt) {
  std::vector<Distance> dist(k.count(center.dim));
  if (center.index >= dist.size()) throw std::out_of_range("cell index out of range");
  std::deque<std::size_t> queue{center.index};
  dist[center.index] = 0;
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    if (limit && *dist[v] >= *limit) continue;
    for_each_neighbor(k, center.dim, v, fl, [&](std::size_t w) {
      if (!dist[w]) {
        dist[w] = *dist[v] + 1;
        queue.push_back(w);
      }
    });
  }
  return dist;
}

inline Distance distance(const CWComplex& k, CellId a, CellId b, Flavor fl = Flavor::d) {
  if (a.dim != b.dim) throw std::invalid_argument("distance: dimension mismatch");
  if (b.index >= k.count(b.dim)) throw std::out_of_range("cell index out of range");
  return distances_from(k, a, fl)[b.index];
}

/// Sorted indices of the j-cells at distance <= r from `center`.
inline std::vector<std::size_t> ball(const CWComplex& k, CellId center, std::size_t r, Flavor fl = Flavor::d) {
  auto dist = distances_from(k, center, fl, r);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (dist[i] && *dist[i] <= r) out.push_back(i);
  return out;
}

/// Membership bitsets per dimension over a parent complex.
class SubcomplexMask {
 public:
  SubcomplexMask() = default;
  explicit SubcomplexMask(const CWComplex& parent, bool all = false) : parent_(&parent) {
    member_.resize(static_cast<std::size_t>(parent.dimension()) + 1);
    for (int j = 0; j <= parent.dimension(); ++j) member_[j].assign(parent.count(j), all ? 1 : 0);
  }

  const CWComplex& parent() const { return *parent_; }
  bool contains(int j, std::size_t i) const { return member_[j][i] != 0; }
  bool contains(CellId c) const { return contains(c.dim, c.index); }
  void insert(int j, std::size_t i) { member_[j][i] = 1; }
  void erase(int j, std::size_t i) { member_[j][i] = 0; }

  std::size_t count(int j) const {
    return static_cast<std::size_t>(std::count(member_[j].begin(), member_[j].end(), 1));
  }

  std::vector<std::size_t> cells(int j) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < member_[j].size(); ++i)
      if (member_[j][i]) out.push_back(i);
    return out;
  }

  /// First member with a face outside the mask, if any.
  std::optional<CellId> closure_violation() const {
    for (int j = parent_->dimension(); j >= 1; --j)
      for (std::size_t i = 0; i < member_[j].size(); ++i)
        if (member_[j][i])
          for (const auto& f : parent_->faces(j, i))
            if (!member_[j - 1][f.cell]) return CellId{j, i};
    return std::nullopt;
  }
  bool is_closed() const { return !closure_violation(); }

  /// First non-member j-cell (j >= 1) all of whose faces are members.
  /// Fullness is not applied to 0-cells, whose boundary is empty.
  std::optional<CellId> fullness_violation() const {
    for (int j = 1; j <= parent_->dimension(); ++j)
      for (std::size_t i = 0; i < member_[j].size(); ++i) {
        if (member_[j][i]) continue;
        auto fs = parent_->faces(j, i);
        if (!fs.empty() && std::all_of(fs.begin(), fs.end(), [&](const Incidence& f) { return member_[j - 1][f.cell] != 0; }))
          return CellId{j, i};
      }
    return std::nullopt;
  }
  bool is_full() const { return !fullness_violation(); }

  /// Smallest closed mask containing this one.
  SubcomplexMask closure() const {
    SubcomplexMask out = *this;
    for (int j = parent_->dimension(); j >= 1; --j)
      for (std::size_t i = 0; i < out.member_[j].size(); ++i)
        if (out.member_[j][i])
          for (const auto& f : parent_->faces(j, i)) out.member_[j - 1][f.cell] = 1;
    return out;
  }

  bool operator==(const SubcomplexMask& o) const { return member_ == o.member_; }

 private:
  const CWComplex* parent_ = nullptr;
  std::vector<std::vector<std::uint8_t>> member_;
};

/// Sorted j-cells of the mask at distance 1 from some j-cell outside it.
inline std::vector<std::size_t> frontier(const CWComplex& k, const SubcomplexMask& mask, int j) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k.count(j); ++i) {
    if (!mask.contains(j, i)) continue;
    bool hit = false;
    for_each_neighbor(k, j, i, Flavor::d, [&](std::size_t w) { hit = hit || !mask.contains(j, w); });
    if (hit) out.push_back(i);
  }
  return out;
}

/// The boundary subcomplex: (p-1)-cells lying in at most one p-cell, plus their closure.
inline SubcomplexMask boundary_subcomplex(const CWComplex& k) {
  const int p = k.dimension();
  if (p < 1) throw std::invalid_argument("boundary_subcomplex needs dimension >= 1");
  SubcomplexMask m(k);
  for (std::size_t i = 0; i < k.count(p - 1); ++i)
    if (k.cofaces(p - 1, i).size() <= 1) m.insert(p - 1, i);
  return m.closure();
}

/// V_j^+ (max cofaces), V_j^- (max faces) and mu_j = max |B_1(sigma)|.
struct DegreeBounds {
  std::vector<std::size_t> v_plus;
  std::vector<std::size_t> v_minus;
  std::vector<std::size_t> mu;

  /// Upper bound on mu_j from the face/coface degrees: 1 + V+_j (V-_{j+1} - 1) + V-_j (V+_{j-1} - 1).
  std::size_t mu_bound(int j) const {
    std::size_t b = 1;
    if (j + 1 < static_cast<int>(v_minus.size()) && v_minus[j + 1] > 0) b += v_plus[j] * (v_minus[j + 1] - 1);
    if (j >= 1 && v_plus[j - 1] > 0) b += v_minus[j] * (v_plus[j - 1] - 1);
    return b;
  }
};

inline DegreeBounds degree_bounds(const CWComplex& k) {
  const int p = k.dimension();
  DegreeBounds b;
  b.v_plus.assign(p + 1, 0);
  b.v_minus.assign(p + 1, 0);
  b.mu.assign(p + 1, 0);
  std::vector<std::size_t> stamp;
  for (int j = 0; j <= p; ++j) {
    stamp.assign(k.count(j), SIZE_MAX);
    for (std::size_t i = 0; i < k.count(j); ++i) {
      b.v_plus[j] = std::max(b.v_plus[j], k.cofaces(j, i).size());
      b.v_minus[j] = std::max(b.v_minus[j], k.faces(j, i).size());
      std::size_t n = 1;
      stamp[i] = i;
      for_each_neighbor(k, j, i, Flavor::d, [&](std::size_t w) {
        if (stamp[w] != i) {
          stamp[w] = i;
          ++n;
        }
      });
      b.mu[j] = std::max(b.mu[j], n);
    }
  }
  return b;
}

/// True if E_j is connected under the given step relation (vacuously true when empty).
inline bool is_connected(const CWComplex& k, int j, Flavor fl) {
  if (k.count(j) == 0) return true;
  auto d = distances_from(k, {j, 0}, fl);
  return std::all_of(d.begin(), d.end(), [](const Distance& x) { return x.has_value(); });
}

}  // namespace sscw
