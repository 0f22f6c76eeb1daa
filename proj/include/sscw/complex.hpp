#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sscw {

/// A cell reference: dimension plus dense per-dimension index.
struct CellId {
  int dim = 0;
  std::size_t index = 0;
  auto operator<=>(const CellId&) const = default;
};

/// Signed attachment of a j-cell to a (j-1)-cell.
struct IncidenceRecord {
  CellId cell;
  CellId face;
  int number = 0;
  auto operator<=>(const IncidenceRecord&) const = default;
};

/// Entry of a face or coface list: the neighbouring cell index and the incidence number.
struct Incidence {
  std::uint32_t cell;
  std::int8_t sign;
};

/// Immutable finite CW-complex given by cell counts and incidence numbers.
///
/// Construction sorts the records and builds face/coface adjacency in both
/// directions. Only structural errors throw (index out of range, zero
/// incidence); regularity and orientation problems are left to `validate`.
class CWComplex {
 public:
  CWComplex() = default;

  CWComplex(std::vector<std::size_t> counts, std::vector<IncidenceRecord> records)
      : counts_(std::move(counts)) {
    if (counts_.empty()) throw std::invalid_argument("complex needs at least dimension 0");
    const int p = dimension();
    for (const auto& r : records) {
      if (r.cell.dim < 1 || r.cell.dim > p || r.face.dim != r.cell.dim - 1)
        throw std::invalid_argument("incidence record with inconsistent dimensions");
      if (r.cell.index >= counts_[r.cell.dim] || r.face.index >= counts_[r.face.dim])
        throw std::invalid_argument("incidence record index out of range");
      if (r.number == 0) throw std::invalid_argument("zero incidence numbers must not be stored");
    }
    std::sort(records.begin(), records.end());
    faces_.assign(p + 1, {});
    cofaces_.assign(p + 1, {});
    for (int j = 0; j <= p; ++j) {
      faces_[j].offsets.assign(counts_[j] + 1, 0);
      cofaces_[j].offsets.assign(counts_[j] + 1, 0);
    }
    for (const auto& r : records) {
      ++faces_[r.cell.dim].offsets[r.cell.index + 1];
      ++cofaces_[r.face.dim].offsets[r.face.index + 1];
    }
    for (int j = 0; j <= p; ++j) {
      std::partial_sum(faces_[j].offsets.begin(), faces_[j].offsets.end(), faces_[j].offsets.begin());
      std::partial_sum(cofaces_[j].offsets.begin(), cofaces_[j].offsets.end(),
                       cofaces_[j].offsets.begin());
      faces_[j].entries.resize(faces_[j].offsets.back());
      cofaces_[j].entries.resize(cofaces_[j].offsets.back());
    }
    std::vector<std::vector<std::size_t>> fill(p + 1);
    for (int j = 0; j <= p; ++j) fill[j].assign(counts_[j], 0);
    std::vector<std::vector<std::size_t>> cofill = fill;
    for (const auto& r : records) {
      auto& f = faces_[r.cell.dim];
      f.entries[f.offsets[r.cell.index] + fill[r.cell.dim][r.cell.index]++] = {
          static_cast<std::uint32_t>(r.face.index), static_cast<std::int8_t>(r.number)};
      auto& c = cofaces_[r.face.dim];
      c.entries[c.offsets[r.face.index] + cofill[r.face.dim][r.face.index]++] = {
          static_cast<std::uint32_t>(r.cell.index), static_cast<std::int8_t>(r.number)};
    }
  }

  int dimension() const { return static_cast<int>(counts_.size()) - 1; }

  std::size_t count(int j) const {
    return (j < 0 || j > dimension()) ? 0 : counts_[static_cast<std::size_t>(j)];
  }

  const std::vector<std::size_t>& counts() const { return counts_; }

  std::size_t total_cells() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

  /// (j-1)-faces of the j-cell i, sorted by face index.
  std::span<const Incidence> faces(int j, std::size_t i) const { return row(faces_, j, i); }

  /// (j+1)-cells having the j-cell i as a face, sorted by coface index.
  std::span<const Incidence> cofaces(int j, std::size_t i) const { return row(cofaces_, j, i); }

  /// Incidence number [cell : face], 0 when absent.
  int incidence(int j, std::size_t cell, std::size_t face) const {
    for (const auto& f : faces(j, cell))
      if (f.cell == face) return f.sign;
    return 0;
  }

  /// All records in lexicographic order (dimension, cell, face).
  std::vector<IncidenceRecord> records() const {
    std::vector<IncidenceRecord> out;
    for (int j = 1; j <= dimension(); ++j)
      for (std::size_t i = 0; i < count(j); ++i)
        for (const auto& f : faces(j, i)) out.push_back({{j, i}, {j - 1, f.cell}, f.sign});
    return out;
  }

  std::size_t record_count(int j) const { return j >= 1 && j <= dimension() ? faces_[j].entries.size() : 0; }

  bool operator==(const CWComplex& o) const { return counts_ == o.counts_ && records() == o.records(); }

 private:
  struct Csr {
    std::vector<std::size_t> offsets;
    std::vector<Incidence> entries;
  };

  static std::span<const Incidence> row(const std::vector<Csr>& t, int j, std::size_t i) {
    if (j < 0 || j >= static_cast<int>(t.size())) return {};
    const auto& c = t[static_cast<std::size_t>(j)];
    if (i + 1 >= c.offsets.size()) return {};
    return {c.entries.data() + c.offsets[i], c.offsets[i + 1] - c.offsets[i]};
  }

  std::vector<std::size_t> counts_;
  std::vector<Csr> faces_;
  std::vector<Csr> cofaces_;
};

/// One violated invariant found by `validate`.
struct Violation {
  std::string kind;  // "non_regular", "duplicate", "boundary_squared", "orientation", "unreferenced"
  std::string message;
  std::vector<CellId> cells;
};

using ValidationReport = std::vector<Violation>;

/// Checks regularity, ∂∘∂ = 0, the 0-cell orientation convention and unreferenced cells.
inline ValidationReport validate(const CWComplex& k) {
  ValidationReport out;
  const int p = k.dimension();
  auto name = [](CellId c) { return "(" + std::to_string(c.dim) + "," + std::to_string(c.index) + ")"; };
  for (int j = 1; j <= p; ++j) {
    for (std::size_t i = 0; i < k.count(j); ++i) {
      auto fs = k.faces(j, i);
      for (std::size_t a = 0; a < fs.size(); ++a) {
        if (fs[a].sign != 1 && fs[a].sign != -1)
          out.push_back({"non_regular", "incidence " + std::to_string(fs[a].sign) + " on cell " + name({j, i}),
                         {{j, i}, {j - 1, fs[a].cell}}});
        if (a > 0 && fs[a].cell == fs[a - 1].cell)
          out.push_back({"duplicate", "repeated record for cell " + name({j, i}), {{j, i}, {j - 1, fs[a].cell}}});
      }
    }
  }
  for (std::size_t e = 0; e < k.count(1); ++e) {
    auto fs = k.faces(1, e);
    int plus = 0, minus = 0;
    for (const auto& f : fs) (f.sign > 0 ? plus : minus) += 1;
    if (fs.size() != 2 || plus != 1 || minus != 1)
      out.push_back({"orientation", "edge " + name({1, e}) + " needs one +1 and one -1 endpoint", {{1, e}}});
  }
  for (int j = 2; j <= p; ++j) {
    std::vector<long> acc(k.count(j - 2), 0);
    std::vector<std::size_t> touched;
    for (std::size_t t = 0; t < k.count(j); ++t) {
      touched.clear();
      for (const auto& s : k.faces(j, t))
        for (const auto& r : k.faces(j - 1, s.cell)) {
          if (acc[r.cell] == 0) touched.push_back(r.cell);
          acc[r.cell] += static_cast<long>(s.sign) * r.sign;
        }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      for (auto r : touched) {
        if (acc[r] != 0)
          out.push_back({"boundary_squared", "boundary of boundary of " + name({j, t}) + " is nonzero at " +
                                                 name({j - 2, r}),
                         {{j, t}, {j - 2, r}}});
        acc[r] = 0;
      }
    }
  }
  if (p >= 1)
    for (int j = 0; j < p; ++j)
      for (std::size_t i = 0; i < k.count(j); ++i)
        if (k.cofaces(j, i).empty())
          out.push_back({"unreferenced", "cell " + name({j, i}) + " is not a face of any cell", {{j, i}}});
  return out;
}

/// Writes the structured-text format: `dim p`, one `cells j n` line per
/// dimension, then `j cell face sign` records in lexicographic order.
inline void write_complex(std::ostream& os, const CWComplex& k) {
  os << "dim " << k.dimension() << '\n';
  for (int j = 0; j <= k.dimension(); ++j) os << "cells " << j << ' ' << k.count(j) << '\n';
  for (const auto& r : k.records())
    os << r.cell.dim << ' ' << r.cell.index << ' ' << r.face.index << ' ' << r.number << '\n';
}

inline CWComplex read_complex(std::istream& is) {
  std::string word;
  int p = -1;
  if (!(is >> word >> p) || word != "dim" || p < 0) throw std::runtime_error("complex file: expected 'dim p'");
  std::vector<std::size_t> counts(static_cast<std::size_t>(p) + 1);
  for (int j = 0; j <= p; ++j) {
    int jj = -1;
    std::size_t n = 0;
    if (!(is >> word >> jj >> n) || word != "cells" || jj != j)
      throw std::runtime_error("complex file: expected 'cells " + std::to_string(j) + " n'");
    counts[static_cast<std::size_t>(j)] = n;
  }
  std::vector<IncidenceRecord> recs;
  int j = 0;
  std::size_t c = 0, f = 0;
  int s = 0;
  while (is >> j >> c >> f >> s) recs.push_back({{j, c}, {j - 1, f}, s});
  if (!is.eof()) throw std::runtime_error("complex file: malformed incidence record");
  return CWComplex(std::move(counts), std::move(recs));
}

inline std::string to_text(const CWComplex& k) {
  std::ostringstream os;
  write_complex(os, k);
  return os.str();
}

}  // namespace sscw
