#include "dpgraph/block.hpp"

#include <algorithm>

#include "dpgraph/errors.hpp"

namespace dpg {

DistanceBlock::DistanceBlock(std::vector<VertexId> ids)
    : dim_(static_cast<std::uint32_t>(ids.size())),
      ids_(std::move(ids)),
      data_(std::size_t{dim_} * dim_, kInf) {
  for (std::uint32_t i = 0; i < dim_; ++i) at(i, i) = 0;
  build_lookup();
}

DistanceBlock::DistanceBlock(std::vector<VertexId> ids, std::vector<Weight> data)
    : dim_(static_cast<std::uint32_t>(ids.size())), ids_(std::move(ids)), data_(std::move(data)) {
  if (data_.size() != std::size_t{dim_} * dim_)
    throw ArgumentError("block data does not match its id count");
  build_lookup();
}

DistanceBlock DistanceBlock::from_signed(std::vector<VertexId> ids,
                                         std::span<const std::int64_t> values) {
  std::vector<Weight> data(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) throw DomainError("negative entry in distance block");
    data[i] = values[i] >= kInf ? kInf : static_cast<Weight>(values[i]);
  }
  return DistanceBlock(std::move(ids), std::move(data));
}

DistanceBlock DistanceBlock::induced(const WeightedGraph& g, std::vector<VertexId> ids) {
  DistanceBlock b(std::move(ids));
  for (const Edge& e : g.edges()) {
    if (e.src == e.dst || !b.contains(e.src) || !b.contains(e.dst)) continue;
    Weight& slot = b.at(b.index_of(e.src), b.index_of(e.dst));
    slot = std::min(slot, e.w);
  }
  return b;
}

void DistanceBlock::build_lookup() {
  lookup_.resize(dim_);
  for (std::uint32_t i = 0; i < dim_; ++i) lookup_[i] = {ids_[i], i};
  std::sort(lookup_.begin(), lookup_.end());
  for (std::size_t i = 1; i < lookup_.size(); ++i)
    if (lookup_[i].first == lookup_[i - 1].first)
      throw ArgumentError("duplicate vertex id " + std::to_string(lookup_[i].first) + " in block");
}

std::uint32_t DistanceBlock::index_of(VertexId global) const {
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), std::pair<VertexId, std::uint32_t>{global, 0});
  if (it == lookup_.end() || it->first != global)
    throw IndexError("vertex " + std::to_string(global) + " is not in the block");
  return it->second;
}

bool DistanceBlock::contains(VertexId global) const noexcept {
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), std::pair<VertexId, std::uint32_t>{global, 0});
  return it != lookup_.end() && it->first == global;
}

bool DistanceBlock::well_formed() const noexcept {
  for (std::uint32_t i = 0; i < dim_; ++i)
    if (at(i, i) != 0) return false;
  return std::all_of(data_.begin(), data_.end(), [](Weight w) { return w <= kInf; });
}

bool DistanceBlock::is_closed() const noexcept {
  for (std::uint32_t k = 0; k < dim_; ++k)
    for (std::uint32_t i = 0; i < dim_; ++i)
      for (std::uint32_t j = 0; j < dim_; ++j)
        if (at(i, j) > sat_add(at(i, k), at(k, j))) return false;
  return true;
}

namespace {

// Relaxes row `ri` through pivot row `rk` with the pivot distance `dik`.
// Entries are <= kInf, so dik + rk[j] cannot wrap; a sum at or above kInf is
// never strictly below an entry and is therefore never written.
inline std::uint64_t relax_row(Weight* ri, const Weight* rk, Weight dik, std::uint32_t j0,
                               std::uint32_t j1) {
  std::uint64_t imp = 0;
  for (std::uint32_t j = j0; j < j1; ++j) {
    const Weight c = dik + rk[j];
    imp += c < ri[j];
    ri[j] = c < ri[j] ? c : ri[j];
  }
  return imp;
}

// Pivots k in [k0,k1) applied to rows [i0,i1) x cols [j0,j1).
std::uint64_t relax_tile(DistanceBlock& b, std::uint32_t i0, std::uint32_t i1, std::uint32_t j0,
                         std::uint32_t j1, std::uint32_t k0, std::uint32_t k1) {
  std::uint64_t imp = 0;
  for (std::uint32_t k = k0; k < k1; ++k) {
    const Weight* rk = b.row(k);
    for (std::uint32_t i = i0; i < i1; ++i) {
      const Weight dik = b.at(i, k);
      if (dik >= kInf) continue;
      imp += relax_row(b.row(i), rk, dik, j0, j1);
    }
  }
  return imp;
}

}  // namespace

PanelTrace fw_panel_step(DistanceBlock& b, std::uint32_t k) {
  if (k >= b.dim()) throw IndexError("pivot out of range");
  PanelTrace t;
  t.pivot = k;
  const Weight* rk = b.row(k);
  const std::uint32_t n = b.dim();
  for (std::uint32_t i = 0; i < n; ++i) {
    if (i == k) continue;
    const Weight dik = b.at(i, k);
    if (dik >= kInf) continue;
    ++t.rows_touched;
    t.improvements += relax_row(b.row(i), rk, dik, 0, n);
  }
  return t;
}

ClosureStats floyd_warshall_serial(DistanceBlock& b) {
  ClosureStats s{b.dim(), b.dim(), 0};
  for (std::uint32_t k = 0; k < b.dim(); ++k) s.improvements += fw_panel_step(b, k).improvements;
  return s;
}

ClosureStats floyd_warshall(DistanceBlock& b) {
  const std::int64_t n = b.dim();
  std::uint64_t imp = 0;
#pragma omp parallel if (n >= 256) reduction(+ : imp)
  for (std::int64_t k = 0; k < n; ++k) {
    const Weight* rk = b.row(static_cast<std::uint32_t>(k));
    // Row k and column k are fixed points of pivot k, so rows are independent.
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const Weight dik = b.at(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k));
      if (i == k || dik >= kInf) continue;
      imp += relax_row(b.row(static_cast<std::uint32_t>(i)), rk, dik, 0, static_cast<std::uint32_t>(n));
    }
  }
  return {b.dim(), b.dim(), imp};
}

ClosureStats blocked_floyd_warshall(DistanceBlock& b, std::uint32_t tile) {
  if (tile == 0) throw ArgumentError("tile must be positive");
  const std::uint32_t n = b.dim();
  if (n <= tile) return floyd_warshall(b);
  const std::uint32_t nb = (n + tile - 1) / tile;
  auto lo = [&](std::uint32_t t) { return t * tile; };
  auto hi = [&](std::uint32_t t) { return std::min(n, (t + 1) * tile); };
  std::uint64_t imp = 0;
  for (std::uint32_t kb = 0; kb < nb; ++kb) {
    const std::uint32_t k0 = lo(kb), k1 = hi(kb);
    imp += relax_tile(b, k0, k1, k0, k1, k0, k1);
    std::uint64_t imp2 = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : imp2)
    for (std::int64_t t = 0; t < std::int64_t{nb}; ++t) {
      const auto tb = static_cast<std::uint32_t>(t);
      if (tb == kb) continue;
      imp2 += relax_tile(b, k0, k1, lo(tb), hi(tb), k0, k1);  // pivot row strip
      imp2 += relax_tile(b, lo(tb), hi(tb), k0, k1, k0, k1);  // pivot column strip
    }
    // Remaining tiles: each row strip sweeps every column outside the pivot
    // strip in one pass, which keeps the inner loop long.
    std::uint64_t imp3 = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : imp3)
    for (std::int64_t ib = 0; ib < std::int64_t{nb}; ++ib) {
      const auto ti = static_cast<std::uint32_t>(ib);
      if (ti == kb) continue;
      imp3 += relax_tile(b, lo(ti), hi(ti), 0, k0, k0, k1);
      imp3 += relax_tile(b, lo(ti), hi(ti), k1, n, k0, k1);
    }
    imp += imp2 + imp3;
  }
  return {n, n, imp};
}

DistanceBlock floyd_warshall_dense(DistanceBlock b) {
  for (std::uint32_t i = 0; i < b.dim(); ++i)
    if (b.at(i, i) != 0) throw ArgumentError("block diagonal must be zero");
  floyd_warshall(b);
  return b;
}

DistanceBlock restrict_to(const DistanceBlock& d, std::span<const VertexId> boundary) {
  std::vector<std::uint32_t> idx(boundary.size());
  for (std::size_t i = 0; i < boundary.size(); ++i) idx[i] = d.index_of(boundary[i]);
  const std::size_t m = boundary.size();
  std::vector<Weight> data(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) data[i * m + j] = d.at(idx[i], idx[j]);
  return DistanceBlock(std::vector<VertexId>(boundary.begin(), boundary.end()), std::move(data));
}

std::uint64_t inject_into(DistanceBlock& d, const DistanceBlock& db,
                          std::span<const VertexId> boundary) {
  std::vector<std::uint32_t> di(boundary.size()), bi(boundary.size());
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    di[i] = d.index_of(boundary[i]);
    bi[i] = db.index_of(boundary[i]);
  }
  std::uint64_t writes = 0;
  for (std::size_t i = 0; i < boundary.size(); ++i)
    for (std::size_t j = 0; j < boundary.size(); ++j) {
      const Weight v = db.at(bi[i], bi[j]);
      Weight& slot = d.at(di[i], di[j]);
      if (v < slot) {
        slot = v;
        ++writes;
      }
    }
  return writes;
}

DistanceBlock inject(const DistanceBlock& db, std::span<const VertexId> boundary, DistanceBlock d) {
  if (db.dim() != boundary.size())
    throw IndexError("boundary matrix of dim " + std::to_string(db.dim()) + " for " +
                     std::to_string(boundary.size()) + " boundary vertices");
  inject_into(d, db, boundary);
  return d;
}

void min_plus_product(const Weight* a, const Weight* b, Weight* c, std::size_t r, std::size_t m,
                      std::size_t cols) {
#pragma omp parallel for schedule(static) if (r * m * cols >= (1u << 20))
  for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(r); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    Weight* ci = c + i * cols;
    std::fill(ci, ci + cols, kInf);
    for (std::size_t k = 0; k < m; ++k) {
      const Weight aik = a[i * m + k];
      if (aik >= kInf) continue;
      const Weight* bk = b + k * cols;
      // ci starts at kInf, so min() keeps every entry <= kInf.
      for (std::size_t j = 0; j < cols; ++j) {
        const Weight s = aik + bk[j];
        ci[j] = s < ci[j] ? s : ci[j];
      }
    }
  }
}

CrossBlock min_plus_merge(const DistanceBlock& d1, const DistanceBlock& db, const DistanceBlock& d2,
                          std::span<const VertexId> b1, std::span<const VertexId> b2) {
  CrossBlock out{d1.ids(), d2.ids(), {}};
  const std::size_t r = d1.dim(), c = d2.dim(), m1 = b1.size(), m2 = b2.size();
  out.data.assign(r * c, kInf);
  if (m1 == 0 || m2 == 0) return out;

  std::vector<Weight> left(r * m1), mid(m1 * m2), right(m2 * c), tmp(r * m2);
  std::vector<std::uint32_t> i1(m1), i2(m2), g1(m1), g2(m2);
  for (std::size_t i = 0; i < m1; ++i) {
    i1[i] = d1.index_of(b1[i]);
    g1[i] = db.index_of(b1[i]);
  }
  for (std::size_t j = 0; j < m2; ++j) {
    i2[j] = d2.index_of(b2[j]);
    g2[j] = db.index_of(b2[j]);
  }
  for (std::size_t m = 0; m < r; ++m)
    for (std::size_t i = 0; i < m1; ++i) left[m * m1 + i] = d1.at(static_cast<std::uint32_t>(m), i1[i]);
  for (std::size_t i = 0; i < m1; ++i)
    for (std::size_t j = 0; j < m2; ++j) mid[i * m2 + j] = db.at(g1[i], g2[j]);
  for (std::size_t j = 0; j < m2; ++j)
    for (std::size_t n = 0; n < c; ++n) right[j * c + n] = d2.at(i2[j], static_cast<std::uint32_t>(n));

  min_plus_product(left.data(), mid.data(), tmp.data(), r, m1, m2);
  min_plus_product(tmp.data(), right.data(), out.data.data(), r, m2, c);
  return out;
}

}  // namespace dpg
