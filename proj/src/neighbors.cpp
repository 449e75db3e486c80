#include "attrspace/neighbors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "attrspace/vecmath.hpp"

namespace attrspace {

namespace {

// Max-heap over (squared distance, ordinal); top() is the current worst.
using Heap = std::vector<std::pair<double, std::uint32_t>>;

inline void heap_offer(Heap& heap, std::size_t k, double d2, std::uint32_t ord) {
  if (heap.size() < k) {
    heap.emplace_back(d2, ord);
    std::push_heap(heap.begin(), heap.end());
  } else if (std::make_pair(d2, ord) < heap.front()) {
    std::pop_heap(heap.begin(), heap.end());
    heap.back() = {d2, ord};
    std::push_heap(heap.begin(), heap.end());
  }
}

inline NeighborResult heap_finish(Heap& heap) {
  std::sort(heap.begin(), heap.end());
  NeighborResult r;
  r.ordinals.reserve(heap.size());
  r.distances.reserve(heap.size());
  for (const auto& [d2, ord] : heap) {
    r.ordinals.push_back(ord);
    r.distances.push_back(std::sqrt(d2));
  }
  return r;
}

inline void check_query(std::span<const double> q, std::size_t d, std::size_t k) {
  require(k >= 1, "knn: k must be >= 1");
  require(q.size() == d, "knn: query dimension " + std::to_string(q.size()) +
                             " != point dimension " + std::to_string(d));
  require(all_finite(q), "knn: query has non-finite coordinates");
}

// Safety slack on box-distance pruning: the box bound and the point
// distance are summed in different orders, so allow a hair of rounding
// before discarding a subtree. Costs a few extra leaf visits, buys
// exactness.
constexpr double kPruneSlack = 1.0 + 1e-12;

constexpr std::size_t kLeafSize = 16;
constexpr std::size_t kTileQueries = 16;

}  // namespace

NeighborResult knn_brute(PointsRef pts, std::span<const double> query, std::size_t k) {
  require(pts.n > 0, "knn: empty point set");
  check_query(query, pts.d, k);
  const std::size_t kk = std::min(k, pts.n);
  Heap heap;
  heap.reserve(kk + 1);
  const double* q = query.data();
  for (std::size_t i = 0; i < pts.n; ++i)
    heap_offer(heap, kk, sq_dist(q, pts.row(i), pts.d), static_cast<std::uint32_t>(i));
  return heap_finish(heap);
}

// ---- SpatialIndex --------------------------------------------------------

SpatialIndex SpatialIndex::build(PointsRef pts) {
  require(pts.n > 0, "index build: empty point set");
  require(pts.d > 0, "index build: zero dimension");
  SpatialIndex idx;
  idx.n_ = pts.n;
  idx.d_ = pts.d;

  if (pts.d <= kKdMaxDim) {
    std::vector<std::uint32_t> perm(pts.n);
    for (std::size_t i = 0; i < pts.n; ++i) perm[i] = static_cast<std::uint32_t>(i);

    idx.nodes_.reserve(2 * pts.n / kLeafSize + 2);

    // recursive median split over perm[lo, hi)
    auto rec = [&](auto&& self, std::uint32_t lo, std::uint32_t hi) -> std::int32_t {
      const std::int32_t me = static_cast<std::int32_t>(idx.nodes_.size());
      idx.nodes_.push_back({lo, hi, -1, -1});
      idx.boxes_.resize(idx.boxes_.size() + 2 * pts.d);
      double* blo = idx.boxes_.data() + static_cast<std::size_t>(me) * 2 * pts.d;
      double* bhi = blo + pts.d;
      for (std::size_t j = 0; j < pts.d; ++j) {
        blo[j] = std::numeric_limits<double>::infinity();
        bhi[j] = -std::numeric_limits<double>::infinity();
      }
      for (std::uint32_t i = lo; i < hi; ++i) {
        const double* p = pts.row(perm[i]);
        for (std::size_t j = 0; j < pts.d; ++j) {
          blo[j] = std::min(blo[j], p[j]);
          bhi[j] = std::max(bhi[j], p[j]);
        }
      }
      if (hi - lo > kLeafSize) {
        std::size_t dim = 0;
        double widest = -1.0;
        for (std::size_t j = 0; j < pts.d; ++j) {
          const double w = bhi[j] - blo[j];
          if (w > widest) {
            widest = w;
            dim = j;
          }
        }
        const std::uint32_t mid = lo + (hi - lo) / 2;
        std::nth_element(perm.begin() + lo, perm.begin() + mid, perm.begin() + hi,
                         [&](std::uint32_t a, std::uint32_t b) {
                           const double ca = pts.row(a)[dim], cb = pts.row(b)[dim];
                           return ca != cb ? ca < cb : a < b;
                         });
        const std::int32_t l = self(self, lo, mid);
        const std::int32_t r = self(self, mid, hi);
        // boxes_ may have reallocated; nodes_ index stays valid
        idx.nodes_[static_cast<std::size_t>(me)].left = l;
        idx.nodes_[static_cast<std::size_t>(me)].right = r;
      }
      return me;
    };
    rec(rec, 0, static_cast<std::uint32_t>(pts.n));

    idx.coords_.resize(pts.n * pts.d);
    for (std::size_t i = 0; i < pts.n; ++i)
      std::copy_n(pts.row(perm[i]), pts.d, idx.coords_.data() + i * pts.d);
    idx.orig_ = std::move(perm);
  } else {
    idx.coords_.assign(pts.data, pts.data + pts.n * pts.d);
    idx.orig_.resize(pts.n);
    for (std::size_t i = 0; i < pts.n; ++i) idx.orig_[i] = static_cast<std::uint32_t>(i);
  }
  return idx;
}

double SpatialIndex::box_dist2(std::uint32_t node, const double* q) const {
  const double* blo = boxes_.data() + static_cast<std::size_t>(node) * 2 * d_;
  const double* bhi = blo + d_;
  double s = 0.0;
  for (std::size_t j = 0; j < d_; ++j) {
    double e = 0.0;
    if (q[j] < blo[j])
      e = blo[j] - q[j];
    else if (q[j] > bhi[j])
      e = q[j] - bhi[j];
    s += e * e;
  }
  return s;
}

void SpatialIndex::query_tree(const double* q, std::size_t k, Heap& heap) const {
  struct Visit {
    std::int32_t node;
    double bd2;
  };
  std::vector<Visit> stack;
  stack.reserve(64);
  stack.push_back({0, box_dist2(0, q)});

  while (!stack.empty()) {
    const Visit v = stack.back();
    stack.pop_back();
    if (heap.size() == k && v.bd2 > heap.front().first * kPruneSlack) continue;
    const Node& nd = nodes_[static_cast<std::size_t>(v.node)];
    if (nd.left < 0) {
      for (std::uint32_t i = nd.lo; i < nd.hi; ++i)
        heap_offer(heap, k, sq_dist(q, coords_.data() + static_cast<std::size_t>(i) * d_, d_),
                   orig_[i]);
    } else {
      const double dl = box_dist2(static_cast<std::uint32_t>(nd.left), q);
      const double dr = box_dist2(static_cast<std::uint32_t>(nd.right), q);
      // push farther child first so the nearer one is explored next
      if (dl <= dr) {
        stack.push_back({nd.right, dr});
        stack.push_back({nd.left, dl});
      } else {
        stack.push_back({nd.left, dl});
        stack.push_back({nd.right, dr});
      }
    }
  }
}

void SpatialIndex::query_scan(const double* q, std::size_t k, Heap& heap) const {
  for (std::size_t i = 0; i < n_; ++i)
    heap_offer(heap, k, sq_dist(q, coords_.data() + i * d_, d_), orig_[i]);
}

NeighborResult SpatialIndex::query(std::span<const double> q, std::size_t k) const {
  check_query(q, d_, k);
  const std::size_t kk = std::min(k, n_);
  Heap heap;
  heap.reserve(kk + 1);
  if (is_tree())
    query_tree(q.data(), kk, heap);
  else
    query_scan(q.data(), kk, heap);
  return heap_finish(heap);
}

std::vector<NeighborResult> SpatialIndex::query_batch(const double* queries, std::size_t nq,
                                                      std::size_t k, std::size_t threads) const {
  if (nq == 0) return {};
  require(k >= 1, "knn: k must be >= 1");
  for (std::size_t i = 0; i < nq; ++i)
    require(all_finite({queries + i * d_, d_}),
            "knn: query " + std::to_string(i) + " has non-finite coordinates");

  const std::size_t kk = std::min(k, n_);
  std::vector<NeighborResult> out(nq);

  if (is_tree()) {
    parallel_for(0, nq, threads, [&](std::size_t lo, std::size_t hi) {
      Heap heap;
      heap.reserve(kk + 1);
      for (std::size_t i = lo; i < hi; ++i) {
        heap.clear();
        query_tree(queries + i * d_, kk, heap);
        out[i] = heap_finish(heap);
      }
    });
    return out;
  }

  // Blocked exact scan: a tile of queries sweeps resident point blocks so
  // each point row is pulled from memory once per kTileQueries queries
  // instead of once per query.
  const std::size_t block_rows =
      std::clamp<std::size_t>(131072 / (sizeof(double) * d_), 8, 1024);
  const std::size_t ntiles = (nq + kTileQueries - 1) / kTileQueries;

  parallel_for(0, ntiles, threads, [&](std::size_t tlo, std::size_t thi) {
    std::array<Heap, kTileQueries> heaps;
    for (std::size_t t = tlo; t < thi; ++t) {
      const std::size_t q0 = t * kTileQueries;
      const std::size_t q1 = std::min(q0 + kTileQueries, nq);
      const std::size_t tq = q1 - q0;
      for (std::size_t s = 0; s < tq; ++s) {
        heaps[s].clear();
        heaps[s].reserve(kk + 1);
      }
      for (std::size_t b0 = 0; b0 < n_; b0 += block_rows) {
        const std::size_t b1 = std::min(b0 + block_rows, n_);
        for (std::size_t s = 0; s < tq; ++s) {
          const double* q = queries + (q0 + s) * d_;
          Heap& heap = heaps[s];
          for (std::size_t i = b0; i < b1; ++i)
            heap_offer(heap, kk, sq_dist(q, coords_.data() + i * d_, d_),
                       static_cast<std::uint32_t>(i));
        }
      }
      for (std::size_t s = 0; s < tq; ++s) out[q0 + s] = heap_finish(heaps[s]);
    }
  });
  return out;
}

}  // namespace attrspace
