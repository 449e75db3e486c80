#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "attrspace/common.hpp"

namespace attrspace {

// Non-owning row-major point block.
struct PointsRef {
  const double* data = nullptr;
  std::size_t n = 0;
  std::size_t d = 0;
  const double* row(std::size_t i) const { return data + i * d; }
};

struct NeighborResult {
  std::vector<std::uint32_t> ordinals;  // ascending (distance, ordinal)
  std::vector<double> distances;        // Euclidean, ascending
};

// Reference semantics: the k smallest under (squared distance, ordinal)
// lexicographic order. k > n returns all n. Every distance in this module
// goes through the one shared kernel, so accelerated paths match this
// oracle bit-for-bit, not just approximately.
NeighborResult knn_brute(PointsRef pts, std::span<const double> query, std::size_t k);

// Exact static index: balanced kd-tree for d <= 32, blocked scan layout
// above that. Both return knn_brute's answer ordinal-for-ordinal.
class SpatialIndex {
 public:
  static constexpr std::size_t kKdMaxDim = 32;

  static SpatialIndex build(PointsRef pts);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  bool is_tree() const { return !nodes_.empty(); }

  NeighborResult query(std::span<const double> q, std::size_t k) const;

  // Many queries, deterministic per-query outputs regardless of `threads`.
  // On the blocked path, queries are processed in tiles against resident
  // point blocks — that cache reuse is the whole point of the layout.
  std::vector<NeighborResult> query_batch(const double* queries, std::size_t nq, std::size_t k,
                                          std::size_t threads = 1) const;

 private:
  struct Node {
    std::uint32_t lo = 0, hi = 0;  // packed range
    std::int32_t left = -1, right = -1;
  };

  double box_dist2(std::uint32_t node, const double* q) const;
  void query_tree(const double* q, std::size_t k,
                  std::vector<std::pair<double, std::uint32_t>>& heap) const;
  void query_scan(const double* q, std::size_t k,
                  std::vector<std::pair<double, std::uint32_t>>& heap) const;

  std::size_t n_ = 0, d_ = 0;
  std::vector<double> coords_;        // packed rows (tree order or original)
  std::vector<std::uint32_t> orig_;   // packed position -> caller ordinal
  std::vector<Node> nodes_;           // empty => blocked layout
  std::vector<double> boxes_;         // per node: d lows then d highs
};

}  // namespace attrspace
