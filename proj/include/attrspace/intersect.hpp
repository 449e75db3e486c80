#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "attrspace/neighbors.hpp"
#include "attrspace/space.hpp"

namespace attrspace {

struct AttributeQuery {
  struct Target {
    std::string aspect;
    std::string attribute;
  };
  std::vector<Target> targets;
  std::vector<double> weights;  // one per target; negatives allowed
};

struct SearchConfig {
  std::size_t K = 200;
  std::size_t M = 1000;
  std::size_t S = 15;  // hard iteration cap
  std::size_t pool_factor = 10;
  double conv_tol = 1e-8;
  enum class Selection { deterministic, stochastic };
  Selection selection = Selection::deterministic;
  std::size_t top_c = 10;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0 -> env/1
  bool record_trajectories = true;

  void validate() const;
};

struct IntersectionResult {
  std::vector<double> point;
  std::size_t iterations_run = 0;  // step-loop passes executed
  bool pool_truncated = false;     // pool had fewer than M points
  std::size_t selected_candidate = 0;
  std::vector<double> final_scores;     // per candidate (balance score)
  std::vector<std::uint32_t> shortlist;  // candidate indices, score-ascending
  std::vector<char> converged;          // per candidate
  // iterations after which the candidate stopped moving (defined when
  // converged; SIZE_MAX otherwise)
  std::vector<std::size_t> converged_after;
  // trajectories[m] = [H^0 .. H^last]
  std::vector<std::vector<std::vector<double>>> trajectories;
};

// Weights canonicalized once (divided by their sum) so every downstream
// computation is invariant to rescaling them; the sum must be positive.
struct ResolvedQuery {
  std::vector<std::pair<std::uint16_t, std::uint16_t>> targets;  // (aspect, attribute) ordinals
  std::vector<double> weights;  // normalized
  double weight_sum = 1.0;      // sum of normalized weights, as computed
};

ResolvedQuery resolve_query(const AttributeSpace& space, const AttributeQuery& query);

// Per-target packed point blocks + exact indices, built once per query and
// shared by init/step/select/quality. Holds a reference to the space; keep
// the space alive while using it.
class SearchContext {
 public:
  SearchContext(const AttributeSpace& space, const AttributeQuery& query);

  const ResolvedQuery& query() const { return rq_; }
  const AttributeSpace& space() const { return space_; }
  std::size_t dim() const { return space_.dim(); }
  std::size_t target_count() const { return rq_.targets.size(); }
  std::size_t target_size(std::size_t t) const { return locals_[t].size(); }
  // global point ordinals of target t's subset, ascending
  const std::vector<std::uint32_t>& target_ordinals(std::size_t t) const { return locals_[t]; }
  const SpatialIndex& target_index(std::size_t t) const { return index_[t]; }

  // mean of the neighbor set, summed in ascending ordinal order (so full-K
  // equals attribute_center bit-for-bit)
  std::vector<double> topk_mean(std::size_t t, const NeighborResult& nn) const;

  std::vector<double> step(std::span<const double> candidate, std::size_t K) const;
  double quality(std::span<const double> point, std::size_t k_eval) const;

 private:
  const AttributeSpace& space_;
  ResolvedQuery rq_;
  std::vector<std::vector<std::uint32_t>> locals_;  // target -> global ordinals
  std::vector<std::vector<double>> coords_;         // target -> packed rows
  std::vector<SpatialIndex> index_;                 // target -> exact index
};

// Alg. 1 line 1: pool sampled without replacement from the targets' points,
// each pool point scored by its mean 1-NN distance over the targets
// (unweighted, self-distance allowed), lowest M kept with ordinal tie-break.
std::vector<std::vector<double>> init_candidates(const AttributeSpace& space,
                                                 const AttributeQuery& query,
                                                 const SearchConfig& config,
                                                 bool* pool_truncated = nullptr,
                                                 std::vector<std::uint32_t>* chosen_ordinals = nullptr);

// One update: weighted average of the per-target top-K neighbor means.
std::vector<double> step(const AttributeSpace& space, const AttributeQuery& query,
                         std::span<const double> candidate, std::size_t K);

IntersectionResult search(const AttributeSpace& space, const AttributeQuery& query,
                          const SearchConfig& config);

std::vector<double> interpolation_baseline(const AttributeSpace& space,
                                           const AttributeQuery& query);

// Balance score: max over targets of mean distance to the point's K_eval
// nearest points of that target. Lower is better.
double quality(const AttributeSpace& space, const AttributeQuery& query,
               std::span<const double> point, std::size_t k_eval);

struct GridBounds {
  std::vector<double> lo, hi;
};

// Exhaustive minimizer of `quality` over a regular grid; d <= 3 only.
// Grid points are lo + i*(hi-lo)/resolution, i in [0, resolution); ties go
// to the lexicographically first grid index.
std::vector<double> grid_oracle(const AttributeSpace& space, const AttributeQuery& query,
                                const GridBounds& bounds, std::size_t resolution,
                                std::size_t k_eval, std::size_t threads = 0);

}  // namespace attrspace
