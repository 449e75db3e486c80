#include "attrspace/intersect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "attrspace/rng.hpp"
#include "attrspace/vecmath.hpp"

namespace attrspace {

void SearchConfig::validate() const {
  require(K >= 1, "search: K must be >= 1");
  require(M >= 1, "search: M must be >= 1");
  require(pool_factor >= 1, "search: pool_factor must be >= 1");
  require(conv_tol >= 0.0, "search: conv_tol must be >= 0");
  require(top_c >= 1, "search: top_c must be >= 1");
}

ResolvedQuery resolve_query(const AttributeSpace& space, const AttributeQuery& query) {
  require(!query.targets.empty(), "query has no targets");
  require(query.weights.size() == query.targets.size(),
          "query has " + std::to_string(query.targets.size()) + " targets but " +
              std::to_string(query.weights.size()) + " weights");

  ResolvedQuery rq;
  std::vector<bool> aspect_used(space.schema().aspect_count(), false);
  for (const auto& tgt : query.targets) {
    const int a = space.schema().aspect_ordinal(tgt.aspect);
    require(a >= 0, "query: unknown aspect '" + tgt.aspect + "'");
    const int t = space.schema().attribute_ordinal(static_cast<std::size_t>(a), tgt.attribute);
    require(t >= 0,
            "query: unknown attribute '" + tgt.attribute + "' in aspect '" + tgt.aspect + "'");
    require(!aspect_used[static_cast<std::size_t>(a)],
            "query: aspect '" + tgt.aspect + "' targeted twice");
    aspect_used[static_cast<std::size_t>(a)] = true;
    require(!space.ordinals(static_cast<std::size_t>(a), static_cast<std::size_t>(t)).empty(),
            "query: attribute '" + tgt.aspect + "/" + tgt.attribute + "' has no points");
    rq.targets.emplace_back(static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(t));
  }

  double wsum = 0.0;
  for (const double w : query.weights) {
    require(std::isfinite(w), "query: non-finite weight");
    wsum += w;
  }
  require(wsum > 0.0, "query: weights must sum to a positive value");
  rq.weights.resize(query.weights.size());
  for (std::size_t i = 0; i < query.weights.size(); ++i) rq.weights[i] = query.weights[i] / wsum;
  rq.weight_sum = 0.0;
  for (const double w : rq.weights) rq.weight_sum += w;
  return rq;
}

SearchContext::SearchContext(const AttributeSpace& space, const AttributeQuery& query)
    : space_(space), rq_(resolve_query(space, query)) {
  const std::size_t d = space.dim();
  for (const auto& [a, t] : rq_.targets) {
    const auto& ords = space.ordinals(a, t);
    locals_.push_back(ords);
    std::vector<double> rows(ords.size() * d);
    for (std::size_t i = 0; i < ords.size(); ++i)
      std::copy_n(space.data() + static_cast<std::size_t>(ords[i]) * d, d, rows.data() + i * d);
    index_.push_back(SpatialIndex::build({rows.data(), ords.size(), d}));
    coords_.push_back(std::move(rows));
  }
}

std::vector<double> SearchContext::topk_mean(std::size_t t, const NeighborResult& nn) const {
  std::vector<std::uint32_t> ords = nn.ordinals;
  std::sort(ords.begin(), ords.end());
  return mean_rows(coords_[t].data(), space_.dim(), ords);
}

std::vector<double> SearchContext::step(std::span<const double> candidate, std::size_t K) const {
  require(K >= 1, "step: K must be >= 1");
  require(candidate.size() == dim(), "step: candidate dimension mismatch");
  require(all_finite(candidate), "step: candidate has non-finite coordinates");
  const std::size_t d = dim();
  std::vector<double> acc(d, 0.0);
  for (std::size_t t = 0; t < target_count(); ++t) {
    const auto nn = index_[t].query(candidate, std::min(K, locals_[t].size()));
    const auto m = topk_mean(t, nn);
    const double w = rq_.weights[t];
    for (std::size_t j = 0; j < d; ++j) acc[j] += w * m[j];
  }
  for (std::size_t j = 0; j < d; ++j) acc[j] /= rq_.weight_sum;
  return acc;
}

double SearchContext::quality(std::span<const double> point, std::size_t k_eval) const {
  require(k_eval >= 1, "quality: K_eval must be >= 1");
  double worst = 0.0;
  for (std::size_t t = 0; t < target_count(); ++t) {
    const auto nn = index_[t].query(point, std::min(k_eval, locals_[t].size()));
    double s = 0.0;
    for (const double dist : nn.distances) s += dist;
    worst = std::max(worst, s / static_cast<double>(nn.distances.size()));
  }
  return worst;
}

namespace {

struct InitOutput {
  std::vector<std::vector<double>> candidates;
  std::vector<std::uint32_t> ordinals;  // global, aligned with candidates
  bool truncated = false;
};

InitOutput init_impl(const SearchContext& ctx, const SearchConfig& config) {
  const std::size_t d = ctx.dim();
  const std::size_t nt = ctx.target_count();

  // union of target subsets, ascending global ordinals (aspects are
  // disjoint, so a k-way merge of sorted lists)
  std::vector<std::uint32_t> all;
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& o = ctx.target_ordinals(t);
    all.insert(all.end(), o.begin(), o.end());
  }
  std::sort(all.begin(), all.end());

  const std::size_t want_pool = config.pool_factor * config.M;
  const std::size_t pool_n = std::min(want_pool, all.size());

  RngStream pool_rng(config.seed, {rng_tag::init_pool});
  const auto picks = pool_rng.sample_without_replacement(static_cast<std::uint32_t>(all.size()),
                                                         static_cast<std::uint32_t>(pool_n));
  std::vector<std::uint32_t> pool(pool_n);
  for (std::size_t i = 0; i < pool_n; ++i) pool[i] = all[picks[i]];

  // score = mean over targets of the 1-NN distance (self-distance counts)
  std::vector<double> qcoords(pool_n * d);
  for (std::size_t i = 0; i < pool_n; ++i)
    std::copy_n(ctx.space().data() + static_cast<std::size_t>(pool[i]) * d, d,
                qcoords.data() + i * d);

  const std::size_t threads = resolve_threads(config.threads);
  std::vector<double> score(pool_n, 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto res = ctx.target_index(t).query_batch(qcoords.data(), pool_n, 1, threads);
    for (std::size_t i = 0; i < pool_n; ++i) score[i] += res[i].distances[0];
  }
  for (double& s : score) s /= static_cast<double>(nt);

  std::vector<std::uint32_t> order(pool_n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    return score[x] != score[y] ? score[x] < score[y] : pool[x] < pool[y];
  });

  InitOutput out;
  out.truncated = pool_n < config.M;
  const std::size_t m = std::min(config.M, pool_n);
  out.candidates.reserve(m);
  out.ordinals.reserve(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::uint32_t ord = pool[order[r]];
    out.ordinals.push_back(ord);
    const double* p = ctx.space().data() + static_cast<std::size_t>(ord) * d;
    out.candidates.emplace_back(p, p + d);
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> init_candidates(const AttributeSpace& space,
                                                 const AttributeQuery& query,
                                                 const SearchConfig& config, bool* pool_truncated,
                                                 std::vector<std::uint32_t>* chosen_ordinals) {
  config.validate();
  SearchContext ctx(space, query);
  auto out = init_impl(ctx, config);
  if (pool_truncated) *pool_truncated = out.truncated;
  if (chosen_ordinals) *chosen_ordinals = std::move(out.ordinals);
  return std::move(out.candidates);
}

std::vector<double> step(const AttributeSpace& space, const AttributeQuery& query,
                         std::span<const double> candidate, std::size_t K) {
  SearchContext ctx(space, query);
  return ctx.step(candidate, K);
}

IntersectionResult search(const AttributeSpace& space, const AttributeQuery& query,
                          const SearchConfig& config) {
  config.validate();
  SearchContext ctx(space, query);
  const std::size_t d = ctx.dim();
  const std::size_t nt = ctx.target_count();
  const std::size_t threads = resolve_threads(config.threads);

  auto init = init_impl(ctx, config);
  const std::size_t m = init.candidates.size();

  IntersectionResult res;
  res.pool_truncated = init.truncated;
  res.converged.assign(m, 0);
  res.converged_after.assign(m, std::numeric_limits<std::size_t>::max());
  if (config.record_trajectories) {
    res.trajectories.resize(m);
    for (std::size_t i = 0; i < m; ++i) res.trajectories[i].push_back(init.candidates[i]);
  }

  std::vector<std::vector<double>> pos = std::move(init.candidates);
  std::vector<std::uint32_t> active(m);
  std::iota(active.begin(), active.end(), 0u);

  std::vector<double> qbuf;
  std::vector<double> acc;
  for (std::size_t s = 1; s <= config.S && !active.empty(); ++s) {
    res.iterations_run = s;
    const std::size_t na = active.size();
    qbuf.resize(na * d);
    for (std::size_t i = 0; i < na; ++i)
      std::copy_n(pos[active[i]].data(), d, qbuf.data() + i * d);

    acc.assign(na * d, 0.0);
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t k = std::min(config.K, ctx.target_size(t));
      const auto nn = ctx.target_index(t).query_batch(qbuf.data(), na, k, threads);
      const double w = ctx.query().weights[t];
      parallel_for(0, na, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          const auto mt = ctx.topk_mean(t, nn[i]);
          double* a = acc.data() + i * d;
          for (std::size_t j = 0; j < d; ++j) a[j] += w * mt[j];
        }
      });
    }

    std::vector<std::uint32_t> still;
    still.reserve(na);
    for (std::size_t i = 0; i < na; ++i) {
      const std::uint32_t c = active[i];
      double* a = acc.data() + i * d;
      for (std::size_t j = 0; j < d; ++j) a[j] /= ctx.query().weight_sum;
      const double delta = std::sqrt(sq_dist(a, pos[c].data(), d));
      std::copy_n(a, d, pos[c].data());
      if (config.record_trajectories) res.trajectories[c].push_back(pos[c]);
      if (delta < config.conv_tol) {
        res.converged[c] = 1;
        res.converged_after[c] = s - 1;
      } else {
        still.push_back(c);
      }
    }
    active = std::move(still);
  }

  // selection: balance score with the search K, shortlist of top_c,
  // deterministic rank-0 or seeded pick
  res.final_scores.resize(m);
  parallel_for(0, m, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) res.final_scores[i] = ctx.quality(pos[i], config.K);
  });

  std::vector<std::uint32_t> order(m);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    return res.final_scores[x] != res.final_scores[y] ? res.final_scores[x] < res.final_scores[y]
                                                      : x < y;
  });
  order.resize(std::min(config.top_c, m));
  res.shortlist = order;

  std::size_t pick = 0;
  if (config.selection == SearchConfig::Selection::stochastic && order.size() > 1) {
    RngStream sel(config.seed, {rng_tag::select});
    pick = sel.bounded(static_cast<std::uint32_t>(order.size()));
  }
  res.selected_candidate = order[pick];
  res.point = pos[res.selected_candidate];
  return res;
}

std::vector<double> interpolation_baseline(const AttributeSpace& space,
                                           const AttributeQuery& query) {
  const ResolvedQuery rq = resolve_query(space, query);
  const std::size_t d = space.dim();
  std::vector<double> acc(d, 0.0);
  for (std::size_t t = 0; t < rq.targets.size(); ++t) {
    const auto& [a, tt] = rq.targets[t];
    const auto m = attribute_center(space, space.ordinals(a, tt));
    const double w = rq.weights[t];
    for (std::size_t j = 0; j < d; ++j) acc[j] += w * m[j];
  }
  for (std::size_t j = 0; j < d; ++j) acc[j] /= rq.weight_sum;
  return acc;
}

double quality(const AttributeSpace& space, const AttributeQuery& query,
               std::span<const double> point, std::size_t k_eval) {
  SearchContext ctx(space, query);
  return ctx.quality(point, k_eval);
}

std::vector<double> grid_oracle(const AttributeSpace& space, const AttributeQuery& query,
                                const GridBounds& bounds, std::size_t resolution,
                                std::size_t k_eval, std::size_t threads) {
  const std::size_t d = space.dim();
  require(d >= 1 && d <= 3, "grid_oracle: dimension must be <= 3");
  require(resolution >= 1, "grid_oracle: resolution must be >= 1");
  require(bounds.lo.size() == d && bounds.hi.size() == d, "grid_oracle: bounds dimension mismatch");
  for (std::size_t j = 0; j < d; ++j)
    require(bounds.lo[j] <= bounds.hi[j], "grid_oracle: lo > hi");

  SearchContext ctx(space, query);
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) total *= resolution;

  const std::size_t nthreads = resolve_threads(threads);
  struct Best {
    double q = std::numeric_limits<double>::infinity();
    std::size_t cell = 0;
  };
  const std::size_t nchunks = std::max<std::size_t>(1, std::min<std::size_t>(nthreads * 8, total));
  std::vector<Best> best(nchunks);

  parallel_for(0, nchunks, nthreads, [&](std::size_t clo, std::size_t chi) {
    std::vector<double> g(d);
    for (std::size_t c = clo; c < chi; ++c) {
      const std::size_t lo = c * total / nchunks;
      const std::size_t hi = (c + 1) * total / nchunks;
      Best b;
      for (std::size_t cell = lo; cell < hi; ++cell) {
        std::size_t rest = cell;
        for (std::size_t j = d; j-- > 0;) {
          const std::size_t i = rest % resolution;
          rest /= resolution;
          g[j] = bounds.lo[j] +
                 static_cast<double>(i) * (bounds.hi[j] - bounds.lo[j]) /
                     static_cast<double>(resolution);
        }
        const double q = ctx.quality(g, k_eval);
        if (q < b.q) b = {q, cell};  // lex tie-break: earlier cell kept
      }
      best[c] = b;
    }
  });

  Best global;
  for (const Best& b : best)
    if (b.q < global.q) global = b;  // chunks ascend, so ties keep the earlier cell

  std::vector<double> g(d);
  std::size_t rest = global.cell;
  for (std::size_t j = d; j-- > 0;) {
    const std::size_t i = rest % resolution;
    rest /= resolution;
    g[j] = bounds.lo[j] + static_cast<double>(i) * (bounds.hi[j] - bounds.lo[j]) /
                              static_cast<double>(resolution);
  }
  return g;
}

}  // namespace attrspace
