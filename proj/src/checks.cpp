#include "attrspace/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "attrspace/common.hpp"
#include "attrspace/intersect.hpp"
#include "attrspace/neighbors.hpp"
#include "attrspace/rng.hpp"
#include "attrspace/synth.hpp"
#include "attrspace/trainer.hpp"

namespace attrspace {

namespace {

CheckResult check_knn(std::uint64_t seed, bool fault) {
  CheckResult r{"knn", true, ""};
  RngStream g(seed, {0x6b6e6eull});  // "knn"
  std::size_t cases = 0, failures = 0;
  for (const std::size_t d : {2ul, 8ul, 32ul, 80ul}) {
    for (int rep = 0; rep < 25; ++rep) {
      const std::size_t n = 2 + g.bounded(400);
      const std::size_t k = 1 + g.bounded(n + 2);  // k > n on purpose sometimes
      std::vector<double> pts(n * d), q(d);
      for (double& x : pts) x = g.normal();
      for (double& x : q) x = g.normal();
      if (g.bounded(4) == 0) {  // duplicates stress the tie rule
        for (std::size_t i = 1; i < n; i += 2)
          std::copy_n(pts.data(), d, pts.data() + i * d);
      }
      PointsRef ref{pts.data(), n, d};
      SpatialIndex index = SpatialIndex::build(ref);
      NeighborResult a = knn_brute(ref, {q.data(), d}, k);
      NeighborResult b = index.query({q.data(), d}, k);
      if (fault && !b.ordinals.empty() && b.ordinals.size() > 1)
        std::swap(b.ordinals[0], b.ordinals[1]);
      ++cases;
      if (a.ordinals != b.ordinals || a.distances != b.distances) ++failures;
    }
  }
  if (failures) {
    r.pass = false;
    r.detail = std::to_string(failures) + "/" + std::to_string(cases) + " cases disagree";
  } else {
    r.detail = std::to_string(cases) + " cases, index == brute force exactly";
  }
  return r;
}

CheckResult check_grad(std::uint64_t seed, bool fault) {
  CheckResult r{"grad", true, ""};
  AttributeSchema schema;
  schema.aspects = {"s", "t"};
  schema.attributes = {{"a", "b"}, {"c", "d", "e"}};
  ModelDims dims{6, 4, 8, 8};
  double worst = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    ToyModel m = init_model(schema, dims, 1e-3, seed + rep);
    RngStream g(seed, {0x67726164ull, static_cast<std::uint64_t>(rep)});
    Batch batch;
    batch.aspect = static_cast<std::uint16_t>(rep % 2);
    batch.x = Mat(8, dims.D);
    for (double& x : batch.x.a) x = g.normal();
    for (std::size_t i = 0; i < 8; ++i)
      batch.label.push_back(static_cast<std::uint16_t>(
          g.bounded(static_cast<std::uint64_t>(schema.attributes[batch.aspect].size()))));
    AspectMemory mem = AspectMemory::empty(2, dims.d);
    for (auto& c : mem.center)
      for (double& x : c) x = g.normal();
    std::fill(mem.initialized.begin(), mem.initialized.end(), 1);
    const LossWeights w{0.5, 0.2, 0.3};
    GradCheckReport rep2 =
        grad_check(m, batch, mem, w, seed + 100 + rep, 1e-5, 1e-3, fault ? "dec.v2" : "");
    for (const auto& b : rep2.blocks) worst = std::max(worst, b.max_rel_err);
    if (!rep2.pass) {
      r.pass = false;
      for (const auto& b : rep2.blocks)
        if (!b.pass) r.detail = "block " + b.name + " rel err " + std::to_string(b.max_rel_err);
    }
  }
  if (r.pass) {
    std::ostringstream os;
    os << "max rel err " << worst << " over 3 models";
    r.detail = os.str();
  }
  return r;
}

CheckResult check_gap(std::uint64_t seed, bool fault) {
  CheckResult r{"gap", true, ""};
  // 3 aspects, latents drawn directly
  RngStream g(seed, {0x676170ull});
  const std::size_t d = 5;
  std::vector<Mat> groups;
  for (int t = 0; t < 3; ++t) {
    Mat m(40 + 10 * t, d);
    for (double& x : m.a) x = g.normal() + 2.0 * t;
    groups.push_back(std::move(m));
  }
  const double exact = loss_gap_exact(groups);

  AspectMemory mem = AspectMemory::empty(3, d);
  for (int t = 0; t < 3; ++t) {
    // pre-set to the exact centers, via the same accumulation as the loss
    std::vector<std::uint32_t> all(groups[t].rows);
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
    mem.center[t] = mean_rows(groups[t].a.data(), d, all);
    mem.initialized[t] = 1;
  }
  double round_sum = 0.0;
  for (int t = 0; t < 3; ++t)
    round_sum += loss_gap_batch(groups[t], static_cast<std::uint16_t>(t), mem);
  if (fault) round_sum *= 1.5;
  const double err = std::fabs(round_sum - 2.0 * exact);
  r.pass = err <= 1e-9;
  std::ostringstream os;
  os << "|round_sum - 2*exact| = " << err;
  r.detail = os.str();
  return r;
}

std::pair<AttributeSpace, AttributeQuery> small_fixture(std::uint64_t seed) {
  Scenario sc = preset_scenario("symmetric-overlap", seed);
  for (auto& a : sc.attributes) a.count = 300;  // keep the check quick
  AttributeSpace space = build_scenario(sc);
  AttributeQuery q;
  q.targets = {{"sentiment", "positive"}, {"topic", "world"}};
  q.weights = {1.0, 1.0};
  return {std::move(space), std::move(q)};
}

CheckResult check_degeneration(std::uint64_t seed, bool fault) {
  CheckResult r{"degeneration", true, ""};
  auto [space, q] = small_fixture(seed);
  SearchConfig cfg;
  cfg.K = space.size();  // >= every attribute size -> degenerate mode
  cfg.M = 16;
  cfg.seed = seed;
  cfg.record_trajectories = false;
  IntersectionResult res = search(space, q, cfg);
  std::vector<double> base = interpolation_baseline(space, q);
  if (fault) base[0] += 1e-3;
  double worst = 0.0;
  for (std::size_t j = 0; j < base.size(); ++j)
    worst = std::max(worst, std::fabs(res.point[j] - base[j]));
  const bool one_iter = res.converged_after[res.selected_candidate] == 1;
  r.pass = worst <= 1e-9 && one_iter;
  std::ostringstream os;
  os << "max |search - baseline| = " << worst << ", converged after "
     << res.converged_after[res.selected_candidate] << " iteration(s)";
  r.detail = os.str();
  return r;
}

CheckResult check_translation(std::uint64_t seed, bool fault) {
  CheckResult r{"translation", true, ""};
  auto [space, q] = small_fixture(seed);
  RngStream g(seed, {0x7472616eull});
  std::vector<double> v(space.dim());
  for (double& x : v) x = 3.0 * g.normal();

  std::vector<RawPoint> moved;
  for (std::size_t i = 0; i < space.size(); ++i) {
    RawPoint p;
    p.id = space.id(i);
    p.aspect = space.schema().aspects[space.aspect_of(i)];
    p.attribute = space.schema().attributes[space.aspect_of(i)][space.attribute_of(i)];
    const auto row = space.point(i);
    p.vec.assign(row.begin(), row.end());
    for (std::size_t j = 0; j < v.size(); ++j) p.vec[j] += v[j];
    moved.push_back(std::move(p));
  }
  AttributeSpace shifted = AttributeSpace::build(space.schema(), std::move(moved));

  SearchConfig cfg;
  cfg.K = 50;
  cfg.M = 32;
  cfg.seed = seed;
  cfg.record_trajectories = false;
  IntersectionResult a = search(space, q, cfg);
  IntersectionResult b = search(shifted, q, cfg);
  if (fault) v[0] += 1e-3;
  double worst = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    worst = std::max(worst, std::fabs(b.point[j] - (a.point[j] + v[j])));
  r.pass = worst <= 1e-9;
  std::ostringstream os;
  os << "max |search(x+v) - (search(x)+v)| = " << worst;
  r.detail = os.str();
  return r;
}

}  // namespace

std::vector<CheckResult> run_checks(std::uint64_t seed, const std::string& fault) {
  const std::vector<std::string> known = {"knn", "grad", "gap", "degeneration", "translation"};
  if (!fault.empty())
    require(std::find(known.begin(), known.end(), fault) != known.end(),
            "unknown fault target '" + fault + "' (choose from knn, grad, gap, degeneration, "
            "translation)");
  std::vector<CheckResult> out;
  out.push_back(check_knn(seed, fault == "knn"));
  out.push_back(check_grad(seed, fault == "grad"));
  out.push_back(check_gap(seed, fault == "gap"));
  out.push_back(check_degeneration(seed, fault == "degeneration"));
  out.push_back(check_translation(seed, fault == "translation"));
  return out;
}

}  // namespace attrspace
