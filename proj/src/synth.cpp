#include "attrspace/synth.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "attrspace/vecmath.hpp"

namespace attrspace {

std::vector<double> cholesky(const std::vector<double>& cov, std::size_t d) {
  require(cov.size() == d * d, "covariance must be d*d");
  double maxabs = 0.0;
  for (double x : cov) maxabs = std::max(maxabs, std::fabs(x));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      require(std::fabs(cov[i * d + j] - cov[j * d + i]) <= 1e-12 * std::max(1.0, maxabs),
              "covariance not symmetric");

  std::vector<double> L(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = cov[i * d + j];
      for (std::size_t k = 0; k < j; ++k) s -= L[i * d + k] * L[j * d + k];
      if (i == j) {
        require(s > 0.0, "covariance not positive definite");
        L[i * d + i] = std::sqrt(s);
      } else {
        L[i * d + j] = s / L[j * d + j];
      }
    }
  }
  return L;
}

namespace {

// One N(mean, L L^T) draw; consumes exactly d normals.
void gaussian_draw(RngStream& g, const double* mean, const double* L, std::size_t d,
                   double* out, double* z) {
  g.fill_normal(z, d);
  for (std::size_t i = 0; i < d; ++i) {
    double s = mean[i];
    for (std::size_t k = 0; k <= i; ++k) s += L[i * d + k] * z[k];
    out[i] = s;
  }
}

// One skewed draw: Gaussian, with the component along skew_dir replaced by
// a centered lognormal-style tail. Consumes exactly d normals, same as
// gaussian_draw, so the two are interchangeable on a shared stream.
void skewed_draw(RngStream& g, const double* mean, double scale, const double* dir, double kappa,
                 std::size_t d, double* out, double* z) {
  g.fill_normal(z, d);
  double par = 0.0;
  for (std::size_t i = 0; i < d; ++i) par += dir[i] * z[i];
  const double tail = std::exp(kappa * par) - std::exp(kappa * kappa / 2.0);
  for (std::size_t i = 0; i < d; ++i)
    out[i] = mean[i] + scale * ((z[i] - par * dir[i]) + dir[i] * tail);
}

void check_skew_args(const std::vector<double>& mean, const std::vector<double>& dir,
                     double kappa) {
  require(kappa >= 0.0, "skew strength must be >= 0");
  require(dir.size() == mean.size(), "skew_dir dimension mismatch");
  const double n2 = norm2(dir.data(), dir.size());
  require(std::fabs(n2 - 1.0) <= 1e-9, "skew_dir must be a unit vector");
}

std::vector<double> identity_cov(std::size_t d, double var) {
  std::vector<double> cov(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) cov[i * d + i] = var;
  return cov;
}

}  // namespace

std::vector<std::vector<double>> sample_gaussian(std::size_t n, const std::vector<double>& mean,
                                                 const std::vector<double>& cov,
                                                 std::uint64_t seed) {
  const std::size_t d = mean.size();
  require(d > 0, "empty mean");
  const auto L = cholesky(cov, d);
  RngStream g(seed, {rng_tag::gaussian});
  std::vector<std::vector<double>> out(n, std::vector<double>(d));
  std::vector<double> z(d);
  for (std::size_t i = 0; i < n; ++i) gaussian_draw(g, mean.data(), L.data(), d, out[i].data(), z.data());
  return out;
}

std::vector<std::vector<double>> sample_skewed(std::size_t n, const std::vector<double>& mean,
                                               double scale, const std::vector<double>& skew_dir,
                                               double kappa, std::uint64_t seed) {
  check_skew_args(mean, skew_dir, kappa);
  if (kappa == 0.0)  // defined reduction, including the seeded stream
    return sample_gaussian(n, mean, identity_cov(mean.size(), scale * scale), seed);
  const std::size_t d = mean.size();
  RngStream g(seed, {rng_tag::skew});
  std::vector<std::vector<double>> out(n, std::vector<double>(d));
  std::vector<double> z(d);
  for (std::size_t i = 0; i < n; ++i)
    skewed_draw(g, mean.data(), scale, skew_dir.data(), kappa, d, out[i].data(), z.data());
  return out;
}

void Scenario::validate() const {
  require(dim > 0, "scenario dim must be > 0");
  require(!attributes.empty(), "scenario has no attributes");
  require(rho >= 0.0 && rho < 1.0, "noise fraction must lie in [0, 1)");
  for (const auto& a : attributes) {
    require(a.count >= 1, "attribute '" + a.aspect + "/" + a.attribute + "': count must be >= 1");
    require(!a.components.empty(),
            "attribute '" + a.aspect + "/" + a.attribute + "': no components");
    double wsum = 0.0;
    for (const auto& c : a.components) {
      require(c.weight > 0.0, "mixture weights must be positive");
      wsum += c.weight;
      require(c.mean.size() == dim, "component mean dimension != scenario dim");
      if (c.kind == SamplerSpec::Kind::gaussian) {
        require(c.cov.size() == dim * dim, "component covariance must be dim*dim");
      } else {
        check_skew_args(c.mean, c.skew_dir, c.kappa);
      }
    }
    require(std::fabs(wsum - 1.0) <= 1e-9, "mixture weights must sum to 1");
  }
}

AttributeSpace build_scenario(const Scenario& scenario) {
  scenario.validate();
  const std::size_t d = scenario.dim;

  AttributeSchema schema;
  std::vector<std::pair<int, int>> attr_labels;  // per AttributeSpec: (aspect, attr) ordinals
  for (const auto& a : scenario.attributes) {
    int asp = schema.aspect_ordinal(a.aspect);
    if (asp < 0) {
      schema.aspects.push_back(a.aspect);
      schema.attributes.emplace_back();
      asp = static_cast<int>(schema.aspects.size()) - 1;
    }
    require(schema.attribute_ordinal(static_cast<std::size_t>(asp), a.attribute) < 0,
            "duplicate attribute spec '" + a.aspect + "/" + a.attribute + "'");
    schema.attributes[static_cast<std::size_t>(asp)].push_back(a.attribute);
    attr_labels.emplace_back(asp,
                             static_cast<int>(schema.attributes[static_cast<std::size_t>(asp)].size() - 1));
  }

  std::vector<RawPoint> records;
  std::vector<double> z(d), buf(d);
  for (std::size_t ai = 0; ai < scenario.attributes.size(); ++ai) {
    const auto& a = scenario.attributes[ai];
    // per-attribute streams: adding/reordering other attributes never
    // perturbs this one's draws
    RngStream base(scenario.seed, {ai});
    RngStream pick = base.child(rng_tag::mixture);
    RngStream draw = base.child(rng_tag::gaussian);

    // cumulative mixture weights + pre-factored gaussian components
    std::vector<double> cum;
    std::vector<std::vector<double>> chols(a.components.size());
    double acc = 0.0;
    for (std::size_t c = 0; c < a.components.size(); ++c) {
      acc += a.components[c].weight;
      cum.push_back(acc);
      const auto& comp = a.components[c];
      if (comp.kind == SamplerSpec::Kind::gaussian || comp.kappa == 0.0)
        chols[c] = cholesky(comp.kind == SamplerSpec::Kind::gaussian
                                ? comp.cov
                                : identity_cov(d, comp.scale * comp.scale),
                            d);
    }

    for (std::size_t i = 0; i < a.count; ++i) {
      std::size_t c = 0;
      if (a.components.size() > 1) {
        const double u = pick.uniform01() * acc;
        while (c + 1 < a.components.size() && u >= cum[c]) ++c;
      }
      const auto& comp = a.components[c];
      if (comp.kind == SamplerSpec::Kind::gaussian || comp.kappa == 0.0)
        gaussian_draw(draw, comp.mean.data(), chols[c].data(), d, buf.data(), z.data());
      else
        skewed_draw(draw, comp.mean.data(), comp.scale, comp.skew_dir.data(), comp.kappa, d,
                    buf.data(), z.data());
      RawPoint p;
      p.id = a.aspect + "/" + a.attribute + "/" + std::to_string(i);
      p.aspect = a.aspect;
      p.attribute = a.attribute;
      p.vec = buf;
      records.push_back(std::move(p));
    }
  }

  // label noise: relabel floor(rho*n) points to a uniformly random
  // (aspect, attribute) pair from the full schema; vectors untouched
  const std::size_t n = records.size();
  const auto m = static_cast<std::size_t>(scenario.rho * static_cast<double>(n));
  if (m > 0) {
    std::vector<std::pair<std::uint16_t, std::uint16_t>> pairs;
    for (std::size_t asp = 0; asp < schema.aspects.size(); ++asp)
      for (std::size_t t = 0; t < schema.attributes[asp].size(); ++t)
        pairs.emplace_back(static_cast<std::uint16_t>(asp), static_cast<std::uint16_t>(t));

    RngStream sel(scenario.seed, {rng_tag::noise_select});
    RngStream lab(scenario.seed, {rng_tag::noise_label});
    const auto chosen =
        sel.sample_without_replacement(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(m));
    for (const std::uint32_t ord : chosen) {
      const auto& pr = pairs[lab.bounded(static_cast<std::uint32_t>(pairs.size()))];
      records[ord].aspect = schema.aspects[pr.first];
      records[ord].attribute = schema.attributes[pr.first][pr.second];
    }
  }

  return AttributeSpace::build(std::move(schema), std::move(records));
}

// ---- presets -------------------------------------------------------------

namespace {

SamplerSpec isotropic(std::vector<double> mean, double var) {
  SamplerSpec s;
  s.kind = SamplerSpec::Kind::gaussian;
  s.mean = std::move(mean);
  s.cov = identity_cov(s.mean.size(), var);
  return s;
}

SamplerSpec skewed(std::vector<double> mean, double scale, std::vector<double> dir, double kappa) {
  SamplerSpec s;
  s.kind = SamplerSpec::Kind::skewed;
  s.mean = std::move(mean);
  s.scale = scale;
  s.skew_dir = std::move(dir);
  s.kappa = kappa;
  return s;
}

Scenario skewed_tails_scenario(std::uint64_t seed) {
  // Two heavy-tailed clusters, modes far apart, tails crossing near (0, 5):
  // the midpoint of the centers sits in empty space while the true
  // intersection lives off-axis on the tails.
  const double invsq2 = 1.0 / std::sqrt(2.0);
  Scenario s;
  s.name = "skewed-tails";
  s.dim = 2;
  s.seed = seed;
  s.attributes = {
      {"sentiment", "positive", 2000, {skewed({-5.0, 0.0}, 1.0, {invsq2, invsq2}, 1.5)}},
      {"topic", "world", 2000, {skewed({5.0, 0.0}, 1.0, {-invsq2, invsq2}, 1.5)}},
  };
  return s;
}

Scenario three_aspect_scenario(std::uint64_t seed, std::size_t dim) {
  if (dim == 0) dim = 8;
  require(dim == 8 || dim == 768, "three-aspect preset supports dim 8 or 768");
  // sentiment(2) + topic(4) + toxicity(1); 10k points per aspect. Each
  // aspect lives at its own global offset (the cross-dataset domain gap);
  // attributes separate inside an aspect along later axes.
  const double gap = 6.0;
  const double attr_sep = 3.0;
  const double var = 0.25;  // sigma 0.5
  struct A {
    const char* aspect;
    const char* attr;
    std::size_t count;
    std::size_t aspect_ix;
    std::size_t attr_ix;
  };
  const std::vector<A> layout = {
      {"sentiment", "positive", 5000, 0, 0}, {"sentiment", "negative", 5000, 0, 1},
      {"topic", "world", 2500, 1, 0},        {"topic", "sports", 2500, 1, 1},
      {"topic", "business", 2500, 1, 2},     {"topic", "scitech", 2500, 1, 3},
      {"toxicity", "nontoxic", 10000, 2, 0},
  };
  // aspect offsets: three directions 120 degrees apart in the (0,1) plane
  const double ang[3] = {0.0, 2.0 * std::numbers::pi / 3.0, 4.0 * std::numbers::pi / 3.0};

  Scenario s;
  s.name = "three-aspect";
  s.dim = dim;
  s.seed = seed;
  for (const auto& a : layout) {
    std::vector<double> mean(dim, 0.0);
    mean[0] = gap * std::cos(ang[a.aspect_ix]);
    mean[1] = gap * std::sin(ang[a.aspect_ix]);
    mean[2 + a.attr_ix] += attr_sep;
    s.attributes.push_back({a.aspect, a.attr, a.count, {isotropic(std::move(mean), var)}});
  }
  return s;
}

}  // namespace

Scenario preset_scenario(const std::string& name, std::uint64_t seed, std::size_t dim) {
  if (name == "symmetric-overlap") {
    Scenario s;
    s.name = name;
    s.dim = 2;
    s.seed = seed;
    s.attributes = {
        {"sentiment", "positive", 1000, {isotropic({-1.5, 0.0}, 1.0)}},
        {"topic", "world", 1000, {isotropic({1.5, 0.0}, 1.0)}},
    };
    return s;
  }
  if (name == "skewed-tails") return skewed_tails_scenario(seed);
  if (name == "noise-contaminated") {
    Scenario s = skewed_tails_scenario(seed);
    s.name = "noise-contaminated";
    s.rho = 0.05;
    return s;
  }
  if (name == "three-aspect") return three_aspect_scenario(seed, dim);
  throw ValidationError("unknown scenario preset '" + name +
                        "' (symmetric-overlap|skewed-tails|noise-contaminated|three-aspect)");
}

Scenario scenario_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError(path + ": bad JSON: " + std::string(e.what()));
  }

  Scenario s;
  try {
    s.name = j.value("name", std::string("custom"));
    s.dim = j.at("dim").get<std::size_t>();
    s.rho = j.value("rho", 0.0);
    s.seed = j.value("seed", 0ull);
    for (const auto& ja : j.at("attributes")) {
      AttributeSpec a;
      a.aspect = ja.at("aspect").get<std::string>();
      a.attribute = ja.at("attribute").get<std::string>();
      a.count = ja.at("count").get<std::size_t>();
      for (const auto& jc : ja.at("components")) {
        SamplerSpec c;
        const auto kind = jc.at("kind").get<std::string>();
        if (kind == "gaussian")
          c.kind = SamplerSpec::Kind::gaussian;
        else if (kind == "skewed")
          c.kind = SamplerSpec::Kind::skewed;
        else
          throw ValidationError("unknown component kind '" + kind + "'");
        c.weight = jc.value("weight", 1.0);
        c.mean = jc.at("mean").get<std::vector<double>>();
        if (c.kind == SamplerSpec::Kind::gaussian) {
          if (jc.contains("cov")) {
            c.cov = jc.at("cov").get<std::vector<double>>();
          } else {
            const double var = jc.value("var", 1.0);
            c.cov = identity_cov(c.mean.size(), var);
          }
        } else {
          c.scale = jc.value("scale", 1.0);
          c.skew_dir = jc.at("skew_dir").get<std::vector<double>>();
          c.kappa = jc.value("kappa", 0.0);
        }
        a.components.push_back(std::move(c));
      }
      s.attributes.push_back(std::move(a));
    }
  } catch (const nlohmann::json::exception& e) {
    // missing keys / wrong shapes (e.g. nested cov instead of flat)
    throw ValidationError(path + ": " + std::string(e.what()));
  }
  return s;
}

}  // namespace attrspace
