#include "attrspace/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "attrspace/common.hpp"

namespace attrspace {

namespace {

constexpr std::size_t kJacobiMaxDim = 128;
constexpr double kEigTol = 1e-10;
constexpr std::size_t kEigMaxIter = 10000;

// covariance of mean-centered points, 1/n normalization
Mat covariance(const Mat& pts, std::vector<double>& mean) {
  const std::size_t n = pts.rows, d = pts.cols;
  std::vector<std::uint32_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<std::uint32_t>(i);
  mean = mean_rows(pts.a.data(), d, all);
  Mat cov(d, d);
  std::vector<double> c(d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = pts.row(i);
    for (std::size_t j = 0; j < d; ++j) c[j] = r[j] - mean[j];
    for (std::size_t j = 0; j < d; ++j) {
      double* covj = cov.row(j);
      const double cj = c[j];
      for (std::size_t k = j; k < d; ++k) covj[k] += cj * c[k];
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j; k < d; ++k) {
      cov.at(j, k) *= inv;
      cov.at(k, j) = cov.at(j, k);
    }
  return cov;
}

// cyclic Jacobi; returns eigenvalues, V's columns are eigenvectors
std::vector<double> jacobi_eig(Mat a, Mat& v) {
  const std::size_t d = a.rows;
  v = Mat(d, d);
  for (std::size_t i = 0; i < d; ++i) v.at(i, i) = 1.0;
  for (std::size_t sweep = 0; sweep < kEigMaxIter; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += a.at(p, q) * a.at(p, q);
    if (off <= kEigTol * kEigTol) break;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a.at(p, q);
        if (apq == 0.0) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v.at(k, p), vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * vkq;
          v.at(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<double> eig(d);
  for (std::size_t i = 0; i < d; ++i) eig[i] = a.at(i, i);
  return eig;
}

// dominant eigenpair by power iteration; A modified by deflation outside
std::pair<double, std::vector<double>> power_iter(const Mat& a, std::uint64_t salt) {
  const std::size_t d = a.rows;
  // deterministic start: a fixed pseudo-random-ish direction, salt per call
  std::vector<double> v(d);
  for (std::size_t i = 0; i < d; ++i)
    v[i] = std::sin(static_cast<double>(i + 1) * 0.7548776662 +
                    static_cast<double>(salt) * 1.3247179572);
  double nv = norm2(v.data(), d);
  for (double& x : v) x /= nv;
  std::vector<double> w(d);
  double lambda = 0.0;
  for (std::size_t it = 0; it < kEigMaxIter; ++it) {
    for (std::size_t i = 0; i < d; ++i) w[i] = dot(a.row(i), v.data(), d);
    const double nw = norm2(w.data(), d);
    if (nw == 0.0) return {0.0, v};  // in the null space already
    for (double& x : w) x /= nw;
    double diff = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      // eigenvectors are sign-ambiguous; compare up to sign
      const double dd = std::fabs(w[i]) - std::fabs(v[i]);
      diff += dd * dd;
    }
    v = w;
    lambda = nw;
    if (std::sqrt(diff) < kEigTol) break;
  }
  // Rayleigh quotient for the signed eigenvalue
  for (std::size_t i = 0; i < d; ++i) w[i] = dot(a.row(i), v.data(), d);
  lambda = dot(v.data(), w.data(), d);
  return {lambda, v};
}

void fix_sign(std::vector<double>& c) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < c.size(); ++i)
    if (std::fabs(c[i]) > std::fabs(c[arg])) arg = i;
  if (c[arg] < 0.0)
    for (double& x : c) x = -x;
}

}  // namespace

Projection pca_fit(const Mat& points, std::size_t out_dims) {
  require(points.rows >= 2, "pca: need at least 2 points");
  require(out_dims >= 1 && out_dims <= points.cols, "pca: out_dims out of range");
  require(all_finite({points.a.data(), points.a.size()}), "pca: non-finite input");
  const std::size_t d = points.cols;

  Projection pr;
  Mat cov = covariance(points, pr.mean);

  std::vector<std::pair<double, std::vector<double>>> pairs;  // (eigenvalue, vector)
  if (d <= kJacobiMaxDim) {
    Mat v;
    std::vector<double> eig = jacobi_eig(cov, v);
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<double> col(d);
      for (std::size_t k = 0; k < d; ++k) col[k] = v.at(k, i);
      pairs.emplace_back(eig[i], std::move(col));
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });
    pairs.resize(out_dims);
  } else {
    Mat work = cov;
    for (std::size_t c = 0; c < out_dims; ++c) {
      auto [lam, vec] = power_iter(work, c);
      // deflate: work -= lam v v^T
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) work.at(i, j) -= lam * vec[i] * vec[j];
      pairs.emplace_back(lam, std::move(vec));
    }
  }

  // eigenvalues of a covariance are >= 0 up to round-off; clamp and detect
  // rank deficiency
  const double scale = std::max(std::fabs(pairs[0].first), 1.0);
  for (auto& [lam, vec] : pairs) {
    if (lam <= kEigTol * scale) {
      lam = 0.0;
      std::fill(vec.begin(), vec.end(), 0.0);
      pr.rank_deficient = true;
    } else {
      fix_sign(vec);
    }
    pr.explained.push_back(std::max(lam, 0.0));
    pr.comp.push_back(std::move(vec));
  }
  return pr;
}

std::vector<double> pca_project_point(const Projection& p, std::span<const double> x) {
  require(x.size() == p.mean.size(), "pca_project: dimension mismatch");
  std::vector<double> c(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) c[j] = x[j] - p.mean[j];
  std::vector<double> out(p.comp.size());
  for (std::size_t k = 0; k < p.comp.size(); ++k)
    out[k] = dot(c.data(), p.comp[k].data(), c.size());
  return out;
}

Mat pca_project(const Projection& p, const Mat& points) {
  require(points.cols == p.mean.size(), "pca_project: dimension mismatch");
  Mat out(points.rows, p.comp.size());
  for (std::size_t i = 0; i < points.rows; ++i) {
    const auto row = pca_project_point(p, points.row_span(i));
    std::copy(row.begin(), row.end(), out.row(i));
  }
  return out;
}

double DensityGrid::mass() const {
  double s = 0.0;
  for (const double x : density) s += x;
  return s * cell_area();
}

std::pair<std::size_t, std::size_t> DensityGrid::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < density.size(); ++i)
    if (density[i] > density[best]) best = i;
  return {best % res[0], best / res[0]};
}

DensityGrid kde2d(const Mat& points2d, std::size_t res_x, std::size_t res_y, Bandwidth bw,
                  const double* lo_in, const double* hi_in, std::size_t threads) {
  require(points2d.rows >= 2, "kde: need at least 2 points");
  require(points2d.cols == 2, "kde: points must be 2d");
  require(res_x >= 1 && res_y >= 1, "kde: resolution must be >= 1");
  require(all_finite({points2d.a.data(), points2d.a.size()}), "kde: non-finite input");

  const std::size_t n = points2d.rows;
  DensityGrid g;
  g.res[0] = res_x;
  g.res[1] = res_y;

  for (int ax = 0; ax < 2; ++ax) {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = points2d.at(i, ax);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      s += v;
    }
    const double mean = s / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = points2d.at(i, ax) - mean;
      var += c * c;
    }
    var /= static_cast<double>(n - 1);
    double h;
    if (bw.scott) {
      h = std::sqrt(var) * std::pow(static_cast<double>(n), -1.0 / 6.0);
    } else {
      require(bw.fixed > 0.0, "kde: fixed bandwidth must be > 0");
      h = bw.fixed;
    }
    if (h <= 0.0) {  // degenerate axis: clamp to a sliver of the range
      const double range = mx - mn;
      h = 1e-6 * (range > 0.0 ? range : 1.0);
      g.clamped_bandwidth = true;
    }
    g.bandwidth[ax] = h;
    g.lo[ax] = lo_in ? lo_in[ax] : mn - 4.0 * h;
    g.hi[ax] = hi_in ? hi_in[ax] : mx + 4.0 * h;
    require(g.hi[ax] > g.lo[ax], "kde: empty bounds on axis " + std::to_string(ax));
  }

  // separable product kernel: density = (1/n) Kx Ky^T with Gaussian factors,
  // so the grid costs O(n*(rx+ry)) + O(rx*ry*n) multiply-adds instead of a
  // per-cell loop over points with exp() inside
  Mat kx(res_x, n), ky(res_y, n);
  const double dx = (g.hi[0] - g.lo[0]) / static_cast<double>(res_x);
  const double dy = (g.hi[1] - g.lo[1]) / static_cast<double>(res_y);
  auto fill_factor = [&](Mat& k, int ax, double lo, double delta) {
    const double h = g.bandwidth[ax];
    const double norm = 1.0 / (h * std::sqrt(2.0 * 3.14159265358979323846));
    for (std::size_t i = 0; i < k.rows; ++i) {
      const double x = lo + (static_cast<double>(i) + 0.5) * delta;
      double* row = k.row(i);
      for (std::size_t p = 0; p < n; ++p) {
        const double z = (x - points2d.at(p, ax)) / h;
        row[p] = norm * std::exp(-0.5 * z * z);
      }
    }
  };
  fill_factor(kx, 0, g.lo[0], dx);
  fill_factor(ky, 1, g.lo[1], dy);

  g.density.assign(res_x * res_y, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t nt = resolve_threads(threads);
  parallel_for(0, res_y, nt, [&](std::size_t ylo, std::size_t yhi) {
    for (std::size_t iy = ylo; iy < yhi; ++iy) {
      const double* kyr = ky.row(iy);
      double* out = g.density.data() + iy * res_x;
      for (std::size_t ix = 0; ix < res_x; ++ix)
        out[ix] = inv_n * dot(kx.row(ix), kyr, n);
    }
  });
  return g;
}

CentersReport centers_report(const AttributeSpace& space) {
  const auto& schema = space.schema();
  const std::size_t na = schema.aspects.size();
  require(space.size() > 0, "centers: empty space");

  CentersReport rep;
  rep.attr_center.resize(na);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t t = 0; t < schema.attributes[a].size(); ++t)
      rep.attr_center[a].push_back(attribute_center(space, space.ordinals(a, t)));
  for (std::size_t a = 0; a < na; ++a) {
    const auto ords = space.aspect_ordinals(static_cast<std::uint16_t>(a));
    require(!ords.empty(), "centers: aspect '" + schema.aspects[a] + "' has no points");
    rep.aspect_center.push_back(mean_rows(space.data(), space.dim(), ords));
  }
  rep.aspect_dist = Mat(na, na);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = a + 1; b < na; ++b) {
      const double dist =
          euclid(rep.aspect_center[a].data(), rep.aspect_center[b].data(), space.dim());
      rep.aspect_dist.at(a, b) = dist;
      rep.aspect_dist.at(b, a) = dist;
      rep.gap_sum += dist;
    }
  return rep;
}

namespace {

nlohmann::ordered_json grid_to_json(const DensityGrid& g) {
  nlohmann::ordered_json j;
  j["lo"] = {g.lo[0], g.lo[1]};
  j["hi"] = {g.hi[0], g.hi[1]};
  j["res"] = {g.res[0], g.res[1]};
  j["bandwidth"] = {g.bandwidth[0], g.bandwidth[1]};
  j["clamped_bandwidth"] = g.clamped_bandwidth;
  j["density"] = g.density;
  return j;
}

nlohmann::ordered_json mat_to_json(const Mat& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < m.cols; ++j) r.push_back(m.at(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

void export_analysis(const AnalysisBundle& bundle, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "attrspace-analysis";
  j["version"] = 1;
  j["projection"]["mean"] = bundle.projection.mean;
  j["projection"]["components"] = bundle.projection.comp;
  j["projection"]["explained_variance"] = bundle.projection.explained;
  j["projection"]["rank_deficient"] = bundle.projection.rank_deficient;
  j["scatters"] = nlohmann::ordered_json::object();
  for (const auto& [name, pts] : bundle.scatters) j["scatters"][name] = mat_to_json(pts);
  j["densities"] = nlohmann::ordered_json::object();
  for (const auto& [name, g] : bundle.densities) j["densities"][name] = grid_to_json(g);
  j["overlays"] = nlohmann::ordered_json::object();
  for (const auto& [name, pt] : bundle.overlays) j["overlays"][name] = pt;

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failure on '" + path + "'");
}

}  // namespace attrspace
