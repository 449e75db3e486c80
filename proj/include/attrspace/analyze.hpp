#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attrspace/space.hpp"
#include "attrspace/vecmath.hpp"

namespace attrspace {

struct Projection {
  std::vector<double> mean;                 // d
  std::vector<std::vector<double>> comp;    // out_dims orthonormal d-vectors
  std::vector<double> explained;            // matching eigenvalues, descending
  bool rank_deficient = false;              // some components are zero vectors
};

// Top principal components of the mean-centered covariance. Symmetric
// eigensolve: cyclic Jacobi for d <= 128, power iteration with deflation
// (tol 1e-10, max 1e4 sweeps) above. Component signs are fixed so the
// largest-magnitude coordinate is positive.
Projection pca_fit(const Mat& points, std::size_t out_dims = 2);

std::vector<double> pca_project_point(const Projection& p, std::span<const double> x);
Mat pca_project(const Projection& p, const Mat& points);

struct Bandwidth {
  bool scott = true;   // h_j = sigma_j * n^(-1/6)
  double fixed = 0.0;  // used when scott == false
};

struct DensityGrid {
  double lo[2] = {0, 0}, hi[2] = {0, 0};  // bounds per axis
  std::size_t res[2] = {0, 0};
  double bandwidth[2] = {0, 0};
  bool clamped_bandwidth = false;  // a zero-variance axis was clamped
  std::vector<double> density;     // row-major, res[1] rows x res[0] cols

  double cell_area() const {
    return (hi[0] - lo[0]) / static_cast<double>(res[0]) * (hi[1] - lo[1]) /
           static_cast<double>(res[1]);
  }
  double at(std::size_t ix, std::size_t iy) const { return density[iy * res[0] + ix]; }
  double mass() const;
  // cell whose density is largest; first in row-major order on ties
  std::pair<std::size_t, std::size_t> argmax() const;
};

// Product-Gaussian KDE of 2d points on a regular grid. Bounds default to
// the data range padded by 4 bandwidths per axis (pass lo/hi to override).
// Evaluated at cell centers lo + (i + 0.5) * delta.
DensityGrid kde2d(const Mat& points2d, std::size_t res_x = 200, std::size_t res_y = 200,
                  Bandwidth bw = {}, const double* lo = nullptr, const double* hi = nullptr,
                  std::size_t threads = 0);

struct CentersReport {
  // flattened per-aspect attribute centers: attr_center[a][t] has dim d
  std::vector<std::vector<std::vector<double>>> attr_center;
  std::vector<std::vector<double>> aspect_center;  // per aspect
  Mat aspect_dist;                                 // pairwise aspect-center distances
  double gap_sum = 0.0;                            // sum over unordered pairs
};

CentersReport centers_report(const AttributeSpace& space);

// Everything a plotter needs for the overlay figures, one JSON file.
struct AnalysisBundle {
  Projection projection;
  // per attribute: label "aspect/attribute" and projected 2d scatter
  std::vector<std::pair<std::string, Mat>> scatters;
  std::vector<std::pair<std::string, DensityGrid>> densities;
  // named single points (searched intersection, baseline, grid oracle, ...)
  std::vector<std::pair<std::string, std::vector<double>>> overlays;
};

void export_analysis(const AnalysisBundle& bundle, const std::string& path);

}  // namespace attrspace
