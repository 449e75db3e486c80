#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attrspace/rng.hpp"
#include "attrspace/space.hpp"

namespace attrspace {

struct SamplerSpec {
  enum class Kind { gaussian, skewed };
  Kind kind = Kind::gaussian;
  double weight = 1.0;  // mixture weight
  std::vector<double> mean;
  // gaussian
  std::vector<double> cov;  // d*d row-major
  // skewed
  double scale = 1.0;
  std::vector<double> skew_dir;
  double kappa = 0.0;
};

struct AttributeSpec {
  std::string aspect;
  std::string attribute;
  std::size_t count = 0;
  std::vector<SamplerSpec> components;
};

struct Scenario {
  std::string name = "custom";
  std::size_t dim = 0;
  std::vector<AttributeSpec> attributes;
  double rho = 0.0;  // label-noise fraction
  std::uint64_t seed = 0;

  void validate() const;
};

// Presets: symmetric-overlap, skewed-tails, noise-contaminated,
// three-aspect. `dim` is honored by three-aspect only (8 or 768; 0 -> 8);
// the 2-d presets ignore it.
Scenario preset_scenario(const std::string& name, std::uint64_t seed, std::size_t dim = 0);

Scenario scenario_from_json_file(const std::string& path);

std::vector<std::vector<double>> sample_gaussian(std::size_t n, const std::vector<double>& mean,
                                                 const std::vector<double>& cov,
                                                 std::uint64_t seed);

std::vector<std::vector<double>> sample_skewed(std::size_t n, const std::vector<double>& mean,
                                               double scale, const std::vector<double>& skew_dir,
                                               double kappa, std::uint64_t seed);

AttributeSpace build_scenario(const Scenario& scenario);

// Lower Cholesky factor of a symmetric positive-definite matrix
// (row-major d*d). Throws on asymmetry or non-SPD.
std::vector<double> cholesky(const std::vector<double>& cov, std::size_t d);

}  // namespace attrspace
