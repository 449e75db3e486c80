#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "attrspace/rng.hpp"
#include "attrspace/space.hpp"
#include "attrspace/vecmath.hpp"

namespace attrspace {

struct LossWeights {
  double w1 = 0.5;  // reconstruction
  double w2 = 0.2;  // classification
  double w3 = 0.3;  // aspect gap

  void validate() const;
};

struct ModelDims {
  std::size_t D = 0;   // input
  std::size_t d = 0;   // latent
  std::size_t h = 32;  // encoder hidden
  std::size_t h2 = 32; // decoder hidden
};

// Parameter blocks; Grads shares the layout. Block names are stable API
// (grad reports, serialization, fault injection).
struct ModelParams {
  Mat enc_w1, enc_w2;                 // h x D, d x h
  std::vector<double> enc_b1, enc_b2;
  Mat dec_v1, dec_v2;                 // h2 x d, D x h2
  std::vector<double> dec_c1, dec_c2;
  std::vector<Mat> cls_w;             // per aspect: |A_t| x d
  std::vector<std::vector<double>> cls_b;

  void for_each_block(const std::function<void(const std::string&, std::vector<double>&)>& f);
  void for_each_block(
      const std::function<void(const std::string&, const std::vector<double>&)>& f) const;
};

struct ToyModel {
  ModelDims dims;
  double lambda = 1e-3;
  AttributeSchema schema;  // aspect order fixes classifier order
  ModelParams p;

  std::size_t aspect_count() const { return schema.aspects.size(); }
};

ToyModel init_model(const AttributeSchema& schema, ModelDims dims, double lambda,
                    std::uint64_t seed);

using Grads = ModelParams;
Grads zero_grads(const ToyModel& m);

struct AspectMemory {
  std::vector<std::vector<double>> center;  // per aspect, dim d
  std::vector<char> initialized;

  static AspectMemory empty(std::size_t aspects, std::size_t d);
};

// Single-aspect minibatch view.
struct Batch {
  Mat x;                             // B x D inputs
  std::uint16_t aspect = 0;
  std::vector<std::uint16_t> label;  // within-aspect attribute ordinals

  std::size_t size() const { return x.rows; }
};

Batch make_batch(const AttributeSpace& space, std::span<const std::uint32_t> ordinals);

struct TrainConfig {
  std::size_t epochs = 150;
  std::size_t batch_size = 128;
  double lr = 1e-4;
  double momentum = 0.9;
  double lambda = 1e-3;
  LossWeights weights;
  std::uint64_t seed = 0;
  ModelDims dims;  // D filled from data

  void validate() const;
};

// ---- losses (each also usable standalone, for oracle tests) ----

std::vector<double> encode(const ToyModel& m, std::span<const double> x);
Mat encode_batch(const ToyModel& m, const Mat& x);

std::vector<double> perturb(std::span<const double> h, double lambda, RngStream& noise);

double loss_recon(const ToyModel& m, const Mat& h_perturbed, const Mat& x);

// Sum of cross-entropies under each row's own aspect head. labels:
// (aspect, within-aspect attribute) per row; mixed aspects allowed here
// (the sum decomposes), only total_loss insists on single-aspect batches.
// total_loss divides its classification term by the batch size.
double loss_cls(const ToyModel& m, const Mat& latents,
                const std::vector<std::pair<std::uint16_t, std::uint16_t>>& labels);

// Sum over unordered aspect pairs of the distance between latent means.
double loss_gap_exact(const std::vector<Mat>& latents_by_aspect);

// Batch approximation: distance from this batch's latent mean to every
// other initialized stored center; then the aspect's center is overwritten.
double loss_gap_batch(const Mat& latents, std::uint16_t aspect, AspectMemory& memory);

struct TotalLoss {
  double value = 0.0;
  double recon = 0.0, cls = 0.0, gap = 0.0;
};

// Forward + analytic reverse pass. `eps` is the B*d perturbation noise
// (caller-drawn so checks can freeze it); grads may be null. Memory is
// read for the gap term and then updated with this batch's latent mean.
TotalLoss total_loss(const ToyModel& m, const Batch& batch, AspectMemory& memory,
                     const LossWeights& w, const double* eps, Grads* grads);

// Convenience: draws eps from the stream (B*d normals).
TotalLoss total_loss(const ToyModel& m, const Batch& batch, AspectMemory& memory,
                     const LossWeights& w, RngStream& noise, Grads* grads);

// ---- training ----

struct TrainResult {
  ToyModel model;
  AttributeSpace latents;
  std::vector<double> epoch_loss;  // mean total loss per epoch
  std::size_t steps = 0;
};

TrainResult train(const AttributeSpace& data, const TrainConfig& config);
TrainResult train(const AttributeSpace& data, ToyModel model, const TrainConfig& config);

// Fraction of points whose own-aspect classifier head picks the true
// attribute; one entry per aspect (ordinal order).
std::vector<double> classifier_accuracy(const ToyModel& m, const AttributeSpace& data);

// Deterministic split: for each attribute, every ordinal with
// (position % k == which) goes to the second space. Used for held-out
// evaluation without disturbing per-attribute balance.
std::pair<AttributeSpace, AttributeSpace> split_space(const AttributeSpace& space, std::size_t k,
                                                      std::size_t which);

// ---- verification ----

struct GradCheckBlock {
  std::string name;
  double max_rel_err = 0.0;
  bool pass = true;
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;
  bool pass = true;
};

// Central finite differences against the analytic gradients, frozen noise.
// `corrupt_block`, if non-empty, perturbs that analytic block first (fault
// injection hook for the check suite).
GradCheckReport grad_check(const ToyModel& m, const Batch& batch, const AspectMemory& memory,
                           const LossWeights& w, std::uint64_t noise_seed, double step = 1e-5,
                           double tol = 1e-3, const std::string& corrupt_block = "");

void save_model(const ToyModel& m, const std::string& path);
ToyModel load_model(const std::string& path);

}  // namespace attrspace
