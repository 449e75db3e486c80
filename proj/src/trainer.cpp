#include "attrspace/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "attrspace/wire.hpp"

namespace attrspace {

void LossWeights::validate() const {
  require(w1 >= 0.0 && w2 >= 0.0 && w3 >= 0.0, "loss weights must be >= 0");
  require(w1 + w2 + w3 > 0.0, "loss weights must not all be zero");
}

void TrainConfig::validate() const {
  require(epochs >= 1, "train: epochs must be >= 1");
  require(batch_size >= 2, "train: batch size must be >= 2");
  require(lr >= 0.0, "train: learning rate must be >= 0");
  require(momentum >= 0.0 && momentum < 1.0, "train: momentum must lie in [0, 1)");
  require(lambda >= 0.0, "train: lambda must be >= 0");
  weights.validate();
}

void ModelParams::for_each_block(
    const std::function<void(const std::string&, std::vector<double>&)>& f) {
  f("enc.w1", enc_w1.a);
  f("enc.b1", enc_b1);
  f("enc.w2", enc_w2.a);
  f("enc.b2", enc_b2);
  f("dec.v1", dec_v1.a);
  f("dec.c1", dec_c1);
  f("dec.v2", dec_v2.a);
  f("dec.c2", dec_c2);
  for (std::size_t t = 0; t < cls_w.size(); ++t) {
    f("cls[" + std::to_string(t) + "].w", cls_w[t].a);
    f("cls[" + std::to_string(t) + "].b", cls_b[t]);
  }
}

void ModelParams::for_each_block(
    const std::function<void(const std::string&, const std::vector<double>&)>& f) const {
  const_cast<ModelParams*>(this)->for_each_block(
      [&](const std::string& n, std::vector<double>& v) { f(n, v); });
}

ToyModel init_model(const AttributeSchema& schema, ModelDims dims, double lambda,
                    std::uint64_t seed) {
  schema.validate();
  require(dims.D >= 1 && dims.d >= 1 && dims.h >= 1 && dims.h2 >= 1,
          "model dims must all be >= 1");
  require(lambda >= 0.0, "lambda must be >= 0");

  ToyModel m;
  m.dims = dims;
  m.lambda = lambda;
  m.schema = schema;

  m.p.enc_w1 = Mat(dims.h, dims.D);
  m.p.enc_b1.assign(dims.h, 0.0);
  m.p.enc_w2 = Mat(dims.d, dims.h);
  m.p.enc_b2.assign(dims.d, 0.0);
  m.p.dec_v1 = Mat(dims.h2, dims.d);
  m.p.dec_c1.assign(dims.h2, 0.0);
  m.p.dec_v2 = Mat(dims.D, dims.h2);
  m.p.dec_c2.assign(dims.D, 0.0);
  for (std::size_t t = 0; t < schema.aspects.size(); ++t) {
    m.p.cls_w.emplace_back(schema.attributes[t].size(), dims.d);
    m.p.cls_b.emplace_back(schema.attributes[t].size(), 0.0);
  }

  // N(0, 1/fan_in) weights, zero biases; one stream, fixed block order
  RngStream g(seed, {rng_tag::param_init});
  auto fill = [&](Mat& w, std::size_t fan_in) {
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& x : w.a) x = s * g.normal();
  };
  fill(m.p.enc_w1, dims.D);
  fill(m.p.enc_w2, dims.h);
  fill(m.p.dec_v1, dims.d);
  fill(m.p.dec_v2, dims.h2);
  for (auto& cw : m.p.cls_w) fill(cw, dims.d);
  return m;
}

Grads zero_grads(const ToyModel& m) {
  Grads g = m.p;
  g.for_each_block([](const std::string&, std::vector<double>& v) {
    std::fill(v.begin(), v.end(), 0.0);
  });
  return g;
}

AspectMemory AspectMemory::empty(std::size_t aspects, std::size_t d) {
  AspectMemory mem;
  mem.center.assign(aspects, std::vector<double>(d, 0.0));
  mem.initialized.assign(aspects, 0);
  return mem;
}

Batch make_batch(const AttributeSpace& space, std::span<const std::uint32_t> ordinals) {
  require(!ordinals.empty(), "batch: empty ordinal list");
  Batch b;
  b.aspect = space.aspect_of(ordinals[0]);
  b.x = Mat(ordinals.size(), space.dim());
  b.label.reserve(ordinals.size());
  for (std::size_t i = 0; i < ordinals.size(); ++i) {
    require(space.aspect_of(ordinals[i]) == b.aspect, "batch: mixed-aspect batch rejected");
    b.label.push_back(space.attribute_of(ordinals[i]));
    std::copy_n(space.point(ordinals[i]).data(), space.dim(), b.x.row(i));
  }
  return b;
}

// ---- forward helpers -------------------------------------------------------

namespace {

// y = x * w^T + b, row-major everywhere
Mat linear(const Mat& x, const Mat& w, const std::vector<double>& b) {
  Mat y(x.rows, w.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double* xi = x.row(i);
    double* yi = y.row(i);
    for (std::size_t o = 0; o < w.rows; ++o) yi[o] = b[o] + dot(xi, w.row(o), x.cols);
  }
  return y;
}

void tanh_inplace(Mat& m) {
  for (double& x : m.a) x = std::tanh(x);
}

// dx += dy * w ; dw += dy^T * x ; db += column sums of dy
void linear_backward(const Mat& x, const Mat& w, const Mat& dy, Mat* dx, Mat& dw,
                     std::vector<double>& db) {
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double* dyi = dy.row(i);
    const double* xi = x.row(i);
    for (std::size_t o = 0; o < w.rows; ++o) {
      const double g = dyi[o];
      db[o] += g;
      double* dwo = dw.row(o);
      for (std::size_t j = 0; j < x.cols; ++j) dwo[j] += g * xi[j];
    }
    if (dx) {
      double* dxi = dx->row(i);
      for (std::size_t o = 0; o < w.rows; ++o) {
        const double g = dyi[o];
        const double* wo = w.row(o);
        for (std::size_t j = 0; j < x.cols; ++j) dxi[j] += g * wo[j];
      }
    }
  }
}

// through tanh: da = dz (1 - z^2), z already tanh'd
void tanh_backward(const Mat& z, Mat& dz) {
  for (std::size_t i = 0; i < z.a.size(); ++i) dz.a[i] *= 1.0 - z.a[i] * z.a[i];
}

// Same accumulation order and same multiply-by-reciprocal as mean_rows, so
// centers computed here and by the analysis code agree bit for bit.
std::vector<double> row_mean(const Mat& m) {
  std::vector<double> c(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* r = m.row(i);
    for (std::size_t j = 0; j < m.cols; ++j) c[j] += r[j];
  }
  const double inv = 1.0 / static_cast<double>(m.rows);
  for (double& x : c) x *= inv;
  return c;
}

}  // namespace

std::vector<double> encode(const ToyModel& m, std::span<const double> x) {
  require(x.size() == m.dims.D, "encode: input dimension mismatch");
  Mat xm(1, m.dims.D);
  std::copy_n(x.data(), x.size(), xm.a.data());
  Mat z1 = linear(xm, m.p.enc_w1, m.p.enc_b1);
  tanh_inplace(z1);
  Mat h = linear(z1, m.p.enc_w2, m.p.enc_b2);
  return h.a;
}

Mat encode_batch(const ToyModel& m, const Mat& x) {
  require(x.cols == m.dims.D, "encode: input dimension mismatch");
  Mat z1 = linear(x, m.p.enc_w1, m.p.enc_b1);
  tanh_inplace(z1);
  return linear(z1, m.p.enc_w2, m.p.enc_b2);
}

std::vector<double> perturb(std::span<const double> h, double lambda, RngStream& noise) {
  require(lambda >= 0.0, "perturb: lambda must be >= 0");
  std::vector<double> out(h.begin(), h.end());
  for (double& x : out) x += lambda * noise.normal();
  return out;
}

double loss_recon(const ToyModel& m, const Mat& h_perturbed, const Mat& x) {
  require(h_perturbed.cols == m.dims.d, "loss_recon: latent dimension mismatch");
  require(x.cols == m.dims.D && x.rows == h_perturbed.rows, "loss_recon: target shape mismatch");
  Mat z2 = linear(h_perturbed, m.p.dec_v1, m.p.dec_c1);
  tanh_inplace(z2);
  Mat y = linear(z2, m.p.dec_v2, m.p.dec_c2);
  double s = 0.0;
  for (std::size_t i = 0; i < y.a.size(); ++i) {
    const double r = y.a[i] - x.a[i];
    s += r * r;
  }
  return s / static_cast<double>(y.a.size());
}

namespace {

// log-softmax row + cross-entropy; optionally writes (p - onehot) into dlogits
double xent_row(const double* logits, std::size_t n, std::size_t label, double* dlogits) {
  double mx = logits[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) z += std::exp(logits[i] - mx);
  const double logz = std::log(z);
  if (dlogits)
    for (std::size_t i = 0; i < n; ++i)
      dlogits[i] = std::exp(logits[i] - mx) / z - (i == label ? 1.0 : 0.0);
  return -(logits[label] - mx - logz);
}

}  // namespace

double loss_cls(const ToyModel& m, const Mat& latents,
                const std::vector<std::pair<std::uint16_t, std::uint16_t>>& labels) {
  require(latents.rows == labels.size(), "loss_cls: label count mismatch");
  require(latents.cols == m.dims.d, "loss_cls: latent dimension mismatch");
  double s = 0.0;
  std::vector<double> logits;
  for (std::size_t i = 0; i < latents.rows; ++i) {
    const auto [a, t] = labels[i];
    require(a < m.aspect_count(), "loss_cls: unknown aspect ordinal");
    const Mat& cw = m.p.cls_w[a];
    require(t < cw.rows, "loss_cls: unknown attribute ordinal");
    logits.assign(cw.rows, 0.0);
    for (std::size_t o = 0; o < cw.rows; ++o)
      logits[o] = m.p.cls_b[a][o] + dot(latents.row(i), cw.row(o), latents.cols);
    s += xent_row(logits.data(), logits.size(), t, nullptr);
  }
  return s;  // unnormalized sum: decomposes exactly across sub-batches
}

double loss_gap_exact(const std::vector<Mat>& latents_by_aspect) {
  require(latents_by_aspect.size() >= 2, "loss_gap_exact: need at least two aspects");
  std::vector<std::vector<double>> centers;
  for (const auto& m : latents_by_aspect) {
    require(m.rows >= 1, "loss_gap_exact: empty aspect group");
    centers.push_back(row_mean(m));
  }
  double s = 0.0;
  for (std::size_t t1 = 0; t1 < centers.size(); ++t1)
    for (std::size_t t2 = t1 + 1; t2 < centers.size(); ++t2)
      s += euclid(centers[t1].data(), centers[t2].data(), centers[t1].size());
  return s;
}

double loss_gap_batch(const Mat& latents, std::uint16_t aspect, AspectMemory& memory) {
  require(latents.rows >= 1, "loss_gap_batch: empty batch");
  require(aspect < memory.center.size(), "loss_gap_batch: aspect out of range");
  const std::vector<double> c = row_mean(latents);
  double s = 0.0;
  for (std::size_t t = 0; t < memory.center.size(); ++t) {
    if (t == aspect || !memory.initialized[t]) continue;
    s += euclid(c.data(), memory.center[t].data(), c.size());
  }
  memory.center[aspect] = c;
  memory.initialized[aspect] = 1;
  return s;
}

TotalLoss total_loss(const ToyModel& m, const Batch& batch, AspectMemory& memory,
                     const LossWeights& w, const double* eps, Grads* grads) {
  w.validate();
  const std::size_t B = batch.size();
  const std::size_t D = m.dims.D, d = m.dims.d;
  require(B >= 1, "total_loss: empty batch");
  require(batch.x.cols == D, "total_loss: input dimension mismatch");
  require(batch.aspect < m.aspect_count(), "total_loss: unknown aspect");
  require(memory.center.size() == m.aspect_count(), "total_loss: memory size mismatch");

  // forward
  Mat z1 = linear(batch.x, m.p.enc_w1, m.p.enc_b1);
  tanh_inplace(z1);
  Mat H = linear(z1, m.p.enc_w2, m.p.enc_b2);

  Mat Hp = H;
  for (std::size_t i = 0; i < Hp.a.size(); ++i) Hp.a[i] += m.lambda * eps[i];

  Mat z2 = linear(Hp, m.p.dec_v1, m.p.dec_c1);
  tanh_inplace(z2);
  Mat y = linear(z2, m.p.dec_v2, m.p.dec_c2);

  TotalLoss out;

  // reconstruction
  double sr = 0.0;
  for (std::size_t i = 0; i < y.a.size(); ++i) {
    const double r = y.a[i] - batch.x.a[i];
    sr += r * r;
  }
  out.recon = sr / static_cast<double>(y.a.size());

  // classification under the batch's own aspect head
  const Mat& cw = m.p.cls_w[batch.aspect];
  const auto& cb = m.p.cls_b[batch.aspect];
  const std::size_t nc = cw.rows;
  Mat dlogits(B, nc);
  double sc = 0.0;
  {
    std::vector<double> logits(nc);
    for (std::size_t i = 0; i < B; ++i) {
      require(batch.label[i] < nc, "total_loss: label out of range");
      for (std::size_t o = 0; o < nc; ++o)
        logits[o] = cb[o] + dot(H.row(i), cw.row(o), d);
      sc += xent_row(logits.data(), nc, batch.label[i], grads ? dlogits.row(i) : nullptr);
    }
  }
  out.cls = sc / static_cast<double>(B);

  // aspect gap against the other stored centers
  const std::vector<double> c = row_mean(H);
  double sg = 0.0;
  std::vector<double> dc(d, 0.0);  // d(gap)/d(c), unweighted
  for (std::size_t t = 0; t < m.aspect_count(); ++t) {
    if (t == batch.aspect || !memory.initialized[t]) continue;
    const double* mc = memory.center[t].data();
    const double dist = euclid(c.data(), mc, d);
    sg += dist;
    if (grads && dist > 0.0)  // subgradient 0 at coincident centers
      for (std::size_t j = 0; j < d; ++j) dc[j] += (c[j] - mc[j]) / dist;
  }
  out.gap = sg;

  out.value = w.w1 * out.recon + w.w2 * out.cls + w.w3 * out.gap;

  if (grads) {
    // reconstruction path
    Mat dy(B, D);
    const double rscale = w.w1 * 2.0 / static_cast<double>(y.a.size());
    for (std::size_t i = 0; i < y.a.size(); ++i)
      dy.a[i] = rscale * (y.a[i] - batch.x.a[i]);

    Mat dz2(B, m.dims.h2);
    std::fill(dz2.a.begin(), dz2.a.end(), 0.0);
    linear_backward(z2, m.p.dec_v2, dy, &dz2, grads->dec_v2, grads->dec_c2);
    tanh_backward(z2, dz2);

    Mat dH(B, d);  // gradient w.r.t. the unperturbed latents
    std::fill(dH.a.begin(), dH.a.end(), 0.0);
    linear_backward(Hp, m.p.dec_v1, dz2, &dH, grads->dec_v1, grads->dec_c1);
    // dHp/dH is the identity, so dH already carries the recon path

    // classifier path
    const double cscale = w.w2 / static_cast<double>(B);
    for (double& g : dlogits.a) g *= cscale;
    linear_backward(H, cw, dlogits, &dH, grads->cls_w[batch.aspect],
                    grads->cls_b[batch.aspect]);

    // gap path: flows through the batch mean only
    const double gscale = w.w3 / static_cast<double>(B);
    for (std::size_t i = 0; i < B; ++i) {
      double* r = dH.row(i);
      for (std::size_t j = 0; j < d; ++j) r[j] += gscale * dc[j];
    }

    // encoder
    Mat dz1(B, m.dims.h);
    std::fill(dz1.a.begin(), dz1.a.end(), 0.0);
    linear_backward(z1, m.p.enc_w2, dH, &dz1, grads->enc_w2, grads->enc_b2);
    tanh_backward(z1, dz1);
    linear_backward(batch.x, m.p.enc_w1, dz1, nullptr, grads->enc_w1, grads->enc_b1);
  }

  // memory update comes last: the stored centers above were constants
  memory.center[batch.aspect] = c;
  memory.initialized[batch.aspect] = 1;
  return out;
}

TotalLoss total_loss(const ToyModel& m, const Batch& batch, AspectMemory& memory,
                     const LossWeights& w, RngStream& noise, Grads* grads) {
  std::vector<double> eps(batch.size() * m.dims.d);
  noise.fill_normal(eps.data(), eps.size());
  return total_loss(m, batch, memory, w, eps.data(), grads);
}

// ---- training loop ---------------------------------------------------------

TrainResult train(const AttributeSpace& data, const TrainConfig& config) {
  TrainConfig c = config;
  c.dims.D = data.dim();
  require(c.dims.d >= 1, "train: latent dim must be set");
  ToyModel m = init_model(data.schema(), c.dims, c.lambda, c.seed);
  return train(data, std::move(m), c);
}

TrainResult train(const AttributeSpace& data, ToyModel model, const TrainConfig& config) {
  config.validate();
  require(data.size() > 0, "train: empty dataset");
  require(model.dims.D == data.dim(), "train: model input dim != data dim");
  require(model.schema == data.schema(), "train: model schema != data schema");

  const std::size_t na = model.aspect_count();
  const std::size_t B = config.batch_size;

  Grads grads = zero_grads(model);
  Grads vel = zero_grads(model);
  AspectMemory memory = AspectMemory::empty(na, model.dims.d);
  RngStream noise(config.seed, {rng_tag::perturb});

  TrainResult res;
  res.epoch_loss.reserve(config.epochs);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    // per-aspect shuffles; whole batches only
    std::vector<std::vector<std::uint32_t>> order(na);
    std::size_t max_batches = 0;
    for (std::size_t t = 0; t < na; ++t) {
      order[t] = data.aspect_ordinals(t);
      RngStream sh(config.seed, {rng_tag::shuffle, epoch, t});
      sh.shuffle(order[t]);
      max_batches = std::max(max_batches, order[t].size() / B);
    }

    double epoch_sum = 0.0;
    std::size_t epoch_batches = 0;
    for (std::size_t b = 0; b < max_batches; ++b) {
      for (std::size_t t = 0; t < na; ++t) {  // round-robin over aspects
        if ((b + 1) * B > order[t].size()) continue;
        const Batch batch = make_batch(data, {order[t].data() + b * B, B});

        grads.for_each_block(
            [](const std::string&, std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); });
        const TotalLoss loss = total_loss(model, batch, memory, config.weights, noise, &grads);
        if (!std::isfinite(loss.value))
          throw NumericError("training diverged at step " + std::to_string(res.steps) +
                             " (loss is not finite)");

        // SGD with momentum
        std::vector<std::vector<double>*> gblocks, vblocks, pblocks;
        grads.for_each_block(
            [&](const std::string&, std::vector<double>& v) { gblocks.push_back(&v); });
        vel.for_each_block(
            [&](const std::string&, std::vector<double>& v) { vblocks.push_back(&v); });
        model.p.for_each_block(
            [&](const std::string&, std::vector<double>& v) { pblocks.push_back(&v); });
        for (std::size_t k = 0; k < gblocks.size(); ++k) {
          auto& g = *gblocks[k];
          auto& v = *vblocks[k];
          auto& p = *pblocks[k];
          for (std::size_t i = 0; i < g.size(); ++i) {
            v[i] = config.momentum * v[i] + g[i];
            p[i] -= config.lr * v[i];
          }
        }
        ++res.steps;
        epoch_sum += loss.value;
        ++epoch_batches;
      }
    }
    res.epoch_loss.push_back(epoch_batches ? epoch_sum / static_cast<double>(epoch_batches) : 0.0);
  }

  // latent space: every training vector encoded with the final model
  std::vector<RawPoint> latents;
  latents.reserve(data.size());
  Mat all(data.size(), data.dim());
  for (std::size_t i = 0; i < data.size(); ++i)
    std::copy_n(data.point(i).data(), data.dim(), all.row(i));
  const Mat H = encode_batch(model, all);
  for (std::size_t i = 0; i < data.size(); ++i) {
    RawPoint p;
    p.id = data.id(i);
    p.aspect = data.schema().aspects[data.aspect_of(i)];
    p.attribute = data.schema().attributes[data.aspect_of(i)][data.attribute_of(i)];
    p.vec.assign(H.row(i), H.row(i) + model.dims.d);
    latents.push_back(std::move(p));
  }
  res.latents = AttributeSpace::build(data.schema(), std::move(latents));
  res.model = std::move(model);
  return res;
}

std::vector<double> classifier_accuracy(const ToyModel& m, const AttributeSpace& data) {
  require(m.schema == data.schema(), "accuracy: schema mismatch");
  std::vector<std::size_t> hit(m.aspect_count(), 0), tot(m.aspect_count(), 0);
  Mat all(data.size(), data.dim());
  for (std::size_t i = 0; i < data.size(); ++i)
    std::copy_n(data.point(i).data(), data.dim(), all.row(i));
  const Mat H = encode_batch(m, all);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::uint16_t a = data.aspect_of(i);
    const Mat& cw = m.p.cls_w[a];
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < cw.rows; ++o) {
      const double v = m.p.cls_b[a][o] + dot(H.row(i), cw.row(o), m.dims.d);
      if (v > best_v) {
        best_v = v;
        best = o;
      }
    }
    ++tot[a];
    if (best == data.attribute_of(i)) ++hit[a];
  }
  std::vector<double> acc(m.aspect_count(), 1.0);
  for (std::size_t a = 0; a < acc.size(); ++a)
    if (tot[a]) acc[a] = static_cast<double>(hit[a]) / static_cast<double>(tot[a]);
  return acc;
}

std::pair<AttributeSpace, AttributeSpace> split_space(const AttributeSpace& space, std::size_t k,
                                                      std::size_t which) {
  require(k >= 2, "split: k must be >= 2");
  require(which < k, "split: fold index out of range");
  std::vector<RawPoint> keep, held;
  // position within the point's attribute decides the fold
  std::vector<std::vector<std::size_t>> pos(space.schema().aspect_count());
  for (std::size_t a = 0; a < pos.size(); ++a)
    pos[a].assign(space.schema().attributes[a].size(), 0);

  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto a = space.aspect_of(i);
    const auto t = space.attribute_of(i);
    const std::size_t p = pos[a][t]++;
    RawPoint r;
    r.id = space.id(i);
    r.aspect = space.schema().aspects[a];
    r.attribute = space.schema().attributes[a][t];
    const auto v = space.point(i);
    r.vec.assign(v.begin(), v.end());
    if (p % k == which)
      held.push_back(std::move(r));
    else
      keep.push_back(std::move(r));
  }
  return {AttributeSpace::build(space.schema(), std::move(keep)),
          AttributeSpace::build(space.schema(), std::move(held))};
}

// ---- gradient checking -----------------------------------------------------

GradCheckReport grad_check(const ToyModel& m, const Batch& batch, const AspectMemory& memory,
                           const LossWeights& w, std::uint64_t noise_seed, double step, double tol,
                           const std::string& corrupt_block) {
  require(step > 0.0, "grad_check: step must be > 0");
  std::vector<double> eps(batch.size() * m.dims.d);
  RngStream ns(noise_seed, {rng_tag::perturb});
  ns.fill_normal(eps.data(), eps.size());

  Grads analytic = zero_grads(m);
  {
    AspectMemory mem = memory;
    total_loss(m, batch, mem, w, eps.data(), &analytic);
  }
  if (!corrupt_block.empty()) {
    bool found = false;
    analytic.for_each_block([&](const std::string& name, std::vector<double>& v) {
      if (name == corrupt_block && !v.empty()) {
        v[0] += 1e-2;
        found = true;
      }
    });
    require(found, "grad_check: unknown block '" + corrupt_block + "'");
  }

  ToyModel probe = m;
  std::vector<std::pair<std::string, std::vector<double>*>> pblocks;
  probe.p.for_each_block(
      [&](const std::string& n, std::vector<double>& v) { pblocks.emplace_back(n, &v); });
  std::vector<std::vector<double>*> ablocks;
  analytic.for_each_block(
      [&](const std::string&, std::vector<double>& v) { ablocks.push_back(&v); });

  auto eval = [&]() {
    AspectMemory mem = memory;
    return total_loss(probe, batch, mem, w, eps.data(), nullptr).value;
  };

  GradCheckReport rep;
  for (std::size_t bi = 0; bi < pblocks.size(); ++bi) {
    GradCheckBlock blk;
    blk.name = pblocks[bi].first;
    auto& pv = *pblocks[bi].second;
    const auto& av = *ablocks[bi];
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double orig = pv[i];
      pv[i] = orig + step;
      const double lp = eval();
      pv[i] = orig - step;
      const double lm = eval();
      pv[i] = orig;
      const double gn = (lp - lm) / (2.0 * step);
      const double ga = av[i];
      const double rel = std::fabs(ga - gn) / std::max({std::fabs(ga), std::fabs(gn), 1e-8});
      blk.max_rel_err = std::max(blk.max_rel_err, rel);
    }
    blk.pass = blk.max_rel_err <= tol;
    rep.pass = rep.pass && blk.pass;
    rep.blocks.push_back(std::move(blk));
  }
  return rep;
}

// ---- model serialization ---------------------------------------------------

void save_model(const ToyModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write("ATMD", 4);
  wire::put_le<std::uint32_t>(out, 1);
  wire::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.dims.D));
  wire::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.dims.d));
  wire::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.dims.h));
  wire::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.dims.h2));
  wire::put_le<double>(out, m.lambda);
  write_schema_block(out, m.schema);
  m.p.for_each_block([&](const std::string&, const std::vector<double>& v) {
    wire::put_le<std::uint64_t>(out, v.size());
    for (const double x : v) wire::put_le<double>(out, x);
  });
  if (!out) throw IoError("write failure on '" + path + "'");
}

ToyModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "ATMD", 4) != 0)
    throw IoError(path + ": bad magic (not a model file)");
  const auto version = wire::get_le<std::uint32_t>(in, path);
  if (version != 1) throw IoError(path + ": unsupported version " + std::to_string(version));
  ModelDims dims;
  dims.D = wire::get_le<std::uint32_t>(in, path);
  dims.d = wire::get_le<std::uint32_t>(in, path);
  dims.h = wire::get_le<std::uint32_t>(in, path);
  dims.h2 = wire::get_le<std::uint32_t>(in, path);
  const double lambda = wire::get_le<double>(in, path);
  AttributeSchema schema = read_schema_block(in, path);

  ToyModel m = init_model(schema, dims, lambda, 0);
  m.p.for_each_block([&](const std::string& name, std::vector<double>& v) {
    const auto len = wire::get_le<std::uint64_t>(in, path);
    if (len != v.size())
      throw IoError(path + ": block '" + name + "' has length " + std::to_string(len) +
                    ", expected " + std::to_string(v.size()));
    for (double& x : v) x = wire::get_le<double>(in, path);
  });
  return m;
}

}  // namespace attrspace
