#include "xfer/tinynet.hpp"

#include <algorithm>
#include <cmath>

#include "xfer/error.hpp"

namespace xfer {
namespace {

constexpr int kPatch1 = kInChannels * kKernel * kKernel;     // 27
constexpr int kPatch2 = kConv1Channels * kKernel * kKernel;  // 72

struct Dims {
  int size;   // input H == W
  int out1;   // conv1 output side
  int pool;   // pooled side
  int out2;   // conv2 output side
};

Dims dims_for(const Image& image) {
  if (image.height != image.width) throw InputError("TinyNet expects square images");
  Dims d{static_cast<int>(image.height), 0, 0, 0};
  d.out1 = d.size - 2;
  d.pool = d.out1 / 2;
  d.out2 = d.pool - 2;
  if (d.out2 < 1) throw InputError("TinyNet needs images of at least 8x8");
  return d;
}

// Per-sample activations kept for the backward pass.
struct Trace {
  Dims d{};
  std::vector<double> patch1;  // [out1^2][27]
  std::vector<double> z1;      // [out1^2][8]
  std::vector<double> pooled;  // [pool^2][8]
  std::vector<double> patch2;  // [out2^2][72]
  std::vector<double> z2;      // [out2^2][16]
  std::vector<double> gap;     // [16]
  std::vector<double> logits;  // [C]
};

void forward(const NetParams& net, const Image& image, Trace& t) {
  const Dims d = dims_for(image);
  t.d = d;
  const int n1 = d.out1 * d.out1;
  const int n2 = d.out2 * d.out2;

  t.patch1.resize(static_cast<std::size_t>(n1) * kPatch1);
  for (int y = 0; y < d.out1; ++y)
    for (int x = 0; x < d.out1; ++x) {
      double* p = &t.patch1[static_cast<std::size_t>(y * d.out1 + x) * kPatch1];
      for (int c = 0; c < kInChannels; ++c)
        for (int ky = 0; ky < kKernel; ++ky)
          for (int kx = 0; kx < kKernel; ++kx) *p++ = image.at(y + ky, x + kx, c);
    }

  const auto& w1 = net.blobs[kConv1W];
  const auto& b1 = net.blobs[kConv1B];
  t.z1.resize(static_cast<std::size_t>(n1) * kConv1Channels);
  for (int pos = 0; pos < n1; ++pos) {
    const double* p = &t.patch1[static_cast<std::size_t>(pos) * kPatch1];
    for (int o = 0; o < kConv1Channels; ++o) {
      const double* w = &w1[static_cast<std::size_t>(o) * kPatch1];
      double s = b1[o];
      for (int k = 0; k < kPatch1; ++k) s += w[k] * p[k];
      t.z1[static_cast<std::size_t>(pos) * kConv1Channels + o] = s;
    }
  }

  t.pooled.assign(static_cast<std::size_t>(d.pool * d.pool) * kConv1Channels, 0.0);
  for (int py = 0; py < d.pool; ++py)
    for (int px = 0; px < d.pool; ++px) {
      double* out = &t.pooled[static_cast<std::size_t>(py * d.pool + px) * kConv1Channels];
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          const double* z = &t.z1[static_cast<std::size_t>((2 * py + dy) * d.out1 + 2 * px + dx) * kConv1Channels];
          for (int o = 0; o < kConv1Channels; ++o) out[o] += std::max(z[o], 0.0);
        }
      for (int o = 0; o < kConv1Channels; ++o) out[o] *= 0.25;
    }

  t.patch2.resize(static_cast<std::size_t>(n2) * kPatch2);
  for (int y = 0; y < d.out2; ++y)
    for (int x = 0; x < d.out2; ++x) {
      double* p = &t.patch2[static_cast<std::size_t>(y * d.out2 + x) * kPatch2];
      for (int c = 0; c < kConv1Channels; ++c)
        for (int ky = 0; ky < kKernel; ++ky)
          for (int kx = 0; kx < kKernel; ++kx)
            *p++ = t.pooled[static_cast<std::size_t>((y + ky) * d.pool + x + kx) * kConv1Channels + c];
    }

  const auto& w2 = net.blobs[kConv2W];
  const auto& b2 = net.blobs[kConv2B];
  t.z2.resize(static_cast<std::size_t>(n2) * kConv2Channels);
  t.gap.assign(kConv2Channels, 0.0);
  for (int pos = 0; pos < n2; ++pos) {
    const double* p = &t.patch2[static_cast<std::size_t>(pos) * kPatch2];
    for (int o = 0; o < kConv2Channels; ++o) {
      const double* w = &w2[static_cast<std::size_t>(o) * kPatch2];
      double s = b2[o];
      for (int k = 0; k < kPatch2; ++k) s += w[k] * p[k];
      t.z2[static_cast<std::size_t>(pos) * kConv2Channels + o] = s;
      t.gap[o] += std::max(s, 0.0);
    }
  }
  for (double& g : t.gap) g /= n2;

  const auto& w3 = net.blobs[kFcW];
  const auto& b3 = net.blobs[kFcB];
  t.logits.assign(net.classes, 0.0);
  for (int k = 0; k < net.classes; ++k) {
    double s = b3[k];
    for (int o = 0; o < kConv2Channels; ++o) s += w3[static_cast<std::size_t>(k) * kConv2Channels + o] * t.gap[o];
    t.logits[k] = s;
  }
}

// Softmax cross-entropy; fills `prob` with the softmax.
double cross_entropy(const std::vector<double>& logits, int label, std::vector<double>& prob) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  prob.resize(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    prob[k] = std::exp(logits[k] - mx);
    z += prob[k];
  }
  for (double& p : prob) p /= z;
  return -(logits[label] - mx - std::log(z));
}

void backward(const NetParams& net, const Trace& t, const std::vector<double>& dlogits, NetParams& g) {
  const Dims& d = t.d;
  const int n1 = d.out1 * d.out1;
  const int n2 = d.out2 * d.out2;

  std::vector<double> dgap(kConv2Channels, 0.0);
  for (int k = 0; k < net.classes; ++k) {
    g.blobs[kFcB][k] += dlogits[k];
    for (int o = 0; o < kConv2Channels; ++o) {
      g.blobs[kFcW][static_cast<std::size_t>(k) * kConv2Channels + o] += dlogits[k] * t.gap[o];
      dgap[o] += dlogits[k] * net.blobs[kFcW][static_cast<std::size_t>(k) * kConv2Channels + o];
    }
  }

  std::vector<double> dpooled(t.pooled.size(), 0.0);
  std::vector<double> dpatch(kPatch2);
  const auto& w2 = net.blobs[kConv2W];
  auto& gw2 = g.blobs[kConv2W];
  auto& gb2 = g.blobs[kConv2B];
  for (int pos = 0; pos < n2; ++pos) {
    const double* p = &t.patch2[static_cast<std::size_t>(pos) * kPatch2];
    std::fill(dpatch.begin(), dpatch.end(), 0.0);
    for (int o = 0; o < kConv2Channels; ++o) {
      if (t.z2[static_cast<std::size_t>(pos) * kConv2Channels + o] <= 0.0) continue;
      const double dz = dgap[o] / n2;
      gb2[o] += dz;
      double* gw = &gw2[static_cast<std::size_t>(o) * kPatch2];
      const double* w = &w2[static_cast<std::size_t>(o) * kPatch2];
      for (int k = 0; k < kPatch2; ++k) {
        gw[k] += dz * p[k];
        dpatch[k] += dz * w[k];
      }
    }
    const int y = pos / d.out2, x = pos % d.out2;
    const double* dp = dpatch.data();
    for (int c = 0; c < kConv1Channels; ++c)
      for (int ky = 0; ky < kKernel; ++ky)
        for (int kx = 0; kx < kKernel; ++kx)
          dpooled[static_cast<std::size_t>((y + ky) * d.pool + x + kx) * kConv1Channels + c] += *dp++;
  }

  auto& gw1 = g.blobs[kConv1W];
  auto& gb1 = g.blobs[kConv1B];
  for (int pos = 0; pos < n1; ++pos) {
    const int y = pos / d.out1, x = pos % d.out1;
    if (y / 2 >= d.pool || x / 2 >= d.pool) continue;  // dropped by the pool
    const double* dp = &dpooled[static_cast<std::size_t>((y / 2) * d.pool + x / 2) * kConv1Channels];
    const double* p = &t.patch1[static_cast<std::size_t>(pos) * kPatch1];
    for (int o = 0; o < kConv1Channels; ++o) {
      if (t.z1[static_cast<std::size_t>(pos) * kConv1Channels + o] <= 0.0) continue;
      const double dz = 0.25 * dp[o];
      gb1[o] += dz;
      double* gw = &gw1[static_cast<std::size_t>(o) * kPatch1];
      for (int k = 0; k < kPatch1; ++k) gw[k] += dz * p[k];
    }
  }
}

void check_batch(const NetParams& net, const Batch& batch) {
  if (!batch.images || !batch.labels || batch.indices.empty()) throw InputError("empty training batch");
  for (std::size_t i : batch.indices) {
    if (i >= batch.images->size() || i >= batch.labels->size()) throw InputError("batch index out of range");
    const int label = (*batch.labels)[i];
    if (label < 0 || label >= net.classes) throw InputError("label outside [0, classes)");
  }
}

}  // namespace

const std::array<std::string, kBlobCount>& NetParams::names() {
  static const std::array<std::string, kBlobCount> n = {"conv1.weight", "conv1.bias", "conv2.weight",
                                                        "conv2.bias",   "fc.weight",  "fc.bias"};
  return n;
}

const std::array<std::string, kGroupCount>& group_names() {
  static const std::array<std::string, kGroupCount> n = {"conv1", "conv2", "fc"};
  return n;
}

std::vector<std::size_t> NetParams::shape(std::size_t blob) const {
  const auto c = static_cast<std::size_t>(classes);
  switch (blob) {
    case kConv1W: return {kConv1Channels, kInChannels, kKernel, kKernel};
    case kConv1B: return {kConv1Channels};
    case kConv2W: return {kConv2Channels, kConv1Channels, kKernel, kKernel};
    case kConv2B: return {kConv2Channels};
    case kFcW: return {c, kConv2Channels};
    case kFcB: return {c};
  }
  return {};
}

NetParams NetParams::zeros(int classes) {
  if (classes < 1) throw InputError("TinyNet needs at least one class");
  NetParams p;
  p.classes = classes;
  for (std::size_t b = 0; b < kBlobCount; ++b) p.blobs[b].assign(Tensor::element_count(p.shape(b)), 0.0);
  return p;
}

Tensor kaiming_init(const std::vector<std::size_t>& shape, std::size_t fan_in, CounterRng& rng) {
  if (fan_in < 1) throw InputError("Kaiming initialization needs fan_in >= 1");
  Tensor t(shape);
  const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (float& v : t.data()) v = static_cast<float>(sd * rng.normal());
  return t;
}

NetParams init_tinynet(int classes, std::uint64_t seed) {
  NetParams p = NetParams::zeros(classes);
  CounterRng rng(seed);
  const std::size_t fan_in[kBlobCount] = {kPatch1, 0, kPatch2, 0, kConv2Channels, 0};
  for (std::size_t b = 0; b < kBlobCount; b += 2) {
    const Tensor t = kaiming_init(p.shape(b), fan_in[b], rng);
    std::transform(t.data().begin(), t.data().end(), p.blobs[b].begin(),
                   [](float v) { return static_cast<double>(v); });
  }
  return p;
}

ParameterSet to_parameter_set(const NetParams& p, CheckpointTag tag) {
  ParameterSet ps(tag);
  for (std::size_t b = 0; b < kBlobCount; ++b) {
    std::vector<float> data(p.blobs[b].size());
    std::transform(p.blobs[b].begin(), p.blobs[b].end(), data.begin(),
                   [](double v) { return static_cast<float>(v); });
    ps.add(NetParams::names()[b], Tensor(p.shape(b), std::move(data)));
  }
  return ps;
}

NetParams from_parameter_set(const ParameterSet& ps) {
  if (!ps.contains("fc.bias")) throw ShapeError("checkpoint is not a TinyNet (no fc.bias)");
  const int classes = static_cast<int>(ps.at("fc.bias").size());
  NetParams p = NetParams::zeros(classes);
  if (ps.size() != kBlobCount) throw ShapeError("checkpoint is not a TinyNet (wrong parameter count)");
  for (std::size_t b = 0; b < kBlobCount; ++b) {
    const Tensor& t = ps.at(NetParams::names()[b]);
    if (t.shape() != p.shape(b)) throw ShapeError("parameter '" + NetParams::names()[b] + "' has the wrong shape");
    std::transform(t.data().begin(), t.data().end(), p.blobs[b].begin(),
                   [](float v) { return static_cast<double>(v); });
  }
  return p;
}

LayerPartition canonical_partition(const ParameterSet& ps) {
  std::vector<LayerGroup> groups;
  for (std::size_t g = 0; g < kGroupCount; ++g)
    groups.push_back({group_names()[g], {NetParams::names()[2 * g], NetParams::names()[2 * g + 1]}, g == 2, 0});
  return LayerPartition(std::move(groups), ps);
}

std::vector<double> forward_logits(const NetParams& net, const Image& image) {
  Trace t;
  forward(net, image, t);
  return t.logits;
}

double forward_backward(const NetParams& net, const Batch& batch, NetParams& grads) {
  check_batch(net, batch);
  grads = NetParams::zeros(net.classes);
  Trace t;
  std::vector<double> prob;
  const double inv_b = 1.0 / static_cast<double>(batch.indices.size());
  double loss = 0.0;
  for (std::size_t i : batch.indices) {
    forward(net, (*batch.images)[i], t);
    const int label = (*batch.labels)[i];
    loss += cross_entropy(t.logits, label, prob);
    for (double& p : prob) p *= inv_b;
    prob[label] -= inv_b;
    backward(net, t, prob, grads);
  }
  loss *= inv_b;
  if (!std::isfinite(loss)) throw NumericsError("non-finite training loss");
  return loss;
}

double batch_loss(const NetParams& net, const Batch& batch) {
  check_batch(net, batch);
  Trace t;
  std::vector<double> prob;
  double loss = 0.0;
  for (std::size_t i : batch.indices) {
    forward(net, (*batch.images)[i], t);
    loss += cross_entropy(t.logits, (*batch.labels)[i], prob);
  }
  return loss / static_cast<double>(batch.indices.size());
}

void sgd_step(NetParams& params, const NetParams& grads, NetParams& velocity, double lr, double momentum,
              double weight_decay) {
  for (std::size_t b = 0; b < kBlobCount; ++b) {
    if (grads.blobs[b].size() != params.blobs[b].size() || velocity.blobs[b].size() != params.blobs[b].size())
      throw ShapeError("SGD shape mismatch in '" + NetParams::names()[b] + "'");
  }
  for (std::size_t b = 0; b < kBlobCount; ++b) {
    auto& theta = params.blobs[b];
    auto& v = velocity.blobs[b];
    const auto& g = grads.blobs[b];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      v[i] = momentum * v[i] + g[i] + weight_decay * theta[i];
      theta[i] -= lr * v[i];
    }
  }
}

}  // namespace xfer
