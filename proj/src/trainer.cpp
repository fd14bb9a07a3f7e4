#include "xfer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "xfer/error.hpp"
#include "xfer/rng.hpp"

namespace xfer {

void TrainConfig::validate() const {
  if (!(lr0 > 0.0)) throw InputError("lr0 must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InputError("momentum must be in [0,1)");
  if (!(weight_decay >= 0.0)) throw InputError("weight decay must be >= 0");
  if (batch_size < 1) throw InputError("batch size must be >= 1");
  if (epochs < 1) throw InputError("epochs must be >= 1");
}

double cosine_lr(long step, long total_steps, double lr0) {
  if (total_steps < 1 || step < 0 || step > total_steps) throw InputError("cosine_lr step out of range");
  if (step == total_steps) return 0.0;
  return 0.5 * lr0 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(step) / static_cast<double>(total_steps)));
}

TrainResult train(const ParameterSet& init, const LabeledImages& data, const TrainConfig& config,
                  bool record_gradients) {
  config.validate();
  if (data.images.empty() || data.images.size() != data.labels.size())
    throw InputError("training data is empty or mislabeled");

  NetParams net = from_parameter_set(init);
  if (net.classes < data.classes) throw ShapeError("network head has fewer outputs than the task has classes");
  NetParams velocity = NetParams::zeros(net.classes);
  NetParams grads;

  const std::size_t n = data.images.size();
  const std::size_t bs = static_cast<std::size_t>(config.batch_size);
  const long steps_per_epoch = static_cast<long>((n + bs - 1) / bs);
  const long total_steps = steps_per_epoch * config.epochs;

  CounterRng shuffle_rng(config.seed + 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  Batch batch{&data.images, &data.labels, {}};
  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    double epoch_loss = 0.0;
    GradientProfile profile{};
    for (long s = 0; s < steps_per_epoch; ++s, ++step) {
      const std::size_t begin = static_cast<std::size_t>(s) * bs;
      const std::size_t end = std::min(n, begin + bs);
      batch.indices.assign(order.begin() + begin, order.begin() + end);
      const double loss = forward_backward(net, batch, grads);
      epoch_loss += loss * static_cast<double>(end - begin);

      if (record_gradients) {
        std::array<double, kGroupCount> sum{};
        std::array<std::size_t, kGroupCount> count{};
        for (std::size_t b = 0; b < kBlobCount; ++b) {
          for (double g : grads.blobs[b]) sum[NetParams::group_of(b)] += std::fabs(g);
          count[NetParams::group_of(b)] += grads.blobs[b].size();
        }
        for (std::size_t g = 0; g < kGroupCount; ++g) profile[g] += sum[g] / static_cast<double>(count[g]);
      }
      sgd_step(net, grads, velocity, cosine_lr(step, total_steps, config.lr0), config.momentum,
               config.weight_decay);
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(n));
    if (record_gradients) {
      for (double& v : profile) v /= static_cast<double>(steps_per_epoch);
      result.gradient_profiles.push_back(profile);
    }
  }
  for (const auto& blob : net.blobs)
    for (double v : blob)
      if (!std::isfinite(v)) throw NumericsError("training produced non-finite parameters");

  result.params = to_parameter_set(net, init.tag());
  return result;
}

std::string gradient_profile_csv(const std::vector<GradientProfile>& profiles) {
  std::string out = "epoch,group,mean_abs_grad\n";
  char buf[128];
  for (std::size_t e = 0; e < profiles.size(); ++e)
    for (std::size_t g = 0; g < kGroupCount; ++g) {
      std::snprintf(buf, sizeof buf, "%zu,%s,%.9g\n", e + 1, group_names()[g].c_str(), profiles[e][g]);
      out += buf;
    }
  return out;
}

double accuracy(const ParameterSet& params, const LabeledImages& data) {
  const NetParams net = from_parameter_set(params);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.images.size(); ++i) {
    const auto logits = forward_logits(net, data.images[i]);
    const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
    if (best == data.labels[i]) ++correct;
  }
  return data.images.empty() ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(data.images.size());
}

}  // namespace xfer
