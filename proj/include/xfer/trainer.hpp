#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "xfer/synth.hpp"
#include "xfer/tensor.hpp"
#include "xfer/tinynet.hpp"

namespace xfer {

struct TrainConfig {
  double lr0 = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0001;
  int batch_size = 128;
  int epochs = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

// 0.5 * lr0 * (1 + cos(pi * step / total_steps)).
double cosine_lr(long step, long total_steps, double lr0);

// Mean |gradient| per parameter group (conv1, conv2, fc).
using GradientProfile = std::array<double, kGroupCount>;

struct TrainResult {
  ParameterSet params;
  std::vector<double> loss_history;  // mean training loss per epoch
  std::vector<GradientProfile> gradient_profiles;  // per epoch, when recorded
};

// Shuffled mini-batch SGD with momentum, weight decay, and a cosine schedule
// over epochs * ceil(n / batch) steps. Shuffling draws from seed + 1.
TrainResult train(const ParameterSet& init, const LabeledImages& data, const TrainConfig& config,
                  bool record_gradients = false);

// "epoch,group,mean_abs_grad"
std::string gradient_profile_csv(const std::vector<GradientProfile>& profiles);

double accuracy(const ParameterSet& params, const LabeledImages& data);

}  // namespace xfer
