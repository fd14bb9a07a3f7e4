#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "xfer/image.hpp"
#include "xfer/partition.hpp"
#include "xfer/rng.hpp"
#include "xfer/tensor.hpp"

namespace xfer {

// conv(3->8, 3x3) -> relu -> 2x2 mean-pool -> conv(8->16, 3x3) -> relu
//   -> global mean-pool -> fc(16->C)
// Convolutions are unpadded with stride 1. Weights are [out][in][kh][kw].
inline constexpr int kInChannels = 3;
inline constexpr int kConv1Channels = 8;
inline constexpr int kConv2Channels = 16;
inline constexpr int kKernel = 3;

enum Blob : std::size_t { kConv1W, kConv1B, kConv2W, kConv2B, kFcW, kFcB, kBlobCount };

// Parameters (or gradients, or velocities) of a TinyNet in 64-bit floats.
struct NetParams {
  int classes = 0;
  std::array<std::vector<double>, kBlobCount> blobs;

  static NetParams zeros(int classes);
  static const std::array<std::string, kBlobCount>& names();
  std::vector<std::size_t> shape(std::size_t blob) const;
  // Index into the canonical partition groups: 0 conv1, 1 conv2, 2 fc.
  static std::size_t group_of(std::size_t blob) { return blob / 2; }
};

inline constexpr std::size_t kGroupCount = 3;
const std::array<std::string, kGroupCount>& group_names();

// Gaussian, mean 0, variance 2/fan_in.
Tensor kaiming_init(const std::vector<std::size_t>& shape, std::size_t fan_in, CounterRng& rng);

// Kaiming weights, zero biases. Draw order: conv1, conv2, fc.
NetParams init_tinynet(int classes, std::uint64_t seed);

ParameterSet to_parameter_set(const NetParams& p, CheckpointTag tag);
NetParams from_parameter_set(const ParameterSet& ps);
// conv1 / conv2 / fc groups, fc flagged as head.
LayerPartition canonical_partition(const ParameterSet& ps);

struct Batch {
  const std::vector<Image>* images = nullptr;
  const std::vector<int>* labels = nullptr;
  std::vector<std::size_t> indices;
};

std::vector<double> forward_logits(const NetParams& net, const Image& image);

// Mean softmax cross-entropy over the batch; exact gradients accumulated into
// `grads` (overwritten). Throws NumericsError on a non-finite loss.
double forward_backward(const NetParams& net, const Batch& batch, NetParams& grads);

// Loss only, no gradients.
double batch_loss(const NetParams& net, const Batch& batch);

// g' = g + wd*theta; v = momentum*v + g'; theta -= lr*v.
void sgd_step(NetParams& params, const NetParams& grads, NetParams& velocity, double lr, double momentum,
              double weight_decay);

}  // namespace xfer
