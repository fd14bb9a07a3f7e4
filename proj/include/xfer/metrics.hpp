#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "xfer/partition.hpp"
#include "xfer/tensor.hpp"

namespace xfer {

using TensorRefs = std::vector<std::reference_wrapper<const Tensor>>;

// Denominator below this (absolute, on the mean) makes the ratio undefined.
inline constexpr double kDegenerateDistance = 1e-12;

// Mean absolute elementwise difference over every element of every tensor,
// accumulated in double in a fixed order.
double mean_abs_distance(const TensorRefs& a, const TensorRefs& b);

// D(random, target) / D(candidate, target).
double layer_transferability(const TensorRefs& random, const TensorRefs& candidate,
                             const TensorRefs& target);

// FB: target checkpoint reached by fine-tuning. SB: target trained from scratch.
enum class Variant { FB, SB };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

struct LayerTransfer {
  std::string name;
  double T = 0.0;
  double d_random = 0.0;
  double d_pretrained = 0.0;
  bool excluded = false;
};

struct TransferabilityReport {
  Variant variant = Variant::FB;
  std::vector<LayerTransfer> layers;
  double network_T = 0.0;  // unweighted mean over non-head layers
};

TransferabilityReport network_transferability(const ParameterSet& random, const ParameterSet& candidate,
                                              const ParameterSet& target, const LayerPartition& partition,
                                              Variant variant);

TensorRefs group_tensors(const ParameterSet& params, const LayerGroup& group);

}  // namespace xfer
