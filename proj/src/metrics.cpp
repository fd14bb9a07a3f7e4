#include "xfer/metrics.hpp"

#include <cmath>

#include "xfer/error.hpp"

namespace xfer {

double mean_abs_distance(const TensorRefs& a, const TensorRefs& b) {
  if (a.size() != b.size()) throw ShapeError("tensor groups differ in length");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const Tensor& x = a[t];
    const Tensor& y = b[t];
    if (x.shape() != y.shape()) throw ShapeError("tensor shapes differ at group position " + std::to_string(t));
    const auto& xd = x.data();
    const auto& yd = y.data();
    for (std::size_t i = 0; i < xd.size(); ++i)
      sum += std::fabs(static_cast<double>(xd[i]) - static_cast<double>(yd[i]));
    count += xd.size();
  }
  if (count == 0) throw ShapeError("distance over an empty parameter group");
  return sum / static_cast<double>(count);
}

double layer_transferability(const TensorRefs& random, const TensorRefs& candidate,
                             const TensorRefs& target) {
  const double d_random = mean_abs_distance(random, target);
  const double d_candidate = mean_abs_distance(candidate, target);
  if (d_candidate < kDegenerateDistance)
    throw DegenerateDistanceError("candidate parameters coincide with the target (distance " +
                                  std::to_string(d_candidate) + ")");
  return d_random / d_candidate;
}

std::string_view to_string(Variant v) { return v == Variant::FB ? "FB" : "SB"; }

Variant parse_variant(std::string_view s) {
  if (s == "FB" || s == "fb" || s == "tfb") return Variant::FB;
  if (s == "SB" || s == "sb" || s == "tsb") return Variant::SB;
  throw InputError("variant must be FB or SB, got '" + std::string(s) + "'");
}

TensorRefs group_tensors(const ParameterSet& params, const LayerGroup& group) {
  TensorRefs refs;
  refs.reserve(group.params.size());
  for (const auto& name : group.params) refs.emplace_back(params.at(name));
  return refs;
}

TransferabilityReport network_transferability(const ParameterSet& random, const ParameterSet& candidate,
                                              const ParameterSet& target, const LayerPartition& partition,
                                              Variant variant) {
  require_shape_compatible(random, target);
  require_shape_compatible(candidate, target);

  TransferabilityReport report;
  report.variant = variant;
  double sum = 0.0;
  std::size_t included = 0;
  for (const auto& group : partition.groups()) {
    const auto r = group_tensors(random, group);
    const auto c = group_tensors(candidate, group);
    const auto t = group_tensors(target, group);
    LayerTransfer layer;
    layer.name = group.name;
    layer.excluded = group.is_head;
    layer.d_random = mean_abs_distance(r, t);
    layer.d_pretrained = mean_abs_distance(c, t);
    if (layer.d_pretrained < kDegenerateDistance)
      throw DegenerateDistanceError("layer '" + group.name + "': candidate coincides with target", group.name);
    layer.T = layer.d_random / layer.d_pretrained;
    if (!layer.excluded) {
      sum += layer.T;
      ++included;
    }
    report.layers.push_back(std::move(layer));
  }
  if (included == 0) throw ManifestError("every layer group is excluded; network transferability undefined");
  report.network_T = sum / static_cast<double>(included);
  return report;
}

}  // namespace xfer
