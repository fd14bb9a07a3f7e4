#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "xfer/tensor.hpp"

namespace xfer {

struct LayerGroup {
  std::string name;
  std::vector<std::string> params;
  bool is_head = false;
  std::size_t param_count = 0;  // K for this group
};

// Ordered grouping of parameters into layers. At most one head group, and it
// must come last.
class LayerPartition {
 public:
  LayerPartition() = default;
  // Validates against `params`; throws ManifestError.
  LayerPartition(std::vector<LayerGroup> groups, const ParameterSet& params);

  const std::vector<LayerGroup>& groups() const noexcept { return groups_; }
  std::size_t layer_count() const noexcept { return groups_.size(); }

 private:
  std::vector<LayerGroup> groups_;
};

LayerPartition load_partition(const std::filesystem::path& path, const ParameterSet& params);
LayerPartition parse_partition(const std::string& json_text, const ParameterSet& params);
std::string partition_to_json(const LayerPartition& partition);

// Groups every "<op>.<suffix>" parameter under "<op>"; normalization
// parameters named "<op>.bn_*" stay with their operator. The group whose
// operator is `head_op` is flagged as the head and moved last.
LayerPartition default_partition(const ParameterSet& params, const std::string& head_op = "");

}  // namespace xfer
