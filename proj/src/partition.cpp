#include "xfer/partition.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "xfer/error.hpp"

namespace xfer {

LayerPartition::LayerPartition(std::vector<LayerGroup> groups, const ParameterSet& params)
    : groups_(std::move(groups)) {
  if (groups_.empty()) throw ManifestError("layer manifest has no groups");
  std::set<std::string, std::less<>> seen;
  std::set<std::string, std::less<>> group_names;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    auto& group = groups_[g];
    if (group.name.empty()) throw ManifestError("layer group with empty name");
    if (!group_names.insert(group.name).second)
      throw ManifestError("duplicate layer group '" + group.name + "'");
    if (group.params.empty()) throw ManifestError("layer group '" + group.name + "' has no parameters");
    if (group.is_head && g + 1 != groups_.size())
      throw ManifestError("head group '" + group.name + "' must be the last group");
    group.param_count = 0;
    for (const auto& name : group.params) {
      if (!params.contains(name))
        throw ManifestError("group '" + group.name + "' names unknown parameter '" + name + "'");
      if (!seen.insert(name).second)
        throw ManifestError("parameter '" + name + "' appears in more than one group");
      group.param_count += params.at(name).size();
    }
  }
  for (const auto& [name, t] : params.entries()) {
    if (!seen.count(name)) throw ManifestError("parameter '" + name + "' is not assigned to any group");
  }
}

LayerPartition parse_partition(const std::string& json_text, const ParameterSet& params) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(std::string("layer manifest is not valid JSON: ") + e.what());
  }
  std::vector<LayerGroup> groups;
  try {
    for (const auto& g : doc.at("groups")) {
      LayerGroup group;
      group.name = g.at("name").get<std::string>();
      group.params = g.at("params").get<std::vector<std::string>>();
      group.is_head = g.value("head", false);
      groups.push_back(std::move(group));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(std::string("malformed layer manifest: ") + e.what());
  }
  return LayerPartition(std::move(groups), params);
}

LayerPartition load_partition(const std::filesystem::path& path, const ParameterSet& params) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open layer manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_partition(ss.str(), params);
}

std::string partition_to_json(const LayerPartition& partition) {
  nlohmann::ordered_json groups = nlohmann::ordered_json::array();
  for (const auto& g : partition.groups())
    groups.push_back({{"name", g.name}, {"params", g.params}, {"head", g.is_head}});
  return nlohmann::ordered_json{{"groups", std::move(groups)}}.dump(2) + "\n";
}

namespace {

std::string op_of(const std::string& param_name) {
  auto dot = param_name.rfind('.');
  return dot == std::string::npos ? param_name : param_name.substr(0, dot);
}

bool is_norm_op(const std::string& op) {
  auto leaf = op.substr(op.rfind('.') == std::string::npos ? 0 : op.rfind('.') + 1);
  return leaf.rfind("bn", 0) == 0 || leaf.rfind("norm", 0) == 0 || leaf.rfind("ln", 0) == 0;
}

}  // namespace

LayerPartition default_partition(const ParameterSet& params, const std::string& head_op) {
  std::vector<LayerGroup> groups;
  LayerGroup head;
  for (const auto& [name, t] : params.entries()) {
    const std::string op = op_of(name);
    if (!head_op.empty() && op == head_op) {
      head.name = op;
      head.is_head = true;
      head.params.push_back(name);
      continue;
    }
    // Normalization parameters fold into the preceding operator's group.
    if (is_norm_op(op) && !groups.empty()) {
      groups.back().params.push_back(name);
      continue;
    }
    if (groups.empty() || groups.back().name != op) groups.push_back(LayerGroup{op, {}, false, 0});
    groups.back().params.push_back(name);
  }
  if (!head.params.empty()) groups.push_back(std::move(head));
  return LayerPartition(std::move(groups), params);
}

}  // namespace xfer
