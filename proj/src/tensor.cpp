#include "xfer/tensor.hpp"

#include <utility>

#include "xfer/error.hpp"

namespace xfer {

std::size_t Tensor::element_count(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must be non-empty");
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be >= 1");
    n *= d;
  }
  return n;
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (element_count(shape_) != data_.size())
    throw ShapeError("tensor data length does not match shape");
}

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(element_count(shape_), 0.0f) {}

std::string_view to_string(CheckpointTag tag) {
  switch (tag) {
    case CheckpointTag::Random: return "random";
    case CheckpointTag::Pretrained: return "pretrained";
    case CheckpointTag::Finetuned: return "finetuned";
    case CheckpointTag::Scratch: return "scratch";
  }
  return "random";
}

CheckpointTag parse_checkpoint_tag(std::string_view s) {
  if (s == "random") return CheckpointTag::Random;
  if (s == "pretrained") return CheckpointTag::Pretrained;
  if (s == "finetuned") return CheckpointTag::Finetuned;
  if (s == "scratch") return CheckpointTag::Scratch;
  throw FormatError("unknown checkpoint tag '" + std::string(s) + "'");
}

void ParameterSet::add(std::string name, Tensor tensor) {
  if (name.empty()) throw ShapeError("parameter name must be non-empty");
  if (index_.count(name)) throw ShapeError("duplicate parameter name '" + name + "'");
  index_.emplace(name, entries_.size());
  entries_.emplace_back(std::move(name), std::move(tensor));
}

bool ParameterSet::contains(std::string_view name) const {
  return index_.find(name) != index_.end();
}

const Tensor& ParameterSet::at(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ShapeError("no parameter named '" + std::string(name) + "'");
  return entries_[it->second].second;
}

Tensor& ParameterSet::at(std::string_view name) {
  return const_cast<Tensor&>(std::as_const(*this).at(name));
}

std::size_t ParameterSet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : entries_) n += t.size();
  return n;
}

bool shape_compatible(const ParameterSet& a, const ParameterSet& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [name, t] : a.entries()) {
    if (!b.contains(name) || b.at(name).shape() != t.shape()) return false;
  }
  return true;
}

void require_shape_compatible(const ParameterSet& a, const ParameterSet& b) {
  for (const auto& [name, t] : a.entries()) {
    if (!b.contains(name)) throw ShapeError("parameter '" + name + "' missing from second checkpoint");
    if (b.at(name).shape() != t.shape()) throw ShapeError("parameter '" + name + "' has mismatched shape");
  }
  for (const auto& [name, t] : b.entries()) {
    if (!a.contains(name)) throw ShapeError("parameter '" + name + "' missing from first checkpoint");
  }
}

}  // namespace xfer
