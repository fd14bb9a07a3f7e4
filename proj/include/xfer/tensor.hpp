#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace xfer {

// Dense row-major f32 tensor.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::size_t> shape, std::vector<float> data);
  // Zero-filled tensor of the given shape.
  explicit Tensor(std::vector<std::size_t> shape);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  const std::vector<float>& data() const noexcept { return data_; }
  std::vector<float>& data() noexcept { return data_; }
  std::size_t size() const noexcept { return data_.size(); }

  static std::size_t element_count(const std::vector<std::size_t>& shape);

 private:
  std::vector<std::size_t> shape_;
  std::vector<float> data_;
};

enum class CheckpointTag { Random, Pretrained, Finetuned, Scratch };

std::string_view to_string(CheckpointTag tag);
CheckpointTag parse_checkpoint_tag(std::string_view s);

// Named tensors in insertion order. Insertion order is the on-disk order.
class ParameterSet {
 public:
  using Entry = std::pair<std::string, Tensor>;

  ParameterSet() = default;
  explicit ParameterSet(CheckpointTag tag) : tag_(tag) {}

  void add(std::string name, Tensor tensor);

  CheckpointTag tag() const noexcept { return tag_; }
  void set_tag(CheckpointTag tag) noexcept { tag_ = tag; }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(std::string_view name) const;
  const Tensor& at(std::string_view name) const;
  Tensor& at(std::string_view name);

  std::size_t parameter_count() const;

 private:
  CheckpointTag tag_ = CheckpointTag::Random;
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Same name set with identical shapes per name.
bool shape_compatible(const ParameterSet& a, const ParameterSet& b);

// Throws ShapeError naming the first offending parameter.
void require_shape_compatible(const ParameterSet& a, const ParameterSet& b);

}  // namespace xfer
