#pragma once

#include <filesystem>

#include "xfer/tensor.hpp"

namespace xfer {

// PTC1 checkpoint layout:
//   "PTC1" | u64 LE header length H | H bytes JSON header | f32 LE data
// The header maps each tensor name to dtype/shape/offset/nbytes, offsets
// relative to the first data byte, tensors contiguous in insertion order.
void write_ptc(const ParameterSet& params, const std::filesystem::path& path);
ParameterSet read_ptc(const std::filesystem::path& path);

}  // namespace xfer
