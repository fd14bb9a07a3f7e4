#include "xfer/ptc.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "xfer/error.hpp"

namespace xfer {
namespace {

constexpr std::array<char, 4> kMagic = {'P', 'T', 'C', '1'};

void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void put_f32_le(std::string& out, float f) {
  auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

float get_f32_le(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 3; i >= 0; --i) bits = (bits << 8) | p[i];
  return std::bit_cast<float>(bits);
}

}  // namespace

void write_ptc(const ParameterSet& params, const std::filesystem::path& path) {
  if (params.empty()) throw WriteError("refusing to write an empty parameter set");

  nlohmann::ordered_json tensors = nlohmann::ordered_json::object();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : params.entries()) {
    const std::uint64_t nbytes = 4ull * t.size();
    tensors[name] = {{"dtype", "f32"}, {"shape", t.shape()}, {"offset", offset}, {"nbytes", nbytes}};
    offset += nbytes;
  }
  nlohmann::ordered_json header = {{"tag", std::string(to_string(params.tag()))},
                                   {"tensors", std::move(tensors)}};
  const std::string header_text = header.dump();

  std::string blob(kMagic.begin(), kMagic.end());
  put_u64_le(blob, header_text.size());
  blob += header_text;
  blob.reserve(blob.size() + offset);
  for (const auto& [name, t] : params.entries())
    for (float f : t.data()) put_f32_le(blob, f);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WriteError("cannot open '" + path.string() + "' for writing");
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  out.close();
  if (!out) throw WriteError("failed writing '" + path.string() + "'");
}

ParameterSet read_ptc(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());

  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic.data(), 4) != 0)
    throw FormatError("'" + path.string() + "' is not a PTC1 file (bad magic)");
  if (bytes.size() < 12) throw CorruptError("truncated PTC header length");
  const std::uint64_t header_len = get_u64_le(bytes.data() + 4);
  if (header_len > bytes.size() - 12) throw CorruptError("header length exceeds file size");

  nlohmann::ordered_json header;
  try {
    header = nlohmann::ordered_json::parse(bytes.begin() + 12, bytes.begin() + 12 + header_len);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("PTC header is not valid JSON: ") + e.what());
  }
  if (!header.is_object() || !header.contains("tag") || !header.contains("tensors") ||
      !header["tag"].is_string() || !header["tensors"].is_object())
    throw FormatError("PTC header lacks 'tag' / 'tensors'");

  ParameterSet params(parse_checkpoint_tag(header["tag"].get<std::string>()));
  const unsigned char* data = bytes.data() + 12 + header_len;
  const std::uint64_t data_len = bytes.size() - 12 - header_len;

  std::vector<std::pair<std::uint64_t, std::uint64_t>> extents;
  for (const auto& [name, desc] : header["tensors"].items()) {
    std::vector<std::size_t> shape;
    std::uint64_t offset = 0, nbytes = 0;
    try {
      if (desc.at("dtype").get<std::string>() != "f32")
        throw FormatError("tensor '" + name + "' has unsupported dtype");
      shape = desc.at("shape").get<std::vector<std::size_t>>();
      offset = desc.at("offset").get<std::uint64_t>();
      nbytes = desc.at("nbytes").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("malformed descriptor for tensor '" + name + "': " + e.what());
    }
    std::size_t count = 0;
    try {
      count = Tensor::element_count(shape);
    } catch (const ShapeError&) {
      throw FormatError("tensor '" + name + "' has an invalid shape");
    }
    if (nbytes != 4ull * count) throw CorruptError("tensor '" + name + "' nbytes disagrees with shape");
    if (offset > data_len || nbytes > data_len - offset)
      throw CorruptError("tensor '" + name + "' extends beyond end of file");
    extents.emplace_back(offset, nbytes);

    std::vector<float> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = get_f32_le(data + offset + 4 * i);
    params.add(name, Tensor(std::move(shape), std::move(values)));
  }
  if (params.empty()) throw FormatError("PTC file declares no tensors");

  std::sort(extents.begin(), extents.end());
  for (std::size_t i = 1; i < extents.size(); ++i) {
    if (extents[i - 1].first + extents[i - 1].second > extents[i].first)
      throw CorruptError("tensor data regions overlap");
  }
  return params;
}

}  // namespace xfer
