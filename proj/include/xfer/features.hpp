#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xfer/image.hpp"

namespace xfer {

inline constexpr std::size_t kFeatureDim = 22;
inline constexpr int kDefaultGrayLevels = 16;

// [r,g,b mean][r,g,b std] then (asm, entropy, contrast, idm) for 0/45/90/135 degrees.
using FeatureVector = std::array<double, kFeatureDim>;

enum class Direction { Deg0, Deg45, Deg90, Deg135 };
inline constexpr std::array<Direction, 4> kDirections = {Direction::Deg0, Direction::Deg45, Direction::Deg90,
                                                         Direction::Deg135};

// Row-major levels x levels matrix.
struct Glcm {
  int levels = 0;
  std::vector<double> p;
  double operator()(int i, int j) const { return p[static_cast<std::size_t>(i) * levels + j]; }
};

struct HaralickStats {
  double asm_ = 0.0;
  double entropy = 0.0;
  double contrast = 0.0;
  double idm = 0.0;
};

std::array<double, 6> rgb_stats(const Image& image);
Glcm glcm(const Image& image, Direction direction, int levels = kDefaultGrayLevels);
HaralickStats haralick(const Glcm& p);
FeatureVector featurize_image(const Image& image, int levels = kDefaultGrayLevels);

struct DatasetProfile {
  std::string name;
  std::vector<std::string> image_ids;
  std::vector<FeatureVector> features;
  std::size_t source_count = 0;
};

// Seeded uniform sample (without replacement) of min(cap, count) images from
// the sorted listing of decodable images in `dir`. Output keeps sorted order.
DatasetProfile featurize_dataset(const std::filesystem::path& dir, std::size_t sample_cap, std::uint64_t seed,
                                 int levels = kDefaultGrayLevels);

const std::array<std::string, kFeatureDim>& feature_names();

void write_feature_csv(const DatasetProfile& profile, const std::filesystem::path& path);
std::string feature_csv(const DatasetProfile& profile);
// Enforces the exact 22-column schema; throws InputError otherwise.
DatasetProfile read_feature_csv(const std::filesystem::path& path);

}  // namespace xfer
