#include "xfer/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "xfer/error.hpp"
#include "xfer/rng.hpp"

namespace xfer {
namespace {

void validate(const Image& image) {
  if (image.empty() || image.pixels.size() != image.height * image.width * 3)
    throw InputError("image is empty");
  for (double v : image.pixels) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("image channel value outside [0,1]");
  }
}

// (dy, dx) for a unit displacement.
std::pair<int, int> offset_of(Direction d) {
  switch (d) {
    case Direction::Deg0: return {0, 1};
    case Direction::Deg45: return {-1, 1};
    case Direction::Deg90: return {-1, 0};
    case Direction::Deg135: return {-1, -1};
  }
  return {0, 1};
}

}  // namespace

std::array<double, 6> rgb_stats(const Image& image) {
  validate(image);
  const double n = static_cast<double>(image.height * image.width);
  std::array<double, 6> out{};
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (std::size_t i = c; i < image.pixels.size(); i += 3) sum += image.pixels[i];
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t i = c; i < image.pixels.size(); i += 3) {
      const double d = image.pixels[i] - mean;
      ss += d * d;
    }
    out[c] = mean;
    out[3 + c] = std::sqrt(ss / n);
  }
  return out;
}

Glcm glcm(const Image& image, Direction direction, int levels) {
  validate(image);
  if (levels < 1) throw InputError("GLCM needs at least one gray level");

  const auto h = static_cast<long>(image.height);
  const auto w = static_cast<long>(image.width);
  std::vector<int> q(image.height * image.width);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const double g = 0.299 * image.at(y, x, 0) + 0.587 * image.at(y, x, 1) + 0.114 * image.at(y, x, 2);
      q[y * w + x] = std::clamp(static_cast<int>(std::floor(g * levels)), 0, levels - 1);
    }
  }

  const auto [dy, dx] = offset_of(direction);
  Glcm out{levels, std::vector<double>(static_cast<std::size_t>(levels) * levels, 0.0)};
  std::size_t pairs = 0;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const long y2 = y + dy, x2 = x + dx;
      if (y2 < 0 || y2 >= h || x2 < 0 || x2 >= w) continue;
      const int i = q[y * w + x], j = q[y2 * w + x2];
      out.p[static_cast<std::size_t>(i) * levels + j] += 1.0;
      out.p[static_cast<std::size_t>(j) * levels + i] += 1.0;
      ++pairs;
    }
  }
  if (pairs == 0) throw InputError("image too small: no pixel pairs for GLCM direction");
  const double total = 2.0 * static_cast<double>(pairs);
  for (double& v : out.p) v /= total;
  return out;
}

HaralickStats haralick(const Glcm& p) {
  if (p.levels < 1 || p.p.size() != static_cast<std::size_t>(p.levels) * p.levels)
    throw InputError("GLCM has inconsistent dimensions");
  double total = 0.0;
  for (double v : p.p) {
    if (!(v >= 0.0)) throw InputError("GLCM has a negative or NaN entry");
    total += v;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw InputError("GLCM is not normalized");

  HaralickStats s;
  for (int i = 0; i < p.levels; ++i) {
    for (int j = 0; j < p.levels; ++j) {
      const double v = p(i, j);
      if (v == 0.0) continue;
      const double d2 = static_cast<double>((i - j) * (i - j));
      s.asm_ += v * v;
      s.entropy -= v * std::log(v);
      s.contrast += v * d2;
      s.idm += v / (1.0 + d2);
    }
  }
  return s;
}

FeatureVector featurize_image(const Image& image, int levels) {
  FeatureVector f{};
  const auto rgb = rgb_stats(image);
  std::copy(rgb.begin(), rgb.end(), f.begin());
  std::size_t k = 6;
  for (Direction d : kDirections) {
    const auto s = haralick(glcm(image, d, levels));
    f[k++] = s.asm_;
    f[k++] = s.entropy;
    f[k++] = s.contrast;
    f[k++] = s.idm;
  }
  return f;
}

const std::array<std::string, kFeatureDim>& feature_names() {
  static const std::array<std::string, kFeatureDim> names = [] {
    std::array<std::string, kFeatureDim> n{"r_mean", "g_mean", "b_mean", "r_std", "g_std", "b_std"};
    std::size_t k = 6;
    for (const char* deg : {"0", "45", "90", "135"}) {
      for (const char* stat : {"asm_", "ent_", "con_", "idm_"}) n[k++] = std::string(stat) + deg;
    }
    return n;
  }();
  return names;
}

namespace {

bool has_image_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm";
}

}  // namespace

DatasetProfile featurize_dataset(const std::filesystem::path& dir, std::size_t sample_cap, std::uint64_t seed,
                                 int levels) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw InputError("'" + dir.string() + "' is not a readable directory");

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
  }
  if (ec) throw InputError("cannot list '" + dir.string() + "': " + ec.message());
  if (files.empty()) throw InputError("no PNG/PPM images in '" + dir.string() + "'");
  std::sort(files.begin(), files.end());

  const std::size_t take = std::min(sample_cap, files.size());
  std::vector<std::size_t> idx(files.size());
  std::iota(idx.begin(), idx.end(), 0);
  CounterRng rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  std::sort(idx.begin(), idx.end());

  DatasetProfile profile;
  profile.name = dir.filename().string();
  if (profile.name.empty()) profile.name = dir.parent_path().filename().string();
  profile.source_count = files.size();
  for (std::size_t i : idx) {
    profile.image_ids.push_back(files[i].filename().string());
    profile.features.push_back(featurize_image(load_image(files[i]), levels));
  }
  return profile;
}

std::string feature_csv(const DatasetProfile& profile) {
  std::ostringstream out;
  out << "image_id";
  for (const auto& n : feature_names()) out << ',' << n;
  out << '\n';
  char buf[64];
  for (std::size_t r = 0; r < profile.features.size(); ++r) {
    out << (r < profile.image_ids.size() ? profile.image_ids[r] : std::to_string(r));
    for (double v : profile.features[r]) {
      std::snprintf(buf, sizeof buf, "%.9g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
  return out.str();
}

void write_feature_csv(const DatasetProfile& profile, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot write '" + path.string() + "'");
  out << feature_csv(profile);
  if (!out) throw WriteError("failed writing '" + path.string() + "'");
}

DatasetProfile read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open feature CSV '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError("feature CSV '" + path.string() + "' is empty");

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() != kFeatureDim + 1 || header[0] != "image_id" ||
      !std::equal(feature_names().begin(), feature_names().end(), header.begin() + 1))
    throw InputError("feature CSV '" + path.string() + "' does not have the 22-feature schema");

  DatasetProfile profile;
  profile.name = path.stem().string();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != kFeatureDim + 1)
      throw InputError("feature CSV row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " columns, expected 23");
    FeatureVector f{};
    for (std::size_t k = 0; k < kFeatureDim; ++k) {
      try {
        std::size_t used = 0;
        f[k] = std::stod(cells[k + 1], &used);
        if (used != cells[k + 1].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw InputError("feature CSV row " + std::to_string(line_no) + " has a non-numeric value");
      }
    }
    profile.image_ids.push_back(cells[0]);
    profile.features.push_back(f);
  }
  if (profile.features.empty()) throw InputError("feature CSV '" + path.string() + "' has no rows");
  profile.source_count = profile.features.size();
  return profile;
}

}  // namespace xfer
