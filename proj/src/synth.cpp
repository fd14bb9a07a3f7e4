#include "xfer/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "xfer/error.hpp"
#include "xfer/rng.hpp"

namespace xfer {
namespace {

constexpr double kNoiseSigma = 0.05;

struct Template {
  double cx, cy, radius;
  double orientation, frequency;
  std::array<double, 3> fg, bg;
};

std::array<double, 3> hue_color(double hue, double saturation, double value) {
  // HSV with S,V in [0,1]
  const double h = 6.0 * (hue - std::floor(hue));
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = value * (1 - saturation), q = value * (1 - saturation * f), t = value * (1 - saturation * (1 - f));
  switch (sector) {
    case 0: return {value, t, p};
    case 1: return {q, value, p};
    case 2: return {p, value, t};
    case 3: return {p, q, value};
    case 4: return {t, p, value};
    default: return {value, p, q};
  }
}

Template make_template(const SynthSpec& spec, int cls, int cluster) {
  CounterRng rng(CounterRng::mix(spec.seed * 0x100000001b3ULL + 0xc1a55) ^
                 CounterRng::mix(static_cast<std::uint64_t>(cls) << 20 | static_cast<std::uint64_t>(cluster)));
  CounterRng class_rng(CounterRng::mix(spec.seed * 0x100000001b3ULL + 0xc1a55) ^
                       CounterRng::mix(static_cast<std::uint64_t>(cls) << 20 | 0xfffffULL));
  Template t{};
  // Class identity: texture orientation and base frequency.
  const double class_orientation = std::numbers::pi * (cls + 0.5 * class_rng.uniform()) / spec.n_classes;
  const double class_frequency = 0.08 + 0.12 * class_rng.uniform();
  const double class_hue = class_rng.uniform();
  // Cluster identity: placement, size, palette, and texture jitter.
  t.cx = 8.0 + 16.0 * rng.uniform();
  t.cy = 8.0 + 16.0 * rng.uniform();
  t.radius = 4.0 + 6.0 * rng.uniform();
  t.orientation = class_orientation + std::numbers::pi * (rng.uniform() - 0.5);
  t.frequency = class_frequency * std::exp(rng.uniform() - 0.5);
  const double hue = cluster == 0 ? class_hue : rng.uniform();
  t.fg = hue_color(hue, 0.5 + 0.5 * rng.uniform(), 0.5 + 0.5 * rng.uniform());
  t.bg = hue_color(rng.uniform(), 0.6 * rng.uniform(), 0.1 + 0.5 * rng.uniform());
  return t;
}

// Rotation about the gray axis (1,1,1)/sqrt(3).
std::array<double, 9> hue_rotation(double turns) {
  const double a = 2.0 * std::numbers::pi * turns;
  const double c = std::cos(a), s = std::sin(a), k = (1.0 - c) / 3.0, r = s / std::sqrt(3.0);
  return {c + k, k - r, k + r, k + r, c + k, k - r, k - r, k + r, c + k};
}

}  // namespace

LabeledImages generate_synth(const SynthSpec& spec) {
  if (spec.n_classes < 2) throw InputError("synthetic task needs at least 2 classes");
  if (spec.clusters_per_class < 1) throw InputError("synthetic task needs at least 1 cluster per class");
  if (spec.amount < spec.n_classes) throw InputError("synthetic amount must be >= number of classes");
  if (spec.shift < 0.0) throw InputError("synthetic shift must be >= 0");
  if (spec.image_size < 8) throw InputError("synthetic images must be at least 8x8");

  std::vector<Template> templates;
  for (int c = 0; c < spec.n_classes; ++c)
    for (int k = 0; k < spec.clusters_per_class; ++k) templates.push_back(make_template(spec, c, k));

  const auto rot = hue_rotation(spec.shift);
  const double freq_scale = 1.0 + spec.shift;
  const int n = spec.image_size;
  const double scale = n / 32.0;

  LabeledImages out;
  out.classes = spec.n_classes;
  out.images.reserve(spec.amount);
  out.labels.reserve(spec.amount);
  for (int i = 0; i < spec.amount; ++i) {
    CounterRng rng(CounterRng::mix(spec.seed ^ 0x5eed5eedULL) + static_cast<std::uint64_t>(i));
    const int label = i % spec.n_classes;
    const int cluster = static_cast<int>(rng.below(spec.clusters_per_class));
    const Template& t = templates[static_cast<std::size_t>(label) * spec.clusters_per_class + cluster];
    const double cx = scale * (t.cx + 4.0 * (rng.uniform() - 0.5));
    const double cy = scale * (t.cy + 4.0 * (rng.uniform() - 0.5));
    const double radius = scale * t.radius;
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    const double freq = t.frequency * freq_scale / scale;
    const double co = std::cos(t.orientation), si = std::sin(t.orientation);

    Image img(n, n);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double m = std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2.0 * radius * radius));
        const double wave = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * freq * (x * co + y * si) + phase);
        std::array<double, 3> rgb;
        for (int c = 0; c < 3; ++c) rgb[c] = (1.0 - m) * t.bg[c] + m * t.fg[c] * (0.3 + 0.7 * wave);
        for (int c = 0; c < 3; ++c) {
          const double v = rot[3 * c] * rgb[0] + rot[3 * c + 1] * rgb[1] + rot[3 * c + 2] * rgb[2];
          img.at(y, x, c) = std::clamp(v + kNoiseSigma * rng.normal(), 0.0, 1.0);
        }
      }
    }
    out.images.push_back(std::move(img));
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace xfer
