#pragma once

#include <cstdint>
#include <vector>

#include "xfer/image.hpp"

namespace xfer {

struct LabeledImages {
  int classes = 0;
  std::vector<Image> images;
  std::vector<int> labels;
};

// Controllable synthetic classification task. Each class owns
// `clusters_per_class` templates (a colored Gaussian bump carrying an oriented
// sinusoidal texture). `shift` rotates hue by shift*360 degrees and scales
// texture frequency by (1 + shift) for the whole set.
struct SynthSpec {
  int n_classes = 4;
  int clusters_per_class = 2;
  double shift = 0.0;
  int amount = 256;
  int image_size = 32;
  std::uint64_t seed = 0;
};

// Template parameters depend on (seed, class, cluster) only, and image i's
// draws on (seed, i) only, so varying `amount` or `clusters_per_class` keeps
// the shared prefix of templates stable.
LabeledImages generate_synth(const SynthSpec& spec);

}  // namespace xfer
