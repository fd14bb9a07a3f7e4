#pragma once

#include <cstdint>
#include <filesystem>

namespace xfer {

struct DemoOptions {
  std::uint64_t seed = 0;
  // Reduced amounts/epochs for smoke runs; the full scale reproduces the trends.
  bool quick = false;
};

// Writes the full artifact bundle into `out_dir`: four PTC checkpoints and the
// layer manifest, FB/SB reports, feature CSVs and domain metrics, amount and
// width sweep CSVs, the fine-tuning gradient profile, SVG charts, and
// manifest.json. Deterministic given the seed.
void run_demo(const DemoOptions& options, const std::filesystem::path& out_dir);

}  // namespace xfer
