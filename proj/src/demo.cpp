#include "xfer/demo.hpp"

#include <cstdio>

#include "xfer/domain.hpp"
#include "xfer/error.hpp"
#include "xfer/experiment.hpp"
#include "xfer/features.hpp"
#include "xfer/partition.hpp"
#include "xfer/ptc.hpp"
#include "xfer/report.hpp"
#include "xfer/svg.hpp"

namespace xfer {
namespace {

DatasetProfile profile_of(const LabeledImages& data, const std::string& name, std::size_t cap) {
  DatasetProfile p;
  p.name = name;
  p.source_count = data.images.size();
  const std::size_t n = std::min(cap, data.images.size());
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "%s_%05zu", name.c_str(), i);
    p.image_ids.emplace_back(id);
    p.features.push_back(featurize_image(data.images[i]));
  }
  return p;
}

LineChart sweep_chart(const std::string& title, const std::string& x_label, const std::vector<SweepPoint>& pts,
                      bool log_x) {
  LineChart c{title, x_label, "network T (median over seeds)", {}, {}, log_x};
  Series fb{"T_FB", {}, {}};
  for (const auto& p : pts) {
    fb.x.push_back(p.knob);
    fb.y.push_back(p.median_t_fb);
  }
  c.series.push_back(std::move(fb));
  return c;
}

}  // namespace

void run_demo(const DemoOptions& options, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) throw WriteError("cannot create '" + out_dir.string() + "'");

  const std::uint64_t seed = options.seed;
  ExperimentConfig config = desk_config(seed);
  SynthSpec source = desk_source_spec(seed);
  SynthSpec target = desk_target_spec(seed);
  std::vector<double> amounts = {256, 1024, 4096};
  std::vector<double> widths = {2, 4, 8};
  std::vector<std::uint64_t> seeds = {seed + 1, seed + 2, seed + 3};
  if (options.quick) {
    config.pretrain.epochs = 2;
    config.finetune.epochs = 2;
    source.amount = 256;
    target.amount = 128;
    amounts = {64, 128};
    widths = {1, 2};
    seeds = {seed + 1};
  }

  // Single transfer experiment: checkpoints, reports, layer chart.
  const LabeledImages source_data = generate_synth(source);
  const LabeledImages target_data = generate_synth(target);
  const ParameterSet theta_a = pretrain_source(source_data, config.pretrain).params;
  const TransferOutcome out = measure_transfer(theta_a, target_data, config.finetune, true);

  write_ptc(out.random, out_dir / "random.ptc");
  write_ptc(out.pretrained, out_dir / "pretrained.ptc");
  write_ptc(out.finetuned, out_dir / "finetuned.ptc");
  write_ptc(out.scratch, out_dir / "scratch.ptc");
  write_text(out_dir / "layers.json", partition_to_json(out.partition));

  RunManifest manifest;
  manifest.subcommand = "demo";
  // The output location is deliberately not recorded: a bundle's bytes depend
  // only on the seed and scale.
  manifest.arguments = {{"seed", std::to_string(seed)}, {"quick", options.quick ? "true" : "false"}};
  manifest.seeds = {seed};
  manifest.seeds.insert(manifest.seeds.end(), seeds.begin(), seeds.end());
  const nlohmann::json manifest_json = to_json(manifest);

  for (const auto* r : {&out.fb, &out.sb}) {
    nlohmann::json j = to_json(*r);
    j["manifest"] = manifest_json;
    write_text(out_dir / (r->variant == Variant::FB ? "report_fb.json" : "report_sb.json"), dump_report(j));
  }
  LineChart layers{"Layer-wise transferability", "layer group", "T", {}, {}, false};
  for (const auto* r : {&out.fb, &out.sb}) {
    Series s{std::string("T_") + std::string(to_string(r->variant)), {}, {}};
    for (std::size_t i = 0; i < r->layers.size(); ++i) {
      s.x.push_back(static_cast<double>(i));
      s.y.push_back(r->layers[i].T);
    }
    layers.series.push_back(std::move(s));
  }
  for (const auto& l : out.fb.layers) layers.x_categories.push_back(l.name);
  write_svg(layers, out_dir / "layers.svg");

  write_text(out_dir / "gradients.csv", gradient_profile_csv(out.finetune_run.gradient_profiles));
  LineChart grads{"Layer-wise mean absolute gradient (first fine-tuning epoch)", "layer group", "mean |g|",
                  {}, {}, false};
  Series g{"fine-tune", {}, {}};
  for (std::size_t i = 0; i < kGroupCount; ++i) {
    g.x.push_back(static_cast<double>(i));
    g.y.push_back(out.finetune_run.gradient_profiles.front()[i]);
    grads.x_categories.push_back(group_names()[i]);
  }
  grads.series.push_back(std::move(g));
  write_svg(grads, out_dir / "gradients.svg");

  // Domain metrics of the target against the source.
  const std::size_t cap = options.quick ? 64 : 512;
  const DatasetProfile source_profile = profile_of(source_data, "source", cap);
  DatasetProfile target_profile = profile_of(target_data, "target", cap);
  write_text(out_dir / "source_features.csv", feature_csv(source_profile));
  write_text(out_dir / "target_features.csv", feature_csv(target_profile));
  nlohmann::json domain = to_json(domain_metrics(target_profile, source_profile));
  domain["manifest"] = manifest_json;
  write_text(out_dir / "domain.json", dump_report(domain));

  // Trend sweeps.
  const auto amount_pts = run_sweep(SweepKnob::Amount, amounts, seeds, config, source, target);
  write_text(out_dir / "amount_sweep.csv", sweep_csv(SweepKnob::Amount, amount_pts));
  write_svg(sweep_chart("Transferability vs. target data amount", "amount", amount_pts, true),
            out_dir / "amount_sweep.svg");
  const auto width_pts = run_sweep(SweepKnob::Width, widths, seeds, config, source, target, true);
  write_text(out_dir / "width_sweep.csv", sweep_csv(SweepKnob::Width, width_pts));
  write_svg(sweep_chart("Transferability vs. target clusters per class", "clusters per class", width_pts, false),
            out_dir / "width_sweep.svg");

  nlohmann::json bundle = manifest_json;
  bundle["files"] = nlohmann::json::object();
  for (const char* f : {"random.ptc", "pretrained.ptc", "finetuned.ptc", "scratch.ptc", "layers.json",
                        "report_fb.json", "report_sb.json", "gradients.csv", "source_features.csv",
                        "target_features.csv", "domain.json", "amount_sweep.csv", "width_sweep.csv"})
    bundle["files"][f] = sha256_file(out_dir / f);
  write_text(out_dir / "manifest.json", dump_report(bundle));
}

}  // namespace xfer
