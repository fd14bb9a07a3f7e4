#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "xfer/demo.hpp"
#include "xfer/domain.hpp"
#include "xfer/error.hpp"
#include "xfer/experiment.hpp"
#include "xfer/features.hpp"
#include "xfer/metrics.hpp"
#include "xfer/partition.hpp"
#include "xfer/ptc.hpp"
#include "xfer/regression.hpp"
#include "xfer/report.hpp"
#include "xfer/svg.hpp"
#include "xfer/table.hpp"
#include "xfer/trainer.hpp"

namespace fs = std::filesystem;
using namespace xfer;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text(out, text);
}

std::optional<double> parse_bandwidth(const std::string& s) {
  if (s.empty() || s == "median") return std::nullopt;
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw InputError("--bandwidth must be a positive number or 'median'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter transferability toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::uint64_t seed = 0;
  std::string out;
  std::string chart;
  bool standardize = false;

  // featurize
  auto* featurize = app.add_subcommand("featurize", "Extract 22-dim color/texture features from an image directory");
  std::string images_dir;
  std::size_t sample = std::numeric_limits<std::size_t>::max();
  featurize->add_option("--images", images_dir, "Directory of PNG/PPM images")->required();
  featurize->add_option("--out", out, "Output CSV (default stdout)");
  featurize->add_option("--sample", sample, "Sample at most N images");
  featurize->add_option("--seed", seed, "Sampling seed");

  // gap / width
  std::string csv_a, csv_b, bandwidth;
  auto* gap = app.add_subcommand("gap", "Domain gap (MMD) of --a against reference --b, plus width of --a");
  gap->add_option("--a", csv_a, "Target feature CSV")->required();
  gap->add_option("--b", csv_b, "Reference feature CSV")->required();
  gap->add_option("--bandwidth", bandwidth, "Kernel bandwidth or 'median'");
  gap->add_flag("--standardize", standardize, "z-score features before measuring");
  gap->add_option("--out", out, "Output JSON (default stdout)");
  auto* width = app.add_subcommand("width", "Domain width (max covariance eigenvalue) of --a");
  width->add_option("--a", csv_a, "Feature CSV")->required();
  width->add_flag("--standardize", standardize, "z-score features before measuring");
  width->add_option("--out", out, "Output JSON (default stdout)");

  // transfer
  std::string random_path, candidate_path, target_path, layers_path, variant = "FB";
  auto* transfer = app.add_subcommand("transfer", "Layer-wise and network transferability of a candidate checkpoint");
  transfer->add_option("--random", random_path, "Random-init checkpoint (PTC)")->required();
  transfer->add_option("--candidate", candidate_path, "Pre-trained checkpoint (PTC)")->required();
  transfer->add_option("--target", target_path, "Converged target checkpoint (PTC)")->required();
  transfer->add_option("--layers", layers_path, "Layer manifest JSON (default: derived from names)");
  transfer->add_option("--variant", variant, "FB (target fine-tuned) or SB (target from scratch)");
  transfer->add_option("--out", out, "Output JSON (default stdout)");
  transfer->add_option("--chart", chart, "Also write a per-layer SVG chart here");

  // fit
  std::string table_path, response = "tfb";
  auto* fit = app.add_subcommand("fit", "Three-factor regression and F-tests over a dataset table");
  fit->add_option("--table", table_path, "Table CSV")->required();
  fit->add_option("--response", response, "tfb or tsb");
  fit->add_option("--out", out, "Output JSON (default stdout)");

  // train
  SynthSpec spec;
  TrainConfig tc;
  std::string init_path, export_dir;
  bool record = false;
  auto* trainc = app.add_subcommand("train", "Train TinyNet on a synthetic task");
  trainc->add_option("--classes", spec.n_classes, "Number of classes");
  trainc->add_option("--clusters", spec.clusters_per_class, "Templates per class (width knob)");
  trainc->add_option("--shift", spec.shift, "Hue/frequency shift (gap knob)");
  trainc->add_option("--amount", spec.amount, "Number of images");
  trainc->add_option("--data-seed", spec.seed, "Synthetic data seed");
  trainc->add_option("--init", init_path, "Initial checkpoint (default: Kaiming init)");
  trainc->add_option("--epochs", tc.epochs, "Epochs");
  trainc->add_option("--lr", tc.lr0, "Initial learning rate");
  trainc->add_option("--momentum", tc.momentum, "SGD momentum");
  trainc->add_option("--weight-decay", tc.weight_decay, "Weight decay");
  trainc->add_option("--batch", tc.batch_size, "Batch size");
  trainc->add_option("--seed", seed, "Init/shuffle seed");
  trainc->add_flag("--record-gradients", record, "Write per-epoch gradient profiles");
  trainc->add_option("--export-images", export_dir, "Also write the synthetic images as PNG here");
  trainc->add_option("--out", out, "Output directory")->required();

  // demo
  bool quick = false;
  auto* demo = app.add_subcommand("demo", "Run the full desk-scale pipeline and write an artifact bundle");
  demo->add_option("--seed", seed, "Base seed");
  demo->add_option("--out", out, "Output directory")->required();
  demo->add_flag("--quick", quick, "Reduced-scale smoke run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    RunManifest manifest;
    manifest.seeds = {seed};

    if (*featurize) {
      const DatasetProfile profile = featurize_dataset(images_dir, sample, seed);
      emit(feature_csv(profile), out);
    } else if (*gap || *width) {
      manifest.subcommand = *gap ? "gap" : "width";
      manifest.arguments = {{"a", csv_a}, {"standardize", standardize ? "true" : "false"}};
      manifest.add_input(csv_a);
      const DatasetProfile a = read_feature_csv(csv_a);
      nlohmann::json j;
      if (*gap) {
        manifest.arguments["b"] = csv_b;
        manifest.arguments["bandwidth"] = bandwidth.empty() ? "median" : bandwidth;
        manifest.add_input(csv_b);
        const DatasetProfile b = read_feature_csv(csv_b);
        j = to_json(domain_metrics(a, b, parse_bandwidth(bandwidth), standardize));
      } else {
        DomainMetrics m;
        m.width = domain_width(a, standardize);
        m.amount = a.source_count;
        j = {{"width", m.width}, {"amount", m.amount}};
      }
      j["manifest"] = to_json(manifest);
      emit(dump_report(j), out);
    } else if (*transfer) {
      manifest.subcommand = "transfer";
      manifest.arguments = {{"random", random_path}, {"candidate", candidate_path}, {"target", target_path},
                            {"layers", layers_path}, {"variant", variant}};
      const Variant v = parse_variant(variant);
      const ParameterSet r = read_ptc(random_path);
      const ParameterSet c = read_ptc(candidate_path);
      const ParameterSet t = read_ptc(target_path);
      for (const auto& p : {random_path, candidate_path, target_path}) manifest.add_input(p);
      require_shape_compatible(r, t);
      require_shape_compatible(c, t);
      LayerPartition partition;
      if (layers_path.empty()) {
        partition = default_partition(t, t.contains("fc.weight") ? "fc" : "");
      } else {
        manifest.add_input(layers_path);
        partition = load_partition(layers_path, t);
      }
      const TransferabilityReport report = network_transferability(r, c, t, partition, v);
      nlohmann::json j = to_json(report);
      j["manifest"] = to_json(manifest);
      emit(dump_report(j), out);
      if (!chart.empty()) {
        LineChart lc{"Layer-wise transferability (" + variant + ")", "layer group", "T", {}, {}, false};
        Series s{"T_" + std::string(to_string(v)), {}, {}};
        for (std::size_t i = 0; i < report.layers.size(); ++i) {
          s.x.push_back(static_cast<double>(i));
          s.y.push_back(report.layers[i].T);
          lc.x_categories.push_back(report.layers[i].name);
        }
        lc.series.push_back(std::move(s));
        write_svg(lc, chart);
      }
    } else if (*fit) {
      manifest.subcommand = "fit";
      manifest.arguments = {{"table", table_path}, {"response", response}};
      manifest.add_input(table_path);
      const Response resp = parse_response(response);
      const auto rows = read_table(table_path);
      if (rows.size() < 6) throw InputError("fit needs at least 6 table rows");
      nlohmann::json j;
      j["response"] = resp == Response::TFB ? "tfb" : "tsb";
      j["eq3"] = to_json(fit_eq3(rows, resp, true));
      j["eq3_raw_units"] = to_json(fit_eq3(rows, resp, false));
      j["significance_ln_T"] = to_json(significance_vs_performance(rows, resp, true));
      j["significance_T"] = to_json(significance_vs_performance(rows, resp, false));
      j["manifest"] = to_json(manifest);
      emit(dump_report(j), out);
    } else if (*trainc) {
      tc.seed = seed;
      const fs::path dir = out;
      fs::create_directories(dir);
      const LabeledImages data = generate_synth(spec);
      ParameterSet init = init_path.empty()
                              ? to_parameter_set(init_tinynet(spec.n_classes, seed), CheckpointTag::Random)
                              : read_ptc(init_path);
      const TrainResult result = train(init, data, tc, record);
      ParameterSet trained = result.params;
      trained.set_tag(init_path.empty() ? CheckpointTag::Scratch : CheckpointTag::Finetuned);
      write_ptc(init, dir / "init.ptc");
      write_ptc(trained, dir / "trained.ptc");
      write_text(dir / "layers.json", partition_to_json(canonical_partition(trained)));
      std::string loss = "epoch,loss\n";
      char buf[64];
      for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.9g\n", e + 1, result.loss_history[e]);
        loss += buf;
      }
      write_text(dir / "loss.csv", loss);
      if (record) write_text(dir / "gradients.csv", gradient_profile_csv(result.gradient_profiles));
      if (!export_dir.empty()) {
        fs::create_directories(export_dir);
        for (std::size_t i = 0; i < data.images.size(); ++i) {
          std::snprintf(buf, sizeof buf, "img_%05zu_c%d.png", i, data.labels[i]);
          save_png(data.images[i], fs::path(export_dir) / buf);
        }
      }
    } else if (*demo) {
      run_demo({seed, quick}, out);
    }
  } catch (const DegenerateDistanceError& e) {
    std::cerr << "error: " << e.what();
    if (!e.group().empty()) std::cerr << " [group " << e.group() << "]";
    std::cerr << "\n";
    return kExitDomain;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_domain_error() ? kExitDomain : kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
