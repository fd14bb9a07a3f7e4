#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xfer/metrics.hpp"
#include "xfer/synth.hpp"
#include "xfer/trainer.hpp"

namespace xfer {

struct ExperimentConfig {
  TrainConfig pretrain;
  TrainConfig finetune;
};

// Pre-trains on `source` from init_tinynet(source classes, config.seed).
TrainResult pretrain_source(const LabeledImages& source, const TrainConfig& config);

struct TransferOutcome {
  ParameterSet random;      // theta_r, shaped for the target task
  ParameterSet pretrained;  // theta_A backbone with theta_r's head
  ParameterSet finetuned;   // theta_FB
  ParameterSet scratch;     // theta_SB
  LayerPartition partition;
  TransferabilityReport fb;
  TransferabilityReport sb;
  TrainResult finetune_run;
  TrainResult scratch_run;
};

// theta_r = init_tinynet(target classes, config.seed). The fine-tune start is
// the pre-trained backbone with theta_r's head, so theta_r is the head's
// re-initialization and the shared starting point of scratch training.
TransferOutcome measure_transfer(const ParameterSet& pretrained, const LabeledImages& target,
                                 const TrainConfig& config, bool record_gradients = true);

struct FullExperiment {
  ParameterSet source_trained;  // theta_A with its source head
  TransferOutcome outcome;
};

FullExperiment transfer_experiment(const SynthSpec& source, const SynthSpec& target, const ExperimentConfig& config);

// Default desk-scale settings: pre-training and fine-tuning hyperparameters
// with the epoch counts the trend experiments use.
ExperimentConfig desk_config(std::uint64_t seed);
SynthSpec desk_source_spec(std::uint64_t seed);
SynthSpec desk_target_spec(std::uint64_t seed);

struct SweepPoint {
  double knob = 0.0;               // amount, clusters_per_class, or shift
  std::vector<double> t_fb;        // one per seed
  std::vector<double> t_sb;
  std::vector<GradientProfile> first_epoch_gradients;  // one per seed
  std::vector<double> width;       // target domain width per seed
  std::vector<double> gap;         // target gap vs source per seed
  double median_t_fb = 0.0;
  double median_t_sb = 0.0;
};

enum class SweepKnob { Amount, Width, Shift };

// Sweeps one target knob over `values` for each seed; the pre-trained model is
// shared across knob values within a seed.
std::vector<SweepPoint> run_sweep(SweepKnob knob, const std::vector<double>& values,
                                  const std::vector<std::uint64_t>& seeds, const ExperimentConfig& config,
                                  const SynthSpec& source_base, const SynthSpec& target_base,
                                  bool measure_domain = false);

std::string sweep_csv(SweepKnob knob, const std::vector<SweepPoint>& points);

double median(std::vector<double> v);

}  // namespace xfer
