#include "xfer/experiment.hpp"

#include <algorithm>
#include <cstdio>

#include "xfer/domain.hpp"
#include "xfer/error.hpp"
#include "xfer/features.hpp"

namespace xfer {

TrainResult pretrain_source(const LabeledImages& source, const TrainConfig& config) {
  const ParameterSet init = to_parameter_set(init_tinynet(source.classes, config.seed), CheckpointTag::Random);
  TrainResult r = train(init, source, config);
  r.params.set_tag(CheckpointTag::Pretrained);
  return r;
}

TransferOutcome measure_transfer(const ParameterSet& pretrained, const LabeledImages& target,
                                 const TrainConfig& config, bool record_gradients) {
  TransferOutcome out;
  const NetParams random = init_tinynet(target.classes, config.seed);
  out.random = to_parameter_set(random, CheckpointTag::Random);

  NetParams start = from_parameter_set(pretrained);
  start.classes = random.classes;
  start.blobs[kFcW] = random.blobs[kFcW];
  start.blobs[kFcB] = random.blobs[kFcB];
  out.pretrained = to_parameter_set(start, CheckpointTag::Pretrained);
  out.partition = canonical_partition(out.random);

  out.finetune_run = train(out.pretrained, target, config, record_gradients);
  out.finetuned = out.finetune_run.params;
  out.finetuned.set_tag(CheckpointTag::Finetuned);
  out.scratch_run = train(out.random, target, config);
  out.scratch = out.scratch_run.params;
  out.scratch.set_tag(CheckpointTag::Scratch);

  out.fb = network_transferability(out.random, out.pretrained, out.finetuned, out.partition, Variant::FB);
  out.sb = network_transferability(out.random, out.pretrained, out.scratch, out.partition, Variant::SB);
  return out;
}

FullExperiment transfer_experiment(const SynthSpec& source, const SynthSpec& target, const ExperimentConfig& config) {
  if (source.image_size != target.image_size) throw InputError("source and target image sizes differ");
  FullExperiment e;
  e.source_trained = pretrain_source(generate_synth(source), config.pretrain).params;
  e.outcome = measure_transfer(e.source_trained, generate_synth(target), config.finetune);
  return e;
}

ExperimentConfig desk_config(std::uint64_t seed) {
  ExperimentConfig c;
  // The reference schedule (lr 0.01, batch 128) barely leaves the
  // initialization on a few thousand 32x32 images; smaller batches and a
  // doubled rate let both runs converge within a desk-scale budget.
  for (TrainConfig* t : {&c.pretrain, &c.finetune}) {
    t->seed = seed;
    t->lr0 = 0.02;
    t->batch_size = 32;
  }
  c.pretrain.epochs = 12;
  c.finetune.epochs = 15;
  return c;
}

SynthSpec desk_source_spec(std::uint64_t seed) {
  SynthSpec s;
  s.n_classes = 8;
  s.clusters_per_class = 2;
  s.amount = 2048;
  s.seed = seed;
  return s;
}

SynthSpec desk_target_spec(std::uint64_t seed) {
  SynthSpec s;
  s.n_classes = 4;
  s.clusters_per_class = 2;
  s.amount = 512;
  s.shift = 0.1;
  s.seed = seed + 7919;
  return s;
}

double median(std::vector<double> v) {
  if (v.empty()) throw InputError("median of an empty sequence");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<SweepPoint> run_sweep(SweepKnob knob, const std::vector<double>& values,
                                  const std::vector<std::uint64_t>& seeds, const ExperimentConfig& config,
                                  const SynthSpec& source_base, const SynthSpec& target_base, bool measure_domain) {
  std::vector<SweepPoint> points(values.size());
  for (std::size_t v = 0; v < values.size(); ++v) points[v].knob = values[v];

  for (std::uint64_t seed : seeds) {
    SynthSpec source = source_base;
    source.seed = source_base.seed + seed;
    TrainConfig pre = config.pretrain;
    pre.seed = seed;
    const LabeledImages source_data = generate_synth(source);
    const ParameterSet theta_a = pretrain_source(source_data, pre).params;
    DatasetProfile source_profile;
    if (measure_domain) {
      for (const auto& img : source_data.images) source_profile.features.push_back(featurize_image(img));
      source_profile.name = "source";
      source_profile.source_count = source_data.images.size();
    }

    for (std::size_t v = 0; v < values.size(); ++v) {
      SynthSpec target = target_base;
      target.seed = target_base.seed + seed;
      switch (knob) {
        case SweepKnob::Amount: target.amount = static_cast<int>(values[v]); break;
        case SweepKnob::Width: target.clusters_per_class = static_cast<int>(values[v]); break;
        case SweepKnob::Shift: target.shift = values[v]; break;
      }
      const LabeledImages target_data = generate_synth(target);
      TrainConfig fine = config.finetune;
      fine.seed = seed;
      const TransferOutcome out = measure_transfer(theta_a, target_data, fine, true);
      points[v].t_fb.push_back(out.fb.network_T);
      points[v].t_sb.push_back(out.sb.network_T);
      points[v].first_epoch_gradients.push_back(out.finetune_run.gradient_profiles.front());
      if (measure_domain) {
        DatasetProfile p;
        p.name = "target";
        p.source_count = target_data.images.size();
        for (const auto& img : target_data.images) p.features.push_back(featurize_image(img));
        const DomainMetrics m = domain_metrics(p, source_profile);
        points[v].gap.push_back(m.gap);
        points[v].width.push_back(m.width);
      }
    }
  }
  for (auto& p : points) {
    p.median_t_fb = median(p.t_fb);
    p.median_t_sb = median(p.t_sb);
  }
  return points;
}

std::string sweep_csv(SweepKnob knob, const std::vector<SweepPoint>& points) {
  const char* name = knob == SweepKnob::Amount ? "amount" : knob == SweepKnob::Width ? "clusters_per_class" : "shift";
  std::string out = std::string(name) + ",seed_index,t_fb,t_sb,grad_conv1,grad_conv2,grad_fc\n";
  char buf[256];
  for (const auto& p : points)
    for (std::size_t s = 0; s < p.t_fb.size(); ++s) {
      const auto& g = p.first_epoch_gradients[s];
      std::snprintf(buf, sizeof buf, "%.9g,%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n", p.knob, s, p.t_fb[s], p.t_sb[s], g[0],
                    g[1], g[2]);
      out += buf;
    }
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.9g,median,%.9g,%.9g,,,\n", p.knob, p.median_t_fb, p.median_t_sb);
    out += buf;
  }
  return out;
}

}  // namespace xfer
