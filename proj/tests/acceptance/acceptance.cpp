// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run everything
//   acceptance <id>...    run the listed criteria (1a 1b 2 3a 3b 4 5 6 7 8 9 10)
// Exit status is non-zero if any selected criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "xfer/domain.hpp"
#include "xfer/experiment.hpp"
#include "xfer/features.hpp"
#include "xfer/metrics.hpp"
#include "xfer/ptc.hpp"
#include "xfer/regression.hpp"
#include "xfer/special.hpp"
#include "xfer/table.hpp"
#include "xfer/tinynet.hpp"

using namespace xfer;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kR2Target = 0.90, kR2Tol = 0.03;
constexpr double kInterceptTarget = 2.86, kInterceptTol = 0.05;
constexpr double kFitRuntimeLimit = 1.0;  // seconds
constexpr double kSbR2Ceiling = 0.5;
constexpr double kSignificanceP = 0.001;
constexpr double kRelErrTol = 0.1;
constexpr double kGradRelTol = 1e-4;
constexpr double kEigenTol = 1e-10;
constexpr double kMmdOracleTol = 1e-12;
constexpr double kMmdExample = 0.887095, kMmdExampleTol = 1e-4;
constexpr double kHandTol = 1e-12;
constexpr double kOlsTol = 1e-9;
constexpr double kKaimingRelTol = 0.05;
constexpr double kTrendRuntimeLimit = 600.0;  // seconds per sweep

struct Outcome {
  bool pass = true;
  std::string detail;
  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "MISS ") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<DatasetRow> fixture() { return read_table(fs::path(XFER_DATA_DIR) / "table2.csv"); }

// ---- 1, 2: three-factor fit on the fixture --------------------------------

Outcome c1a() {
  Outcome o;
  const auto rows = fixture();
  const auto t0 = std::chrono::steady_clock::now();
  const FitResult f = fit_eq3(rows, Response::TFB);
  const double elapsed = seconds_since(t0);
  const double bg = f.coefficients[0], bw = f.coefficients[1], bn = f.coefficients[2];
  o.check(std::abs(f.r_squared - kR2Target) <= kR2Tol, "r2=" + fmt("%.4f", f.r_squared));
  o.check(std::abs(f.intercept - kInterceptTarget) <= kInterceptTol, "intercept=" + fmt("%.4f", f.intercept));
  o.check(std::abs(bn) > std::abs(bw) && std::abs(bw) > std::abs(bg),
          "|b_lnN|>|b_W|>|b_G| (" + fmt("%.4f", bn) + "," + fmt("%.4f", bw) + "," + fmt("%.4f", bg) + ")");
  o.check(elapsed < kFitRuntimeLimit, "runtime=" + fmt("%.4fs", elapsed));
  const FitResult raw = fit_eq3(rows, Response::TFB, false);
  o.detail += "; raw-units: G=" + fmt("%.4g", raw.coefficients[0]) + " W=" + fmt("%.4g", raw.coefficients[1]) +
              " lnN=" + fmt("%.4g", raw.coefficients[2]) + " c=" + fmt("%.4g", raw.intercept);
  return o;
}

Outcome c1b() {
  Outcome o;
  const FitResult f = fit_eq3(fixture(), Response::TFB);
  o.check(f.coefficients[0] < 0, "b_G<0 (" + fmt("%.4f", f.coefficients[0]) + ")");
  o.check(f.coefficients[1] < 0, "b_W<0 (" + fmt("%.4f", f.coefficients[1]) + ")");
  o.check(f.coefficients[2] < 0, "b_lnN<0 (" + fmt("%.4f", f.coefficients[2]) + ")");
  return o;
}

Outcome c2() {
  Outcome o;
  const FitResult f = fit_eq3(fixture(), Response::TSB);
  o.check(f.r_squared < kSbR2Ceiling, "T_SB r2=" + fmt("%.4f", f.r_squared));
  return o;
}

// ---- 3: significance ------------------------------------------------------

Outcome significance(Response r, const char* label) {
  Outcome o;
  const auto rows = fixture();
  const FitResult ln = significance_vs_performance(rows, r, true);
  const FitResult raw = significance_vs_performance(rows, r, false);
  o.check(ln.p_value <= kSignificanceP, std::string(label) + " p(ln T)=" + fmt("%.3g", ln.p_value));
  o.detail += "; p(T)=" + fmt("%.3g", raw.p_value);
  return o;
}

Outcome c3a() { return significance(Response::TFB, "T_FB"); }
Outcome c3b() { return significance(Response::TSB, "T_SB"); }

// ---- 4: relative error rates ----------------------------------------------

Outcome c4() {
  Outcome o;
  const auto rows = fixture();
  std::ifstream in(fs::path(XFER_DATA_DIR) / "table2_relative_error.csv");
  std::string line;
  std::getline(in, line);
  std::map<std::string, double> printed;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    printed[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
  }
  double worst = 0;
  std::size_t matched = 0;
  for (const auto& r : rows) {
    const auto it = printed.find(r.name);
    if (it == printed.end()) continue;
    ++matched;
    worst = std::max(worst, std::abs(relative_error_reduction(r.acc_scratch, r.acc_finetune) - it->second));
  }
  o.check(matched == 12, std::to_string(matched) + "/12 rows");
  o.check(worst <= kRelErrTol, "max |diff|=" + fmt("%.4f", worst));
  return o;
}

// ---- 5: normalization -----------------------------------------------------

Outcome c5() {
  Outcome o;
  CounterRng rng(5);
  Tensor r({64}), t({64});
  for (auto& v : r.data()) v = static_cast<float>(rng.normal());
  for (auto& v : t.data()) v = static_cast<float>(rng.normal());
  o.check(layer_transferability({r}, {r}, {t}) == 1.0, "layer T(r,r,t)==1");

  SynthSpec src;
  src.amount = 64;
  src.image_size = 16;
  SynthSpec tgt = src;
  tgt.seed = 9;
  ExperimentConfig cfg = desk_config(1);
  cfg.pretrain.epochs = 1;
  cfg.finetune.epochs = 1;
  const auto full = transfer_experiment(src, tgt, cfg);
  const auto& oc = full.outcome;
  for (auto v : {Variant::FB, Variant::SB}) {
    const auto& target = v == Variant::FB ? oc.finetuned : oc.scratch;
    const auto rep = network_transferability(oc.random, oc.random, target, oc.partition, v);
    bool all_one = rep.network_T == 1.0;
    for (const auto& l : rep.layers) all_one = all_one && l.T == 1.0;
    o.check(all_one, std::string("candidate:=theta_r network_T==1 (") + std::string(to_string(v)) + ")");
  }
  return o;
}

// ---- 6, 7, 8: desk-scale trends ------------------------------------------

constexpr std::uint64_t kDeskSeed = 0;
const std::vector<std::uint64_t> kTrendSeeds = {1, 2, 3};

std::string medians(const std::vector<SweepPoint>& pts) {
  std::string s;
  for (const auto& p : pts) s += (s.empty() ? "" : " ") + fmt("%g:", p.knob) + fmt("%.3f", p.median_t_fb);
  return s;
}

bool strictly_decreasing(const std::vector<SweepPoint>& pts) {
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i].median_t_fb < pts[i - 1].median_t_fb)) return false;
  return true;
}

Outcome trend(SweepKnob knob, const std::vector<double>& values) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto pts = run_sweep(knob, values, kTrendSeeds, desk_config(kDeskSeed), desk_source_spec(kDeskSeed),
                             desk_target_spec(kDeskSeed), knob == SweepKnob::Width);
  const double elapsed = seconds_since(t0);
  o.check(strictly_decreasing(pts), "median T_FB " + medians(pts));
  if (knob == SweepKnob::Width) {
    std::string w;
    for (const auto& p : pts) w += (w.empty() ? "" : " ") + fmt("%.3f", median(p.width));
    o.detail += "; domain width " + w;
  }
  o.check(elapsed < kTrendRuntimeLimit, "runtime=" + fmt("%.0fs", elapsed));
  return o;
}

Outcome c6() { return trend(SweepKnob::Amount, {256, 1024, 4096}); }
Outcome c7() { return trend(SweepKnob::Width, {2, 4, 8}); }

Outcome c8() {
  Outcome o;
  const auto pts = run_sweep(SweepKnob::Shift, {0.1, 0.3, 0.5}, kTrendSeeds, desk_config(kDeskSeed),
                             desk_source_spec(kDeskSeed), desk_target_spec(kDeskSeed));
  for (const auto& p : pts) {
    GradientProfile med{};
    for (std::size_t g = 0; g < kGroupCount; ++g) {
      std::vector<double> v;
      for (const auto& prof : p.first_epoch_gradients) v.push_back(prof[g]);
      med[g] = median(v);
    }
    const std::string at = "shift " + fmt("%g", p.knob) + " [" + fmt("%.4g", med[0]) + "," + fmt("%.4g", med[1]) +
                           "," + fmt("%.4g", med[2]) + "]";
    o.check(med[2] > med[0] && med[2] > med[1], at + " head max");
    if (p.knob >= 0.3) o.check(med[0] > med[1], at + " conv1>conv2");
  }
  return o;
}

// ---- 9: numerical oracles -------------------------------------------------

double grad_check_worst() {
  CounterRng rng(77);
  double worst = 0;
  for (int config = 0; config < 10; ++config) {
    const int classes = 2 + static_cast<int>(rng.below(4));
    const int size = 8 + static_cast<int>(rng.below(5));
    const int batch = 1 + static_cast<int>(rng.below(4));
    NetParams net = init_tinynet(classes, 500 + config);
    for (std::size_t b : {kConv1B, kConv2B, kFcB})
      for (auto& v : net.blobs[b]) v = 0.1 * rng.normal();
    std::vector<Image> images;
    std::vector<int> labels;
    Batch bt{&images, &labels, {}};
    for (int i = 0; i < batch; ++i) {
      Image im(size, size);
      for (auto& v : im.pixels) v = rng.uniform();
      images.push_back(std::move(im));
      labels.push_back(static_cast<int>(rng.below(classes)));
      bt.indices.push_back(i);
    }
    NetParams grads;
    forward_backward(net, bt, grads);
    const double h = 1e-6;
    for (std::size_t b = 0; b < kBlobCount; ++b) {
      double diff2 = 0, num2 = 0, ana2 = 0;
      for (std::size_t i = 0; i < net.blobs[b].size(); ++i) {
        const double keep = net.blobs[b][i];
        net.blobs[b][i] = keep + h;
        const double up = batch_loss(net, bt);
        net.blobs[b][i] = keep - h;
        const double down = batch_loss(net, bt);
        net.blobs[b][i] = keep;
        const double num = (up - down) / (2 * h);
        diff2 += (num - grads.blobs[b][i]) * (num - grads.blobs[b][i]);
        num2 += num * num;
        ana2 += grads.blobs[b][i] * grads.blobs[b][i];
      }
      worst = std::max(worst, std::sqrt(diff2) / std::sqrt(std::max(num2, ana2)));
    }
  }
  return worst;
}

double eigen_check_worst() {
  CounterRng rng(13);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    SquareMatrix a(2);
    a(0, 0) = rng.normal();
    a(1, 1) = rng.normal();
    a(0, 1) = a(1, 0) = rng.normal();
    const double tr = a(0, 0) + a(1, 1), det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    worst = std::max(worst, std::abs(max_eigenvalue(a) - (tr / 2 + std::sqrt(tr * tr / 4 - det))));

    SquareMatrix m(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i; j < 3; ++j) m(i, j) = m(j, i) = rng.normal();
    // Largest root of det(M - lambda I) by the trigonometric cubic solution.
    const double q = (m(0, 0) + m(1, 1) + m(2, 2)) / 3;
    const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
    const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) + (m(2, 2) - q) * (m(2, 2) - q) +
                      2 * p1;
    const double p = std::sqrt(p2 / 6);
    SquareMatrix b(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) b(i, j) = (m(i, j) - (i == j ? q : 0.0)) / p;
    const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                        b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                        b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    const double root = q + 2 * p * std::cos(std::acos(std::clamp(detb / 2, -1.0, 1.0)) / 3);
    worst = std::max(worst, std::abs(max_eigenvalue(m) - root));
  }
  return worst;
}

double mmd_check_worst() {
  CounterRng rng(8);
  double worst = 0;
  for (int trial = 0; trial < 6; ++trial) {
    Samples x(5 + trial, std::vector<double>(4)), y(7, std::vector<double>(4));
    for (auto& r : x)
      for (auto& v : r) v = rng.normal();
    for (auto& r : y)
      for (auto& v : r) v = 1.5 * rng.normal();
    const double sigma = 0.5 + trial;
    const auto k = [&](const std::vector<double>& a, const std::vector<double>& b) {
      double d2 = 0;
      for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
      return std::exp(-d2 / (2 * sigma * sigma));
    };
    double kxx = 0, kyy = 0, kxy = 0;
    for (const auto& a : x)
      for (const auto& b : x) kxx += k(a, b);
    for (const auto& a : y)
      for (const auto& b : y) kyy += k(a, b);
    for (const auto& a : x)
      for (const auto& b : y) kxy += k(a, b);
    const double m = static_cast<double>(x.size()), n = static_cast<double>(y.size());
    const double want = std::sqrt(std::max(kxx / (m * m) + kyy / (n * n) - 2 * kxy / (m * n), 0.0));
    worst = std::max(worst, std::abs(mmd(x, y, sigma).mmd - want));
  }
  return worst;
}

double glcm_hand_worst() {
  Image im(2, 2);
  for (std::size_t y = 0; y < 2; ++y)
    for (std::size_t c = 0; c < 3; ++c) im.at(y, 1, c) = 1.0;
  double worst = 0;
  const auto dev = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
  const Glcm h = glcm(im, Direction::Deg0, 2), v = glcm(im, Direction::Deg90, 2);
  dev(h(0, 1), 0.5);
  dev(h(1, 0), 0.5);
  dev(h(0, 0), 0.0);
  dev(h(1, 1), 0.0);
  dev(v(0, 0), 0.5);
  dev(v(1, 1), 0.5);
  dev(v(0, 1), 0.0);
  const auto a = haralick(h), b = haralick(v), u = haralick(Glcm{2, {1, 0, 0, 0}});
  dev(a.asm_, 0.5);
  dev(a.entropy, std::log(2.0));
  dev(a.contrast, 1.0);
  dev(a.idm, 0.5);
  dev(b.asm_, 0.5);
  dev(b.entropy, std::log(2.0));
  dev(b.contrast, 0.0);
  dev(b.idm, 1.0);
  dev(u.asm_, 1.0);
  dev(u.entropy, 0.0);
  dev(u.contrast, 0.0);
  dev(u.idm, 1.0);
  return worst;
}

Outcome c9() {
  Outcome o;
  const double g = grad_check_worst();
  o.check(g <= kGradRelTol, "grad FD rel=" + fmt("%.2e", g));
  const double e = eigen_check_worst();
  o.check(e <= kEigenTol, "jacobi vs char-poly=" + fmt("%.2e", e));
  const double m = mmd_check_worst();
  o.check(m <= kMmdOracleTol, "mmd vs double-loop=" + fmt("%.2e", m));
  const double ex = mmd({{0.0}}, {{1.0}}, 1.0).mmd;
  o.check(std::abs(ex - kMmdExample) <= kMmdExampleTol, "mmd example=" + fmt("%.6f", ex));
  const double gl = glcm_hand_worst();
  o.check(gl <= kHandTol, "glcm/haralick hand=" + fmt("%.1e", gl));
  const FitResult f = ols({{0}, {1}, {2}}, {0, 1, 1});
  const double worst = std::max({std::abs(f.coefficients[0] - 0.5), std::abs(f.intercept - 1.0 / 6),
                                 std::abs(f.r_squared - 0.75), std::abs(f.f_statistic - 3.0),
                                 std::abs(f.p_value - 1.0 / 3)});
  o.check(worst <= kOlsTol, "ols hand=" + fmt("%.1e", worst));
  return o;
}

// ---- 10: statistical and format invariants --------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome c10() {
  Outcome o;
  CounterRng rng(123);
  const std::size_t fan_in = 8;
  const Tensor t = kaiming_init({100000}, fan_in, rng);
  double mean = 0, var = 0;
  for (float v : t.data()) mean += v;
  mean /= t.size();
  for (float v : t.data()) var += (v - mean) * (v - mean);
  var /= t.size();
  const double target = 2.0 / fan_in;
  o.check(std::abs(var - target) / target <= kKaimingRelTol, "kaiming var=" + fmt("%.5f", var));

  const fs::path tmp = fs::temp_directory_path() / ("xfer_accept_" + std::to_string(::getpid()));
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  bool roundtrip = true;
  for (int trial = 0; trial < 25; ++trial) {
    ParameterSet ps(static_cast<CheckpointTag>(trial % 4));
    const int n = 1 + static_cast<int>(rng.below(6));
    for (int i = 0; i < n; ++i) {
      std::vector<std::size_t> shape;
      for (int r = 0, rank = 1 + static_cast<int>(rng.below(4)); r < rank; ++r) shape.push_back(1 + rng.below(6));
      Tensor x(shape);
      for (auto& v : x.data()) v = static_cast<float>(rng.normal() * std::exp(10 * rng.normal()));
      ps.add("p" + std::to_string(i), std::move(x));
    }
    write_ptc(ps, tmp / "ck.ptc");
    const ParameterSet back = read_ptc(tmp / "ck.ptc");
    roundtrip = roundtrip && back.tag() == ps.tag() && back.size() == ps.size();
    for (std::size_t i = 0; roundtrip && i < ps.size(); ++i) {
      const auto& a = ps.entries()[i].second;
      const auto& b = back.entries()[i].second;
      roundtrip = ps.entries()[i].first == back.entries()[i].first && a.shape() == b.shape() &&
                  std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0;
    }
  }
  o.check(roundtrip, "ptc round trip bitwise (25 checkpoints)");

  bool stable = true;
  std::size_t files = 0;
  for (const char* run : {"a", "b"}) {
    const std::string cmd =
        std::string(XFER_CLI) + " demo --quick --seed 0 --out '" + (tmp / run).string() + "' >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    stable = stable && WIFEXITED(status) && WEXITSTATUS(status) == 0;
  }
  if (stable) {
    for (const auto& e : fs::recursive_directory_iterator(tmp / "a")) {
      if (!e.is_regular_file()) continue;
      ++files;
      const fs::path other = tmp / "b" / fs::relative(e.path(), tmp / "a");
      stable = stable && fs::exists(other) && slurp(e.path()) == slurp(other);
    }
    std::size_t files_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(tmp / "b")) files_b += e.is_regular_file();
    stable = stable && files == files_b && files > 0;
  }
  o.check(stable, "demo bundle byte-stable (" + std::to_string(files) + " files)");
  fs::remove_all(tmp);
  return o;
}

struct Criterion {
  const char* id;
  const char* title;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"1a", "three-factor fit on fixture: r2, intercept, magnitude order, runtime", c1a},
    {"1b", "three-factor fit on fixture: all coefficients negative", c1b},
    {"2", "T_SB fit degrades", c2},
    {"3a", "significance vs performance, T_FB", c3a},
    {"3b", "significance vs performance, T_SB", c3b},
    {"4", "relative error rate row", c4},
    {"5", "transferability normalization", c5},
    {"6", "desk amount sweep: median T_FB decreasing", c6},
    {"7", "desk width sweep: median T_FB decreasing", c7},
    {"8", "fine-tune gradient profile shape", c8},
    {"9", "numerical oracles", c9},
    {"10", "statistical and format invariants", c10},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0, ran = 0;
  for (const auto& c : kCriteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("[%s] %-3s %s -- %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion matched\n");
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
