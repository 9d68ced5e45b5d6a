#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vwss/data.hpp"
#include "vwss/errors.hpp"
#include "vwss/io.hpp"
#include "vwss/model.hpp"
#include "vwss/rng.hpp"
#include "vwss/thresholding.hpp"

using vwss::FeatureMatrix;
using vwss::LabelSeries;
using vwss::Mlp;
using vwss::MlpConfig;
using vwss::TrainConfig;

namespace {

namespace fs = std::filesystem;

// Plain-loop forward pass kept deliberately independent of the library's
// kernel-based one. Returns every affine preactivation so tests can verify
// that a configuration sits safely away from the ReLU kinks and the output
// clamp before trusting finite differences.
struct ManualForward {
  std::vector<std::vector<double>> preacts;
  double prob_raw = 0.0;
};

ManualForward manual_forward(const Mlp& mlp, const double* x) {
  const auto& sizes = mlp.config().layer_sizes;
  ManualForward out;
  std::vector<double> a(x, x + sizes.front());
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const std::size_t in = sizes[l];
    const std::size_t width = sizes[l + 1];
    std::vector<double> z(width);
    for (std::size_t o = 0; o < width; ++o) {
      double acc = mlp.biases()[l][o];
      for (std::size_t i = 0; i < in; ++i) {
        acc += mlp.weights()[l][o * in + i] * a[i];
      }
      z[o] = acc;
    }
    out.preacts.push_back(z);
    if (l + 2 < sizes.size()) {
      for (double& v : z) v = v > 0.0 ? v : 0.0;
      a = std::move(z);
    } else {
      out.prob_raw = 1.0 / (1.0 + std::exp(-z[0]));
    }
  }
  return out;
}

// True when every hidden preactivation clears the kink by `margin` and the
// raw output probability is far from the clamp, for every row of x.
bool margins_clear(const Mlp& mlp, const FeatureMatrix& x, double margin) {
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const ManualForward f = manual_forward(mlp, x.row(r));
    for (std::size_t l = 0; l + 1 < f.preacts.size(); ++l) {
      for (const double z : f.preacts[l]) {
        if (std::abs(z) < margin) return false;
      }
    }
    if (f.prob_raw < 1e-6 || f.prob_raw > 1.0 - 1e-6) return false;
  }
  return true;
}

double loss_of(const Mlp& mlp, const FeatureMatrix& x, const LabelSeries& y) {
  return mlp.loss_and_gradient(x, y).first;
}

struct FdOutcome {
  double max_rel_err = 0.0;
  std::size_t params = 0;
};

// Central-difference check of every weight and bias entry. The relative
// error uses |fd| + |g| with a small floor so that near-zero gradients are
// compared absolutely.
FdOutcome finite_difference_check(const Mlp& mlp, const FeatureMatrix& x,
                                  const LabelSeries& y) {
  const auto [base_loss, grads] = mlp.loss_and_gradient(x, y);
  (void)base_loss;
  FdOutcome outcome;
  const auto probe = [&](bool weight_layer, std::size_t l, std::size_t i,
                         double analytic) {
    Mlp lo = mlp;
    Mlp hi = mlp;
    auto& lo_p = weight_layer ? lo.mutable_weights()[l] : lo.mutable_biases()[l];
    auto& hi_p = weight_layer ? hi.mutable_weights()[l] : hi.mutable_biases()[l];
    const double h = 1e-5 * std::max(1.0, std::abs(lo_p[i]));
    lo_p[i] -= h;
    hi_p[i] += h;
    const double fd = (loss_of(hi, x, y) - loss_of(lo, x, y)) / (2.0 * h);
    const double rel =
        std::abs(fd - analytic) / std::max(std::abs(fd) + std::abs(analytic), 1e-2);
    outcome.max_rel_err = std::max(outcome.max_rel_err, rel);
    ++outcome.params;
  };
  for (std::size_t l = 0; l < mlp.weight_layers(); ++l) {
    for (std::size_t i = 0; i < mlp.weights()[l].size(); ++i) {
      probe(true, l, i, grads.weights[l][i]);
    }
    for (std::size_t i = 0; i < mlp.biases()[l].size(); ++i) {
      probe(false, l, i, grads.biases[l][i]);
    }
  }
  return outcome;
}

FeatureMatrix random_features(vwss::Rng& rng, std::size_t rows,
                              std::size_t cols) {
  std::vector<double> values(rows * cols);
  for (double& v : values) v = 2.0 * rng.next_unit() - 1.0;
  return FeatureMatrix(rows, cols, std::move(values));
}

LabelSeries random_labels(vwss::Rng& rng, std::size_t n) {
  std::vector<std::uint8_t> values(n);
  for (auto& v : values) v = rng.next_unit() < 0.5 ? 1 : 0;
  return LabelSeries(std::move(values));
}

// A cleanly separable one-feature problem: negatives live in [-2, -1],
// positives in [1, 2].
struct Toy {
  FeatureMatrix x;
  LabelSeries y;
};

Toy separable_toy(std::size_t n, std::uint64_t seed) {
  vwss::Rng rng(seed);
  std::vector<double> xs(n);
  std::vector<std::uint8_t> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    ys[i] = pos ? 1 : 0;
    const double u = rng.next_unit();
    xs[i] = pos ? 1.0 + u : -2.0 + u;
  }
  return {FeatureMatrix(n, 1, std::move(xs)), LabelSeries(std::move(ys))};
}

double mean_bce(const std::vector<double>& probs,
                const std::vector<std::uint8_t>& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    total += y[i] ? -std::log(probs[i]) : -std::log(1.0 - probs[i]);
  }
  return total / static_cast<double>(probs.size());
}

fs::path temp_dir() {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("vwss_model_test_" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("network and schedule configurations are validated") {
  CHECK_THROWS_AS(Mlp(MlpConfig{{5}, {}, 1}), vwss::DomainError);
  CHECK_THROWS_AS(Mlp(MlpConfig{{3, 0, 1}, {}, 1}), vwss::DomainError);
  CHECK_THROWS_AS(Mlp(MlpConfig{{3, 2}, {}, 1}), vwss::DomainError);
  CHECK_THROWS_AS(Mlp(MlpConfig{{3, 1}, {0.1, 0.1}, 1}), vwss::DomainError);
  CHECK_THROWS_AS(Mlp(MlpConfig{{3, 1}, {-0.1}, 1}), vwss::DomainError);

  const FeatureMatrix x(2, 1, {0.5, -0.5});
  const LabelSeries y({1, 0});
  const MlpConfig net{{1, 1}, {}, 1};
  const auto run = [&](TrainConfig cfg) {
    vwss::train_run(x, y, x, nullptr, net, cfg);
  };
  TrainConfig bad;
  bad.epochs = 0;
  CHECK_THROWS_AS(run(bad), vwss::DomainError);
  bad = TrainConfig{};
  bad.batch_size = 0;
  CHECK_THROWS_AS(run(bad), vwss::DomainError);
  bad = TrainConfig{};
  bad.learning_rate = -0.1;
  CHECK_THROWS_AS(run(bad), vwss::DomainError);
  bad = TrainConfig{};
  bad.adam_beta1 = 1.0;
  CHECK_THROWS_AS(run(bad), vwss::DomainError);
  bad = TrainConfig{};
  bad.adam_epsilon = 0.0;
  CHECK_THROWS_AS(run(bad), vwss::DomainError);
}

TEST_CASE("initialization is fan-in bounded, zero-biased, and seed-determined") {
  const MlpConfig cfg{{4, 5, 1}, {}, 77};
  const Mlp a(cfg);
  const Mlp b(cfg);
  MlpConfig other = cfg;
  other.seed = 78;
  const Mlp c(other);

  for (std::size_t l = 0; l < a.weight_layers(); ++l) {
    const double bound =
        1.0 / std::sqrt(static_cast<double>(cfg.layer_sizes[l]));
    for (const double w : a.weights()[l]) {
      CHECK(std::abs(w) <= bound);
    }
    for (const double bias : a.biases()[l]) CHECK(bias == 0.0);
    CHECK(a.weights()[l] == b.weights()[l]);
  }
  CHECK(a.weights()[0] != c.weights()[0]);
}

TEST_CASE("with all parameters zero every probability is one half") {
  MlpConfig cfg{{3, 4, 1}, {}, 1};
  const Mlp mlp = Mlp::from_parameters(
      cfg, {std::vector<double>(12, 0.0), std::vector<double>(4, 0.0)},
      {std::vector<double>(4, 0.0), std::vector<double>(1, 0.0)});
  vwss::Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const double x[3] = {rng.next_unit(), -rng.next_unit(), rng.next_unit()};
    CHECK(mlp.forward(x, 3) == 0.5);
  }
}

TEST_CASE("a single affine layer is logistic regression") {
  const MlpConfig cfg{{2, 1}, {}, 1};
  const Mlp mlp = Mlp::from_parameters(cfg, {{0.7, -0.3}}, {{0.1}});
  const double x[2] = {0.5, 0.25};
  const double z = 0.7 * 0.5 + -0.3 * 0.25 + 0.1;
  CHECK(mlp.forward(x, 2) == doctest::Approx(1.0 / (1.0 + std::exp(-z))).epsilon(1e-15));

  // And the library forward agrees with the plain-loop reimplementation on
  // deeper random networks.
  vwss::Rng rng(31);
  for (int round = 0; round < 20; ++round) {
    const MlpConfig deep{{3, 6, 4, 1}, {}, 1000 + static_cast<std::uint64_t>(round)};
    const Mlp net(deep);
    const double xs[3] = {2.0 * rng.next_unit() - 1.0, 2.0 * rng.next_unit() - 1.0,
                          2.0 * rng.next_unit() - 1.0};
    const ManualForward f = manual_forward(net, xs);
    const double clamped = std::min(std::max(f.prob_raw, 1e-7), 1.0 - 1e-7);
    CHECK(net.forward(xs, 3) == doctest::Approx(clamped).epsilon(1e-12));
  }
}

TEST_CASE("forward passes reject mismatched widths") {
  const Mlp mlp(MlpConfig{{2, 1}, {}, 1});
  const double x[3] = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(mlp.forward(x, 3), vwss::DomainError);
  CHECK_THROWS_AS(mlp.forward_matrix(FeatureMatrix(1, 3, {0.1, 0.2, 0.3})),
                  vwss::DomainError);
  CHECK_THROWS_AS(
      mlp.loss_and_gradient(FeatureMatrix(2, 2, {0.1, 0.2, 0.3, 0.4}),
                            LabelSeries({1, 0, 1})),
      vwss::AlignmentError);
  CHECK_THROWS_AS(
      mlp.loss_and_gradient(FeatureMatrix(0, 2, {}), LabelSeries({1})),
      vwss::AlignmentError);
}

TEST_CASE("analytic gradients match central finite differences") {
  vwss::Rng rng(20260815);
  int configs_checked = 0;
  int attempts = 0;
  double worst = 0.0;
  while (configs_checked < 100 && attempts < 3000) {
    ++attempts;
    const std::size_t depth = rng.next_below(4);  // 0..3 hidden layers
    MlpConfig cfg;
    cfg.layer_sizes.push_back(1 + rng.next_below(6));
    for (std::size_t d = 0; d < depth; ++d) {
      cfg.layer_sizes.push_back(1 + rng.next_below(8));
    }
    cfg.layer_sizes.push_back(1);
    for (std::size_t l = 0; l + 1 < cfg.layer_sizes.size(); ++l) {
      const double pick = rng.next_unit();
      cfg.l2_per_layer.push_back(pick < 0.4 ? 0.0 : (pick < 0.7 ? 0.001 : 0.01));
    }
    cfg.seed = rng.next_below(1u << 30);

    const std::size_t n = 3 + rng.next_below(10);
    const Mlp mlp(cfg);
    const FeatureMatrix x = random_features(rng, n, cfg.layer_sizes.front());
    if (!margins_clear(mlp, x, 1e-3)) continue;  // too close to a ReLU kink
    const LabelSeries y = random_labels(rng, n);

    const FdOutcome outcome = finite_difference_check(mlp, x, y);
    worst = std::max(worst, outcome.max_rel_err);
    CHECK(outcome.params > 0);
    ++configs_checked;
  }
  REQUIRE(configs_checked == 100);
  CHECK(worst < 1e-4);
}

TEST_CASE("training is bit-deterministic under fixed seeds") {
  const Toy toy = separable_toy(24, 9);
  const FeatureMatrix x_valid(2, 1, {1.5, -1.5});
  MlpConfig net{{1, 4, 1}, {0.001, 0.001}, 42};
  TrainConfig sched;
  sched.epochs = 7;
  sched.learning_rate = 0.02;
  sched.batch_size = 5;
  sched.shuffle_seed = 3;

  const auto a = vwss::train_run(toy.x, toy.y, x_valid, &x_valid, net, sched);
  const auto b = vwss::train_run(toy.x, toy.y, x_valid, &x_valid, net, sched);
  REQUIRE(a.snapshots.size() == 7);
  REQUIRE(b.snapshots.size() == 7);
  for (std::size_t e = 0; e < 7; ++e) {
    CHECK(a.snapshots[e].epoch_index == e + 1);
    CHECK(a.snapshots[e].train_probs.values() == b.snapshots[e].train_probs.values());
    CHECK(a.snapshots[e].valid_probs.values() == b.snapshots[e].valid_probs.values());
    CHECK(a.test_rows[e].epoch_index == e + 1);
    CHECK(a.test_rows[e].probs.values() == b.test_rows[e].probs.values());
  }
  CHECK(a.model.weights() == b.model.weights());
  CHECK(a.model.biases() == b.model.biases());
}

TEST_CASE("a zero learning rate leaves the initial network untouched") {
  const Toy toy = separable_toy(12, 4);
  MlpConfig net{{1, 3, 1}, {}, 11};
  TrainConfig sched;
  sched.epochs = 1;
  sched.learning_rate = 0.0;
  const auto run = vwss::train_run(toy.x, toy.y, toy.x, nullptr, net, sched);
  const Mlp fresh(net);
  CHECK(run.snapshots[0].train_probs.values() ==
        fresh.forward_matrix(toy.x).values());
  CHECK(run.model.weights() == fresh.weights());
}

TEST_CASE("single-class training labels are rejected") {
  const FeatureMatrix x(3, 1, {0.1, 0.2, 0.3});
  CHECK_THROWS_AS(vwss::train_run(x, LabelSeries({1, 1, 1}), x, nullptr,
                                  MlpConfig{{1, 1}, {}, 1}, TrainConfig{}),
                  vwss::DegenerateDataError);
}

TEST_CASE("an exploding schedule raises a divergence error naming the epoch") {
  const Toy toy = separable_toy(8, 2);
  MlpConfig net{{1, 2, 1}, {0.5, 0.5}, 5};
  TrainConfig sched;
  sched.epochs = 5;
  sched.learning_rate = 1e160;  // one Adam step moves weights to ~1e160
  sched.batch_size = 64;        // one batch per epoch
  try {
    vwss::train_run(toy.x, toy.y, toy.x, nullptr, net, sched);
    FAIL("expected DivergenceError");
  } catch (const vwss::DivergenceError& e) {
    CHECK(e.epoch() == 2);  // the squared-weight penalty overflows then
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
  }
}

TEST_CASE("training separates a separable toy problem") {
  const Toy toy = separable_toy(40, 17);
  MlpConfig net{{1, 4, 1}, {}, 3};
  TrainConfig sched;
  sched.epochs = 60;
  sched.learning_rate = 0.05;
  sched.batch_size = 8;
  const auto snapshots =
      vwss::train_with_snapshots(toy.x, toy.y, toy.x, net, sched);
  REQUIRE(snapshots.size() == 60);

  vwss::ThresholdSearch search;
  search.spec.kind = vwss::SkillScore::kTss;
  const auto result =
      vwss::optimize_threshold(toy.y, snapshots.back().train_probs, search);
  CHECK(result.score == 1.0);

  // The full-set cross-entropy recomputed from the per-epoch snapshots,
  // smoothed over a 20-epoch window, decreases throughout the run.
  std::vector<double> bce;
  for (const auto& s : snapshots) {
    bce.push_back(mean_bce(s.train_probs.values(), toy.y.values()));
  }
  std::vector<double> smoothed;
  for (std::size_t e = 0; e + 20 <= bce.size(); ++e) {
    double total = 0.0;
    for (std::size_t i = e; i < e + 20; ++i) total += bce[i];
    smoothed.push_back(total / 20.0);
  }
  for (std::size_t i = 1; i < smoothed.size(); ++i) {
    CHECK(smoothed[i] < smoothed[i - 1]);
  }
}

TEST_CASE("model files round-trip parameters and standardization") {
  const Toy toy = separable_toy(16, 21);
  MlpConfig net{{1, 3, 1}, {0.01, 0.0}, 8};
  TrainConfig sched;
  sched.epochs = 3;
  const auto run = vwss::train_run(toy.x, toy.y, toy.x, nullptr, net, sched);

  const fs::path dir = temp_dir();
  const fs::path with_std = dir / "model.json";
  const vwss::Standardizer standardizer = vwss::Standardizer::fit(toy.x);
  vwss::save_model_json(with_std, run.model, standardizer);
  const vwss::LoadedModel loaded = vwss::load_model_json(with_std);
  CHECK(loaded.model.weights() == run.model.weights());
  CHECK(loaded.model.biases() == run.model.biases());
  CHECK(loaded.model.config().layer_sizes == net.layer_sizes);
  REQUIRE(loaded.standardizer.has_value());
  CHECK(loaded.standardizer->means() == standardizer.means());
  CHECK(loaded.standardizer->stdevs() == standardizer.stdevs());
  CHECK(loaded.model.forward_matrix(toy.x).values() ==
        run.model.forward_matrix(toy.x).values());

  const fs::path without_std = dir / "bare.json";
  vwss::save_model_json(without_std, run.model, std::nullopt);
  CHECK_FALSE(vwss::load_model_json(without_std).standardizer.has_value());

  const fs::path garbage = dir / "garbage.json";
  vwss::io::atomic_write_text(garbage, "{not json");
  CHECK_THROWS_AS(vwss::load_model_json(garbage), vwss::InputError);
  const fs::path wrong_version = dir / "v2.json";
  vwss::io::atomic_write_text(wrong_version, "{\"format_version\": 2}\n");
  CHECK_THROWS_AS(vwss::load_model_json(wrong_version), vwss::InputError);
  fs::remove_all(dir);
}
