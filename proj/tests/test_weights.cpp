#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "vwss/errors.hpp"
#include "vwss/rng.hpp"
#include "vwss/weights.hpp"

using vwss::LabelSeries;
using vwss::PredictionSeries;
using vwss::WindowConfig;

namespace {

bool admissible_weight(double w) {
  return w == 2.0 || (w >= 0.5 && w <= 1.0);
}

struct RandomInstance {
  std::vector<std::uint8_t> y;
  std::vector<std::uint8_t> p;
  int k;
};

RandomInstance random_instance(vwss::Rng& rng, std::size_t max_n, int max_k) {
  RandomInstance inst;
  const std::size_t n = 1 + rng.next_below(max_n);
  inst.y.resize(n);
  inst.p.resize(n);
  const double y_rate = rng.next_unit();
  const double p_rate = rng.next_unit();
  for (std::size_t i = 0; i < n; ++i) {
    inst.y[i] = rng.next_unit() < y_rate ? 1 : 0;
    inst.p[i] = rng.next_unit() < p_rate ? 1 : 0;
  }
  inst.k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_k)));
  return inst;
}

}  // namespace

TEST_CASE("false-positive weight psi follows the case analysis") {
  const WindowConfig k3{3};

  // An event one step ahead halves the error.
  CHECK(vwss::psi(LabelSeries({0, 1, 0, 0, 0}), 0, k3) == 0.5);
  // No event anywhere in the window doubles it.
  CHECK(vwss::psi(LabelSeries({0, 0, 0, 0, 0}), 2, k3) == 2.0);
  // An event strictly before i only: full single weight.
  CHECK(vwss::psi(LabelSeries({1, 0, 0, 0, 0}), 1, k3) == 1.0);
  // Nearest future event two steps ahead: 1 - 1/3.
  CHECK(vwss::psi(LabelSeries({0, 0, 0, 1, 0, 0, 0}), 1, k3) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  // The event beyond the window does not count.
  CHECK(vwss::psi(LabelSeries({0, 0, 0, 0, 1}), 0, WindowConfig{3}) == 2.0);
}

TEST_CASE("false-negative weight phi mirrors psi into the past") {
  // An alarm one step back halves the miss.
  CHECK(vwss::phi(PredictionSeries({1, 0, 0, 0}), 1, WindowConfig{3}) == 0.5);
  // No alarm in the window doubles it.
  CHECK(vwss::phi(PredictionSeries({0, 0, 0, 0, 0}), 2, WindowConfig{2}) == 2.0);
  // Alarm only after i: full single weight.
  CHECK(vwss::phi(PredictionSeries({0, 0, 1, 0}), 1, WindowConfig{2}) == 1.0);
  // Nearest past alarm two steps back with K=2: 1 - 1/3.
  CHECK(vwss::phi(PredictionSeries({1, 0, 0}), 2, WindowConfig{2}) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("weight functions validate window and index") {
  const LabelSeries y({0, 1});
  CHECK_THROWS_AS(vwss::psi(y, 0, WindowConfig{0}), vwss::DomainError);
  CHECK_THROWS_AS(vwss::psi(y, 2, WindowConfig{1}), vwss::DomainError);
  CHECK_THROWS_AS(vwss::phi(PredictionSeries({0, 1}), 5, WindowConfig{1}),
                  vwss::DomainError);
}

TEST_CASE("weighted matrix on hand-checked inputs") {
  SUBCASE("early alarm and near miss both weigh one half") {
    const auto [m, report] = vwss::weighted_confusion_matrix(
        LabelSeries({0, 1, 0, 0, 0}), PredictionSeries({1, 0, 0, 0, 0}),
        WindowConfig{2});
    CHECK(m.tp() == 0);
    CHECK(m.tn() == 3);
    CHECK(m.fp() == 0.5);
    CHECK(m.fn() == 0.5);
    REQUIRE(report.fp_weights.size() == 1);
    REQUIRE(report.fn_weights.size() == 1);
    CHECK(report.fp_weights[0] == std::pair<std::size_t, double>{0, 0.5});
    CHECK(report.fn_weights[0] == std::pair<std::size_t, double>{1, 0.5});
    CHECK(m.mode() == vwss::MatrixMode::kValueWeighted);
  }
  SUBCASE("perfect prediction leaves nothing to weigh") {
    const auto [m, report] = vwss::weighted_confusion_matrix(
        LabelSeries({1, 0, 1, 1}), PredictionSeries({1, 0, 1, 1}),
        WindowConfig{3});
    CHECK(m.fp() == 0);
    CHECK(m.fn() == 0);
    CHECK(report.fp_weights.empty());
    CHECK(report.fn_weights.empty());
  }
  SUBCASE("length mismatch rejected") {
    CHECK_THROWS_AS(vwss::weighted_confusion_total(LabelSeries({0, 1}),
                                                   PredictionSeries({1}),
                                                   WindowConfig{1}),
                    vwss::AlignmentError);
  }
}

TEST_CASE("weight properties over randomized instances") {
  vwss::Rng rng(2024);
  for (int round = 0; round < 2000; ++round) {
    const RandomInstance inst = random_instance(rng, 120, 8);
    const LabelSeries y(inst.y);
    const PredictionSeries p(inst.p);
    const WindowConfig cfg{inst.k};

    const auto [m, report] = vwss::weighted_confusion_matrix(y, p, cfg);
    const auto quality = vwss::confusion_matrix(y, p);

    // tp/tn match the plain counts exactly.
    CHECK(m.tp() == quality.tp());
    CHECK(m.tn() == quality.tn());

    // Degeneration: one weight entry per mismatch, so constant-1 weights
    // reproduce the quality matrix exactly.
    CHECK(static_cast<double>(report.fp_weights.size()) == quality.fp());
    CHECK(static_cast<double>(report.fn_weights.size()) == quality.fn());

    // Codomain and the mass bounds it implies.
    for (const auto& [i, weight] : report.fp_weights) {
      CHECK(admissible_weight(weight));
      CHECK(weight == oracle::weight(inst.y, i, inst.k, +1));
    }
    for (const auto& [i, weight] : report.fn_weights) {
      CHECK(admissible_weight(weight));
      CHECK(weight == oracle::weight(inst.p, i, inst.k, -1));
    }
    CHECK(m.fp() >= 0.5 * quality.fp());
    CHECK(m.fp() <= 2.0 * quality.fp());
    CHECK(m.fn() >= 0.5 * quality.fn());
    CHECK(m.fn() <= 2.0 * quality.fn());
  }
}

TEST_CASE("weights depend only on the window contents (locality)") {
  vwss::Rng rng(2025);
  for (int round = 0; round < 500; ++round) {
    RandomInstance inst = random_instance(rng, 60, 5);
    const std::size_t n = inst.y.size();
    const std::size_t i = rng.next_below(n);
    const WindowConfig cfg{inst.k};
    const double before = vwss::psi(LabelSeries(inst.y), i, cfg);

    // Flip a label outside the window; the weight must not move.
    std::vector<std::size_t> outside;
    for (std::size_t j = 0; j < n; ++j) {
      const long long dist = static_cast<long long>(j) - static_cast<long long>(i);
      if (dist > inst.k || dist < -inst.k) outside.push_back(j);
    }
    if (outside.empty()) continue;
    const std::size_t j = outside[rng.next_below(outside.size())];
    inst.y[j] = 1 - inst.y[j];
    CHECK(vwss::psi(LabelSeries(inst.y), i, cfg) == before);
  }
}
