#include <doctest.h>

#include <cmath>
#include <optional>

#include "vwss/errors.hpp"
#include "vwss/rng.hpp"
#include "vwss/scores.hpp"

using vwss::ConfusionMatrix;
using vwss::SkillScore;

namespace {

ConfusionMatrix q(double tp, double fp, double fn, double tn) {
  return ConfusionMatrix::quality(tp, fp, fn, tn);
}

ConfusionMatrix w(double tp, double fp, double fn, double tn) {
  return ConfusionMatrix::value_weighted(tp, fp, fn, tn);
}

// The pinned reference values are rounded to four decimals, so equality is
// asserted to half a unit in the fourth place.
constexpr double kTableTol = 5e-4;

bool within(double got, double want) { return std::abs(got - want) <= kTableTol; }

}  // namespace

TEST_CASE("pinned reference score values, quality and value-weighted") {
  // 64-sample toy example: counts (tp=11, fp=7, fn=3, tn=43).
  CHECK(within(vwss::tss(q(11, 7, 3, 43)), 0.6457));

  // The same example under four error-weighting variants: tp/tn stay counts
  // while fp/fn become weight masses.
  CHECK(within(vwss::tss(w(11, 14, 4, 43)), 0.4877));
  CHECK(within(vwss::tss(w(11, 14, 3.67, 43)), 0.5044));
  CHECK(within(vwss::tss(w(11, 8.08, 1.67, 43)), 0.7102));
  CHECK(within(vwss::tss(w(11, 3.83, 1.5, 43)), 0.7981));

  // Large imbalanced test-set matrices.
  CHECK(within(vwss::tss(q(143, 785, 5, 25442)), 0.9363));
  CHECK(within(vwss::hss(q(143, 785, 5, 25442)), 0.2586));
  CHECK(within(vwss::csi(q(143, 785, 5, 25442)), 0.1533));
  CHECK(within(vwss::tss(q(143, 400, 5, 25827)), 0.9510));
  CHECK(within(vwss::hss(q(143, 400, 5, 25827)), 0.4087));
  CHECK(within(vwss::csi(q(143, 400, 5, 25827)), 0.2609));

  // Accuracy on the balanced-ish example.
  CHECK(within(vwss::acc(q(22, 78, 19, 158)), 0.6498));
}

TEST_CASE("optimal and degenerate closed-form values") {
  const auto perfect = q(7, 0, 0, 13);
  CHECK(vwss::acc(perfect) == 1.0);
  CHECK(vwss::tss(perfect) == 1.0);
  CHECK(vwss::hss(perfect) == 1.0);
  CHECK(vwss::csi(perfect) == 1.0);

  CHECK(vwss::acc(q(0, 1, 1, 0)) == 0.0);
  CHECK(vwss::hss(q(1, 1, 1, 1)) == 0.0);
  CHECK(vwss::csi(q(0, 3, 2, 10)) == 0.0);
  CHECK(vwss::score(SkillScore::kCsi, q(2, 1, 1, 5)) == 0.5);
}

TEST_CASE("undefined denominators raise typed errors") {
  CHECK_THROWS_AS(vwss::acc(q(0, 0, 0, 0)), vwss::UndefinedScoreError);
  CHECK_THROWS_AS(vwss::tss(q(0, 1, 0, 1)), vwss::UndefinedScoreError);  // no positives
  CHECK_THROWS_AS(vwss::tss(q(1, 0, 1, 0)), vwss::UndefinedScoreError);  // no negatives
  CHECK_THROWS_AS(vwss::hss(q(5, 0, 0, 0)), vwss::UndefinedScoreError);
  CHECK_THROWS_AS(vwss::csi(q(0, 0, 0, 7)), vwss::UndefinedScoreError);
}

TEST_CASE("maybe_score mirrors score exactly") {
  vwss::Rng rng(42);
  for (int round = 0; round < 500; ++round) {
    // Sparse random entries so degenerate marginals appear often.
    const auto cell = [&rng]() {
      return rng.next_unit() < 0.4 ? 0.0
                                   : static_cast<double>(rng.next_below(6));
    };
    const auto m = q(cell(), cell(), cell(), cell());
    for (const SkillScore kind : vwss::kAllSkillScores) {
      const std::optional<double> maybe = vwss::maybe_score(kind, m);
      if (maybe) {
        CHECK(vwss::score(kind, m) == *maybe);
      } else {
        CHECK_THROWS_AS(vwss::score(kind, m), vwss::UndefinedScoreError);
      }
    }
  }
}

TEST_CASE("score properties on random matrices") {
  vwss::Rng rng(43);
  for (int round = 0; round < 500; ++round) {
    const double tp = static_cast<double>(1 + rng.next_below(50));
    const double fp = static_cast<double>(rng.next_below(50));
    const double fn = static_cast<double>(rng.next_below(50));
    const double tn = static_cast<double>(1 + rng.next_below(50));
    const auto m = q(tp, fp, fn, tn);

    // Ranges.
    CHECK(vwss::acc(m) >= 0.0);
    CHECK(vwss::acc(m) <= 1.0);
    CHECK(vwss::tss(m) >= -1.0);
    CHECK(vwss::tss(m) <= 1.0);
    CHECK(vwss::hss(m) <= 1.0);
    CHECK(vwss::csi(m) >= 0.0);
    CHECK(vwss::csi(m) <= 1.0);

    // Scale invariance: multiplying all entries by c > 0 changes nothing.
    const double c = 0.25 + 3.0 * rng.next_unit();
    const auto scaled = w(c * tp, c * fp, c * fn, c * tn);
    CHECK(vwss::acc(scaled) == doctest::Approx(vwss::acc(m)).epsilon(1e-12));
    CHECK(vwss::tss(scaled) == doctest::Approx(vwss::tss(m)).epsilon(1e-12));
    CHECK(vwss::hss(scaled) == doctest::Approx(vwss::hss(m)).epsilon(1e-12));
    CHECK(vwss::csi(scaled) == doctest::Approx(vwss::csi(m)).epsilon(1e-12));

    // Label-swap symmetry of TSS: swapping tp<->tn and fp<->fn is the same
    // score; swapping tp<->fn and tn<->fp negates it.
    CHECK(vwss::tss(q(tn, fn, fp, tp)) ==
          doctest::Approx(vwss::tss(m)).epsilon(1e-12));
    CHECK(vwss::tss(q(fn, tn, tp, fp)) ==
          doctest::Approx(-vwss::tss(m)).epsilon(1e-12));
  }
}

TEST_CASE("weighted scores are the same formulas on the weighted matrix") {
  vwss::Rng rng(44);
  for (int round = 0; round < 200; ++round) {
    const double tp = static_cast<double>(rng.next_below(20));
    const double tn = static_cast<double>(rng.next_below(20));
    const double wfp = 2.0 * rng.next_unit() * static_cast<double>(rng.next_below(10));
    const double wfn = 2.0 * rng.next_unit() * static_cast<double>(rng.next_below(10));
    const auto m = w(tp, wfp, wfn, tn);
    if (tp + wfn > 0 && wfp + tn > 0) {
      CHECK(vwss::tss(m) == tp / (tp + wfn) - wfp / (wfp + tn));
    }
    if (tp + wfp + wfn > 0) {
      CHECK(vwss::csi(m) == tp / (tp + wfp + wfn));
    }
  }
}
