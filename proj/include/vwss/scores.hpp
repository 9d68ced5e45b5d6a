#pragma once

#include <array>
#include <optional>
#include <string>

#include "vwss/series.hpp"

namespace vwss {

enum class SkillScore { kAcc, kTss, kHss, kCsi };

inline constexpr std::array<SkillScore, 4> kAllSkillScores = {
    SkillScore::kAcc, SkillScore::kTss, SkillScore::kHss, SkillScore::kCsi};

const char* skill_score_name(SkillScore kind);

/// Accuracy: (tp + tn) / (tp + fp + fn + tn), in [0, 1].
double acc(const ConfusionMatrix& m);

/// True skill statistic: tp/(tp+fn) - fp/(fp+tn), in [-1, 1]. Balance of
/// detection probability against false-alarm rate.
double tss(const ConfusionMatrix& m);

/// Heidke skill score: 2(tp*tn - fn*fp) / (T1 + T2) with
/// T1 = (tp+fn)(fn+tn), T2 = (tp+fp)(fp+tn). In (-inf, 1]; 0 means no skill
/// over a random forecast.
double hss(const ConfusionMatrix& m);

/// Critical success index: tp / (tp + fp + fn), in [0, 1].
double csi(const ConfusionMatrix& m);

/// Dispatch to the matching score. Throws UndefinedScoreError when the
/// matrix makes the score's denominator vanish.
double score(SkillScore kind, const ConfusionMatrix& m);

/// Same as score() but reports an undefined score as nullopt instead of
/// throwing. Used by sweeps that must treat undefined as "not selectable".
std::optional<double> maybe_score(SkillScore kind, const ConfusionMatrix& m);

}  // namespace vwss
