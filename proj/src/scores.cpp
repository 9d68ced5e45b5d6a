#include "vwss/scores.hpp"

namespace vwss {
namespace {

std::optional<double> maybe_acc(const ConfusionMatrix& m) {
  const double total = m.total();
  if (total <= 0.0) return std::nullopt;
  return (m.tp() + m.tn()) / total;
}

std::optional<double> maybe_tss(const ConfusionMatrix& m) {
  const double pos = m.tp() + m.fn();
  const double neg = m.fp() + m.tn();
  if (pos <= 0.0 || neg <= 0.0) return std::nullopt;
  return m.tp() / pos - m.fp() / neg;
}

std::optional<double> maybe_hss(const ConfusionMatrix& m) {
  const double t1 = (m.tp() + m.fn()) * (m.fn() + m.tn());
  const double t2 = (m.tp() + m.fp()) * (m.fp() + m.tn());
  if (t1 + t2 <= 0.0) return std::nullopt;
  return 2.0 * (m.tp() * m.tn() - m.fn() * m.fp()) / (t1 + t2);
}

std::optional<double> maybe_csi(const ConfusionMatrix& m) {
  const double denom = m.tp() + m.fp() + m.fn();
  if (denom <= 0.0) return std::nullopt;
  return m.tp() / denom;
}

}  // namespace

const char* skill_score_name(SkillScore kind) {
  switch (kind) {
    case SkillScore::kAcc: return "ACC";
    case SkillScore::kTss: return "TSS";
    case SkillScore::kHss: return "HSS";
    case SkillScore::kCsi: return "CSI";
  }
  return "?";
}

std::optional<double> maybe_score(SkillScore kind, const ConfusionMatrix& m) {
  switch (kind) {
    case SkillScore::kAcc: return maybe_acc(m);
    case SkillScore::kTss: return maybe_tss(m);
    case SkillScore::kHss: return maybe_hss(m);
    case SkillScore::kCsi: return maybe_csi(m);
  }
  return std::nullopt;
}

double score(SkillScore kind, const ConfusionMatrix& m) {
  const auto v = maybe_score(kind, m);
  if (!v) {
    throw UndefinedScoreError(std::string(skill_score_name(kind)) +
                              " is undefined for confusion matrix (tp=" +
                              std::to_string(m.tp()) + ", fp=" +
                              std::to_string(m.fp()) + ", fn=" +
                              std::to_string(m.fn()) + ", tn=" +
                              std::to_string(m.tn()) + "): zero denominator");
  }
  return *v;
}

double acc(const ConfusionMatrix& m) { return score(SkillScore::kAcc, m); }
double tss(const ConfusionMatrix& m) { return score(SkillScore::kTss, m); }
double hss(const ConfusionMatrix& m) { return score(SkillScore::kHss, m); }
double csi(const ConfusionMatrix& m) { return score(SkillScore::kCsi, m); }

}  // namespace vwss
