#include "vwss/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>

#include "vwss/errors.hpp"
#include "vwss/io.hpp"
#include "vwss/kernels.hpp"
#include "vwss/weights.hpp"

namespace vwss {

QualityLevel QualityLevel::absolute(double alpha) {
  if (!std::isfinite(alpha)) {
    throw DomainError("absolute quality level must be finite");
  }
  return QualityLevel(Mode::kAbsolute, alpha);
}

QualityLevel QualityLevel::relative_to_max(double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw DomainError("relative quality rate must be in (0, 1], got " +
                      std::to_string(rate));
  }
  return QualityLevel(Mode::kRelativeToMax, rate);
}

double QualityLevel::cutoff(double max_score) const {
  return mode_ == Mode::kAbsolute ? value_ : value_ * max_score;
}

namespace {

void check_unique_epochs(const std::vector<EpochSnapshot>& snapshots) {
  std::set<std::size_t> seen;
  for (const EpochSnapshot& s : snapshots) {
    if (!seen.insert(s.epoch_index).second) {
      throw DomainError("duplicate epoch index " +
                        std::to_string(s.epoch_index) + " in snapshot run");
    }
  }
}

}  // namespace

std::vector<EpochSnapshot> calibrate_epochs(std::vector<EpochSnapshot> snapshots,
                                            const LabelSeries& y_train,
                                            const ThresholdSearch& search) {
  if (snapshots.empty()) {
    throw DomainError("cannot calibrate an empty snapshot sequence");
  }
  check_unique_epochs(snapshots);
  for (EpochSnapshot& s : snapshots) {
    if (s.train_probs.size() != y_train.size()) {
      throw AlignmentError("epoch " + std::to_string(s.epoch_index) +
                           " train probabilities have length " +
                           std::to_string(s.train_probs.size()) +
                           " but training labels have length " +
                           std::to_string(y_train.size()));
    }
    try {
      const ThresholdResult r =
          optimize_threshold(y_train, s.train_probs, search);
      s.tau_star = r.tau;
      s.train_score = r.score;
    } catch (const NoFeasibleThresholdError&) {
      // Unselectable epoch: the score is undefined at every candidate.
      s.tau_star.reset();
      s.train_score.reset();
    }
  }
  return snapshots;
}

std::vector<std::size_t> select_epochs(std::vector<EpochSnapshot>& snapshots,
                                       const LabelSeries& y_valid,
                                       const ScoringSpec& spec,
                                       const QualityLevel& level,
                                       bool fallback_to_best) {
  if (snapshots.empty()) {
    throw DomainError("cannot select from an empty snapshot sequence");
  }

  std::optional<double> best;
  std::optional<std::size_t> best_epoch;
  for (EpochSnapshot& s : snapshots) {
    s.valid_score.reset();
    if (!s.tau_star) continue;
    if (s.valid_probs.size() != y_valid.size()) {
      throw AlignmentError("epoch " + std::to_string(s.epoch_index) +
                           " validation probabilities have length " +
                           std::to_string(s.valid_probs.size()) +
                           " but validation labels have length " +
                           std::to_string(y_valid.size()));
    }
    const PredictionSeries pred = apply_threshold(s.valid_probs, *s.tau_star);
    s.valid_score = maybe_score_of(spec, y_valid, pred);
    if (s.valid_score && (!best || *s.valid_score > *best)) {
      best = s.valid_score;
      best_epoch = s.epoch_index;
    }
  }

  if (!best) {
    throw EmptyEnsembleError(
        "no epoch has a defined validation score; nothing can be selected",
        std::nullopt);
  }

  const double cutoff = level.cutoff(*best);
  std::vector<std::size_t> selected;
  for (const EpochSnapshot& s : snapshots) {
    if (s.valid_score && *s.valid_score > cutoff) {
      selected.push_back(s.epoch_index);
    }
  }

  if (selected.empty()) {
    if (fallback_to_best) {
      selected.push_back(*best_epoch);
    } else {
      throw EmptyEnsembleError(
          "no epoch's validation score exceeds the quality cutoff " +
              std::to_string(cutoff) + " (best achievable: " +
              std::to_string(*best) + ")",
          best);
    }
  }
  return selected;
}

EnsembleClassifier::EnsembleClassifier(std::vector<Member> members,
                                       ScoringSpec spec)
    : members_(std::move(members)), spec_(spec) {
  if (members_.empty()) {
    throw DomainError("an ensemble classifier needs at least one member");
  }
  std::set<std::size_t> seen;
  for (const Member& m : members_) {
    if (!seen.insert(m.epoch_index).second) {
      throw DomainError("duplicate member epoch " +
                        std::to_string(m.epoch_index));
    }
    if (!(m.tau >= 0.0 && m.tau <= 1.0)) {
      throw DomainError("member threshold must be in [0, 1], got " +
                        std::to_string(m.tau));
    }
  }
}

PredictionSeries EnsembleClassifier::predict(
    const std::map<std::size_t, ProbabilitySeries>& probs_per_epoch) const {
  std::size_t n = 0;
  bool first = true;
  for (const Member& m : members_) {
    const auto it = probs_per_epoch.find(m.epoch_index);
    if (it == probs_per_epoch.end()) {
      throw InputError("no probability series for selected epoch " +
                       std::to_string(m.epoch_index));
    }
    if (first) {
      n = it->second.size();
      first = false;
    } else if (it->second.size() != n) {
      throw AlignmentError("epoch " + std::to_string(m.epoch_index) +
                           " probabilities have length " +
                           std::to_string(it->second.size()) +
                           " but other epochs have length " +
                           std::to_string(n));
    }
  }

  std::vector<std::uint32_t> ones(n, 0);
  std::vector<std::uint8_t> votes(n);
  for (const Member& m : members_) {
    const ProbabilitySeries& probs = probs_per_epoch.at(m.epoch_index);
    kernels::active_table().threshold_gt(probs.values().data(), n, m.tau,
                                         votes.data());
    for (std::size_t i = 0; i < n; ++i) ones[i] += votes[i];
  }

  // Median of a binary multiset: 1 exactly when ones >= zeros (ties are 1).
  std::vector<std::uint8_t> out(n);
  const std::uint32_t total = static_cast<std::uint32_t>(members_.size());
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (2 * ones[i] >= total) ? 1 : 0;
  }
  return PredictionSeries(std::move(out));
}

EnsembleClassifier make_classifier(const std::vector<EpochSnapshot>& snapshots,
                                   const std::vector<std::size_t>& selected,
                                   const ScoringSpec& spec) {
  std::vector<EnsembleClassifier::Member> members;
  members.reserve(selected.size());
  for (const std::size_t epoch : selected) {
    const auto it = std::find_if(
        snapshots.begin(), snapshots.end(),
        [epoch](const EpochSnapshot& s) { return s.epoch_index == epoch; });
    if (it == snapshots.end()) {
      throw InputError("selected epoch " + std::to_string(epoch) +
                       " has no snapshot");
    }
    if (!it->tau_star) {
      throw InputError("selected epoch " + std::to_string(epoch) +
                       " was never calibrated");
    }
    members.push_back({epoch, *it->tau_star});
  }
  return EnsembleClassifier(std::move(members), spec);
}

EvaluationReport evaluate(const LabelSeries& y, const PredictionSeries& p,
                          const WindowConfig& window) {
  EvaluationReport report;
  report.quality = confusion_matrix(y, p);
  report.weighted = weighted_confusion_total(y, p, window);
  for (std::size_t i = 0; i < kAllSkillScores.size(); ++i) {
    report.quality_scores[i] = maybe_score(kAllSkillScores[i], report.quality);
    report.weighted_scores[i] =
        maybe_score(kAllSkillScores[i], report.weighted);
  }
  return report;
}

namespace {

const char* kSplitNames[] = {"train", "valid", "test"};

bool valid_split_name(const std::string& split) {
  for (const char* name : kSplitNames) {
    if (split == name) return true;
  }
  return false;
}

}  // namespace

SnapshotFile read_snapshot_file(const std::filesystem::path& path) {
  const std::vector<std::string> lines =
      io::split_lines(io::read_file_text(path));
  if (lines.empty()) {
    throw InputError("snapshot file " + path.string() + " is empty");
  }

  const std::vector<std::string> header = io::split_csv_line(lines[0]);
  if (header.size() != 2 || header[0] != "epoch" ||
      !valid_split_name(header[1])) {
    throw InputError("snapshot file " + path.string() +
                     " must start with a header 'epoch,<split>' where <split> "
                     "is train, valid, or test");
  }

  SnapshotFile file;
  file.split = header[1];
  std::size_t width = 0;
  std::set<std::size_t> seen;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const std::string where =
        path.string() + ":" + std::to_string(ln + 1);
    const std::vector<std::string> fields = io::split_csv_line(lines[ln]);
    if (fields.size() < 2) {
      throw InputError("snapshot row at " + where +
                       " needs an epoch index and at least one probability");
    }
    if (width == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw InputError("snapshot row at " + where + " has " +
                       std::to_string(fields.size() - 1) +
                       " probabilities, expected " + std::to_string(width - 1));
    }
    const std::size_t epoch = io::parse_index(fields[0], where);
    if (!seen.insert(epoch).second) {
      throw InputError("duplicate epoch index " + std::to_string(epoch) +
                       " at " + where);
    }
    std::vector<double> probs;
    probs.reserve(fields.size() - 1);
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const double v = io::parse_double(fields[f], where);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InputError("probability out of [0, 1] at " + where + ": " +
                         fields[f]);
      }
      probs.push_back(v);
    }
    file.rows.push_back({epoch, ProbabilitySeries(std::move(probs))});
  }
  return file;
}

void write_snapshot_file(const std::filesystem::path& path,
                         const SnapshotFile& file) {
  if (!valid_split_name(file.split)) {
    throw DomainError("snapshot split must be train, valid, or test, got '" +
                      file.split + "'");
  }
  std::string out = "epoch," + file.split + "\n";
  for (const SnapshotRow& row : file.rows) {
    out += std::to_string(row.epoch_index);
    for (const double v : row.probs.values()) {
      out += ',';
      out += io::format_double(v);
    }
    out += '\n';
  }
  io::atomic_write_text(path, out);
}

std::vector<EpochSnapshot> zip_snapshots(const SnapshotFile& train,
                                         const SnapshotFile& valid) {
  if (train.split != "train") {
    throw InputError("expected a train-split snapshot file, got split '" +
                     train.split + "'");
  }
  if (valid.split != "valid") {
    throw InputError("expected a valid-split snapshot file, got split '" +
                     valid.split + "'");
  }
  if (train.rows.size() != valid.rows.size()) {
    throw InputError("train and valid snapshot files cover " +
                     std::to_string(train.rows.size()) + " vs " +
                     std::to_string(valid.rows.size()) + " epochs");
  }
  std::map<std::size_t, const ProbabilitySeries*> valid_by_epoch;
  for (const SnapshotRow& row : valid.rows) {
    valid_by_epoch.emplace(row.epoch_index, &row.probs);
  }
  std::vector<EpochSnapshot> snapshots;
  snapshots.reserve(train.rows.size());
  for (const SnapshotRow& row : train.rows) {
    const auto it = valid_by_epoch.find(row.epoch_index);
    if (it == valid_by_epoch.end()) {
      throw InputError("epoch " + std::to_string(row.epoch_index) +
                       " present in train snapshots but missing from valid");
    }
    snapshots.emplace_back(row.epoch_index, row.probs, *it->second);
  }
  return snapshots;
}

std::map<std::size_t, ProbabilitySeries> probability_map(
    const SnapshotFile& file) {
  std::map<std::size_t, ProbabilitySeries> map;
  for (const SnapshotRow& row : file.rows) {
    if (!map.emplace(row.epoch_index, row.probs).second) {
      throw InputError("duplicate epoch index " +
                       std::to_string(row.epoch_index) + " in snapshot file");
    }
  }
  return map;
}

}  // namespace vwss
