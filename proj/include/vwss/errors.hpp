#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace vwss {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Two series that must be index-aligned have different lengths.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside its admissible domain (empty series, index out of
/// range, threshold outside [0,1], nonpositive price, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A skill score is undefined for the given confusion matrix (zero
/// denominator). Never silently mapped to 0 or NaN.
class UndefinedScoreError : public Error {
 public:
  using Error::Error;
};

/// Every candidate threshold yields an undefined score.
class NoFeasibleThresholdError : public Error {
 public:
  using Error::Error;
};

/// The quality-level filter selected no epoch. Carries the best validation
/// score that was achievable, when any score was defined at all.
class EmptyEnsembleError : public Error {
 public:
  EmptyEnsembleError(const std::string& what, std::optional<double> best_score)
      : Error(what), best_score_(best_score) {}
  std::optional<double> best_score() const { return best_score_; }

 private:
  std::optional<double> best_score_;
};

/// Malformed or missing external input (files, snapshot matrices, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A chronological split produced an empty segment.
class SplitError : public Error {
 public:
  using Error::Error;
};

/// Training labels contain a single class.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// Training loss became non-finite. Names the epoch where it happened.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch)
      : Error(what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace vwss
