#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace phibvp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Error taxonomy. Checkers that merely *observe* a failed inequality return a
// Violated report instead of throwing; exceptions are reserved for inputs or
// states under which an operation cannot produce a meaningful answer.
// ---------------------------------------------------------------------------

struct EvaluationError : std::runtime_error {
  explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

struct InversionError : std::runtime_error {
  explicit InversionError(const std::string& what) : std::runtime_error(what) {}
};

struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct BoundarySamplingError : std::runtime_error {
  explicit BoundarySamplingError(const std::string& what) : std::runtime_error(what) {}
};

struct GradientVanishedError : std::runtime_error {
  explicit GradientVanishedError(const std::string& what) : std::runtime_error(what) {}
};

struct NotOuterNormalError : std::runtime_error {
  explicit NotOuterNormalError(const std::string& what) : std::runtime_error(what) {}
};

struct SamplingError : std::runtime_error {
  explicit SamplingError(const std::string& what) : std::runtime_error(what) {}
};

struct AdmissibilityError : std::runtime_error {
  explicit AdmissibilityError(const std::string& what) : std::runtime_error(what) {}
};

struct BuildError : std::runtime_error {
  explicit BuildError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Sampled verdicts. A pointwise hypothesis checked on a finite grid can never
// be *proved*; HoldsAtSamples records that no sampled point violated it.
// Violated always carries a witness at which re-evaluation reproduces the
// failed inequality.
// ---------------------------------------------------------------------------

enum class Verdict { HoldsAtSamples, Violated, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::HoldsAtSamples: return "holds_at_samples";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct Witness {
  double t = 0.0;
  double lambda = 0.0;
  Vec x;
  Vec y;
};

struct HypothesisReport {
  std::string condition_id;
  Verdict verdict = Verdict::Inconclusive;
  double margin = 0.0;  // worst slack seen; negative values certify a violation
  std::optional<Witness> witness;
  std::string note;

  bool holds() const { return verdict == Verdict::HoldsAtSamples; }
  bool violated() const { return verdict == Verdict::Violated; }
};

}  // namespace phibvp
