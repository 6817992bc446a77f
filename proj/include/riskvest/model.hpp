#pragma once

// Case-study domain types: targets, controls with implementation levels, and
// the validated, immutable view the solvers consume.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace riskvest {

enum class ErrorCode {
  MissingTargetEfficacy,
  EfficacyOutOfRange,
  NonZeroLevelZero,
  DuplicateId,
  NegativeCost,
  InvalidValue,
  DegenerateCase,
  SupportOverflow,
  GridMismatch,
  UnknownControl,
  LambdaOutOfRange,
  ParseError,
  SchemaError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Target {
  std::string id;
  std::string name;
  double impact = 0.0;  // I(t), damage units
  double threat = 0.0;  // T(t), probability of occurrence
};

struct ControlLevel {
  int level = 0;
  double directCost = 0.0;
  double indirectCost = 0.0;
  std::map<std::string, double> efficacy;  // target id -> most likely efficacy
  std::optional<double> sigma;             // overrides CaseStudy::sigma
};

struct Control {
  std::string id;
  std::string name;
  std::vector<ControlLevel> levels;  // index == level

  int max_level() const { return static_cast<int>(levels.size()) - 1; }
};

struct CaseStudy {
  std::vector<Control> controls;
  std::vector<Target> targets;
  double sigma = 0.0;
  std::map<std::string, std::string> metadata;

  bool operator==(const CaseStudy&) const;
};

bool operator==(const Target&, const Target&);
bool operator==(const ControlLevel&, const ControlLevel&);
bool operator==(const Control&, const Control&);

/// One violated invariant. `where` names the control/level/target/field path,
/// e.g. "controls[c1].levels[0].directCost".
struct ValidationIssue {
  ErrorCode code;
  std::string where;
  std::string message;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

/// A case that satisfied every invariant. Immutable and cheap to copy; copies
/// share the underlying data, so it can be handed to concurrent trials as is.
///
/// Besides the original document it carries dense, index-addressed tables of
/// efficacies and costs so the inner solver loops never touch the maps.
class ValidatedCase {
 public:
  const CaseStudy& study() const { return data_->study; }
  const std::vector<std::string>& warnings() const { return data_->warnings; }

  std::size_t control_count() const { return data_->study.controls.size(); }
  std::size_t target_count() const { return data_->study.targets.size(); }
  int max_level(std::size_t control) const {
    return data_->study.controls[control].max_level();
  }

  const Target& target(std::size_t t) const { return data_->study.targets[t]; }
  const Control& control(std::size_t j) const { return data_->study.controls[j]; }

  double efficacy(std::size_t control, int level, std::size_t target) const {
    return data_->efficacy[control][static_cast<std::size_t>(level)][target];
  }
  double direct_cost(std::size_t control, int level) const {
    return data_->study.controls[control].levels[static_cast<std::size_t>(level)].directCost;
  }
  double indirect_cost(std::size_t control, int level) const {
    return data_->study.controls[control].levels[static_cast<std::size_t>(level)].indirectCost;
  }
  double sigma(std::size_t control, int level) const;

  /// I(t)·T(t)
  double exposure(std::size_t t) const { return data_->exposure[t]; }
  /// Σ_t I(t)·T(t), the uncontrolled expected damage.
  double total_exposure() const { return data_->totalExposure; }

  std::optional<std::size_t> control_index(const std::string& id) const;

 private:
  struct Data {
    CaseStudy study;
    std::vector<std::string> warnings;
    std::vector<std::vector<std::vector<double>>> efficacy;  // [control][level][target]
    std::vector<double> exposure;
    double totalExposure = 0.0;
  };

  explicit ValidatedCase(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  friend ValidatedCase validate_case(const CaseStudy& raw);

  std::shared_ptr<const Data> data_;
};

/// Collects every invariant violation; empty when the case is valid.
std::vector<ValidationIssue> check_case(const CaseStudy& raw);

/// Throws ValidationError listing all violations.
ValidatedCase validate_case(const CaseStudy& raw);

inline ValidatedCase validate_case(const ValidatedCase& validated) { return validated; }

/// Normalized damage of the zero-investment portfolio (always 100 for a
/// non-degenerate case). Throws Error(DegenerateCase) when Σ I·T = 0.
double baseline_damage(const ValidatedCase& validated);

}  // namespace riskvest
