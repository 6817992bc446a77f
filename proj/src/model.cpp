#include "riskvest/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace riskvest {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingTargetEfficacy: return "MissingTargetEfficacy";
    case ErrorCode::EfficacyOutOfRange: return "EfficacyOutOfRange";
    case ErrorCode::NonZeroLevelZero: return "NonZeroLevelZero";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NegativeCost: return "NegativeCost";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::DegenerateCase: return "DegenerateCase";
    case ErrorCode::SupportOverflow: return "SupportOverflow";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::UnknownControl: return "UnknownControl";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool operator==(const Target& a, const Target& b) {
  return a.id == b.id && a.name == b.name && a.impact == b.impact && a.threat == b.threat;
}

bool operator==(const ControlLevel& a, const ControlLevel& b) {
  return a.level == b.level && a.directCost == b.directCost &&
         a.indirectCost == b.indirectCost && a.efficacy == b.efficacy && a.sigma == b.sigma;
}

bool operator==(const Control& a, const Control& b) {
  return a.id == b.id && a.name == b.name && a.levels == b.levels;
}

bool CaseStudy::operator==(const CaseStudy& other) const {
  return controls == other.controls && targets == other.targets && sigma == other.sigma &&
         metadata == other.metadata;
}

namespace {

std::string summarize(const std::vector<ValidationIssue>& issues) {
  std::ostringstream out;
  out << "case validation failed with " << issues.size() << " issue(s)";
  for (const auto& issue : issues) {
    out << "\n  " << to_string(issue.code) << " at " << issue.where << ": " << issue.message;
  }
  return out.str();
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : Error(issues.empty() ? ErrorCode::InvalidValue : issues.front().code, summarize(issues)),
      issues_(std::move(issues)) {}

std::vector<ValidationIssue> check_case(const CaseStudy& raw) {
  std::vector<ValidationIssue> issues;
  auto add = [&](ErrorCode code, std::string where, std::string message) {
    issues.push_back({code, std::move(where), std::move(message)});
  };

  if (!finite_nonneg(raw.sigma)) add(ErrorCode::InvalidValue, "sigma", "must be a finite value >= 0");
  if (raw.targets.empty()) add(ErrorCode::InvalidValue, "targets", "at least one target is required");
  if (raw.controls.empty()) add(ErrorCode::InvalidValue, "controls", "at least one control is required");

  std::set<std::string> targetIds;
  for (const auto& t : raw.targets) {
    const std::string where = "targets[" + t.id + "]";
    if (t.id.empty()) add(ErrorCode::InvalidValue, where + ".id", "must be non-empty");
    if (!targetIds.insert(t.id).second) add(ErrorCode::DuplicateId, where, "duplicate target id");
    if (!finite_nonneg(t.impact)) add(ErrorCode::InvalidValue, where + ".impact", "must be >= 0");
    if (!(std::isfinite(t.threat) && t.threat >= 0.0 && t.threat <= 1.0))
      add(ErrorCode::InvalidValue, where + ".threat", "must lie in [0,1]");
  }

  std::set<std::string> controlIds;
  for (const auto& c : raw.controls) {
    const std::string base = "controls[" + c.id + "]";
    if (c.id.empty()) add(ErrorCode::InvalidValue, base + ".id", "must be non-empty");
    if (!controlIds.insert(c.id).second) add(ErrorCode::DuplicateId, base, "duplicate control id");
    if (c.levels.size() < 2) add(ErrorCode::InvalidValue, base + ".levels", "levels 0 and 1 are required");

    for (std::size_t i = 0; i < c.levels.size(); ++i) {
      const auto& lvl = c.levels[i];
      const std::string where = base + ".levels[" + std::to_string(i) + "]";
      if (lvl.level != static_cast<int>(i))
        add(ErrorCode::InvalidValue, where + ".level", "levels must be contiguous from 0");
      if (!finite_nonneg(lvl.directCost))
        add(ErrorCode::NegativeCost, where + ".directCost", "must be >= 0");
      if (!finite_nonneg(lvl.indirectCost))
        add(ErrorCode::NegativeCost, where + ".indirectCost", "must be >= 0");
      if (lvl.sigma && !finite_nonneg(*lvl.sigma))
        add(ErrorCode::InvalidValue, where + ".sigma", "must be >= 0");

      for (const auto& t : raw.targets) {
        if (!lvl.efficacy.count(t.id))
          add(ErrorCode::MissingTargetEfficacy, where + ".efficacy." + t.id, "no efficacy for target");
      }
      for (const auto& [tid, e] : lvl.efficacy) {
        if (!targetIds.count(tid))
          add(ErrorCode::MissingTargetEfficacy, where + ".efficacy." + tid, "efficacy keyed by unknown target");
        if (!(std::isfinite(e) && e >= 0.0 && e < 1.0))
          add(ErrorCode::EfficacyOutOfRange, where + ".efficacy." + tid, "must lie in [0,1)");
      }

      if (i == 0) {
        bool zeroEff = true;
        for (const auto& [tid, e] : lvl.efficacy) zeroEff = zeroEff && e == 0.0;
        if (lvl.directCost != 0.0 || lvl.indirectCost != 0.0 || !zeroEff)
          add(ErrorCode::NonZeroLevelZero, where,
              "level 0 must have zero direct cost, zero indirect cost and zero efficacy");
      }
    }
  }
  return issues;
}

ValidatedCase validate_case(const CaseStudy& raw) {
  auto issues = check_case(raw);
  if (!issues.empty()) throw ValidationError(std::move(issues));

  auto data = std::make_shared<ValidatedCase::Data>();
  data->study = raw;
  const auto& targets = raw.targets;

  data->exposure.reserve(targets.size());
  for (const auto& t : targets) {
    data->exposure.push_back(t.impact * t.threat);
    data->totalExposure += t.impact * t.threat;
  }

  for (const auto& c : raw.controls) {
    std::vector<std::vector<double>> perLevel;
    for (std::size_t l = 0; l < c.levels.size(); ++l) {
      std::vector<double> row;
      row.reserve(targets.size());
      for (const auto& t : targets) row.push_back(c.levels[l].efficacy.at(t.id));
      if (l > 0) {
        const auto& prev = c.levels[l - 1];
        if (c.levels[l].directCost < prev.directCost)
          data->warnings.push_back("control " + c.id + ": directCost decreases at level " +
                                   std::to_string(l));
        for (std::size_t t = 0; t < targets.size(); ++t) {
          if (row[t] < perLevel.back()[t])
            data->warnings.push_back("control " + c.id + ": efficacy on " + targets[t].id +
                                     " decreases at level " + std::to_string(l));
        }
      }
      perLevel.push_back(std::move(row));
    }
    data->efficacy.push_back(std::move(perLevel));
  }
  return ValidatedCase(std::move(data));
}

double ValidatedCase::sigma(std::size_t control, int level) const {
  const auto& lvl = data_->study.controls[control].levels[static_cast<std::size_t>(level)];
  return lvl.sigma.value_or(data_->study.sigma);
}

std::optional<std::size_t> ValidatedCase::control_index(const std::string& id) const {
  const auto& controls = data_->study.controls;
  for (std::size_t j = 0; j < controls.size(); ++j) {
    if (controls[j].id == id) return j;
  }
  return std::nullopt;
}

double baseline_damage(const ValidatedCase& validated) {
  const double total = validated.total_exposure();
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateCase, "total uncontrolled exposure is zero");
  return 100.0;
}

}  // namespace riskvest
