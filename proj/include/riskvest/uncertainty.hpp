#pragma once

// Monte Carlo perturbation of the risk assessment and budget x uncertainty
// sweeps with modal/base-solution summaries.

#include <cstdint>
#include <map>
#include <vector>

#include "riskvest/pipeline.hpp"

namespace riskvest {

struct PerturbationSpec {
  double level = 0.0;  // relative standard deviation u, e.g. 0.05 for "5%"
  std::uint64_t seed = 0;
  bool perturbEfficacy = true;
  bool perturbDirectCost = true;
};

/// e <- clamp(e·(1 + u·Z), 0, 1 - 1e-6) and cost <- max(0, cost·(1 + u·Z)) for
/// every level above 0, with Z drawn from a generator keyed by
/// (seed, control, level, target/cost).
CaseStudy perturb_case(const ValidatedCase& validated, const PerturbationSpec& spec);

struct TrialResult {
  Portfolio portfolio;            // solved and evaluated on the perturbed case
  double objective = 0.0;         // == portfolio.objective
  double certainObjective = 0.0;  // the chosen levels evaluated on the unperturbed case
  double trueCost = 0.0;          // the chosen levels priced with unperturbed costs
  bool feasibleUnderTrueCosts = true;
};

/// `certain` must be the candidate set of the unperturbed case.
TrialResult run_trial(const ValidatedCase& validated, const CandidateSet& certain, double budget,
                      const PerturbationSpec& spec, const EngineOptions& options = {});

TrialResult run_trial(const ValidatedCase& validated, double budget, const PerturbationSpec& spec,
                      const EngineOptions& options = {});

struct SweepCell {
  double budget = 0.0;
  double uncertainty = 0.0;
  double meanDamage = 0.0;
  double stdDamage = 0.0;  // population standard deviation over trials
  std::vector<int> modalLevels;
  double modalFrequency = 0.0;
  double infeasibleRate = 0.0;
  int trials = 0;

  bool operator==(const SweepCell&) const = default;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // budget-major, uncertainty ascending
  std::map<double, std::vector<int>> baseSolutions;
  std::map<double, Portfolio> certainBaseline;
  std::uint64_t seed = 0;
  int trials = 0;
};

struct SweepOptions {
  EngineOptions engine;
  int threads = 1;  // parallelism across trials
};

/// Seed of trial `index` in cell (budget, level).
std::uint64_t trial_seed(std::uint64_t seed, double budget, double level, int index);

SweepResult sweep(const ValidatedCase& validated, std::vector<double> budgets, std::vector<double> levels,
                  int trials, std::uint64_t seed, const SweepOptions& options = {});

/// Component-wise minimum level across portfolios.
std::vector<int> base_solution(const std::vector<std::vector<int>>& portfolios);

/// Most frequent level vector; ties go to the lexicographically smallest.
std::pair<std::vector<int>, int> modal_portfolio(const std::vector<std::vector<int>>& portfolios);

}  // namespace riskvest
