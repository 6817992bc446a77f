#pragma once

// Multiple-choice knapsack over subgame solutions: exactly one candidate per
// control, total direct cost within budget, minimizing normalized residual
// damage and then cost.

#include <string>
#include <vector>

#include "riskvest/model.hpp"
#include "riskvest/subgame.hpp"

namespace riskvest {

struct Candidate {
  int lambda = 0;
  std::vector<double> effectiveness;  // per target
  double directCost = 0.0;
};

struct CandidateSet {
  std::vector<std::string> controlIds;
  std::vector<std::vector<Candidate>> perControl;  // perControl[j][k], k-th candidate of control j
};

/// Candidates from solved subgames, one list per control (lambda = 0..m).
CandidateSet make_candidates(const std::vector<std::vector<SubgameSolution>>& solutions);

/// Throws Error(InvalidValue) unless every control has exactly one lambda = 0
/// candidate with zero cost and zero effectiveness, and sizes agree with the case.
void check_candidates(const CandidateSet& candidates, const ValidatedCase& validated);

struct Portfolio {
  std::vector<int> choice;                  // lambda per control
  double totalCost = 0.0;
  double objective = 100.0;                 // normalized expected damage, 0..100
  std::vector<double> perTargetResidual;    // (1 - coverage)·I·T
  std::vector<std::string> warnings;

  bool operator==(const Portfolio&) const = default;
};

struct Evaluation {
  double objective = 0.0;
  std::vector<double> perTargetResidual;
  double totalCost = 0.0;
};

/// Coverage per target is min(1, Σ_j E(Q_j,choice[j], t)).
Evaluation evaluate_portfolio(const std::vector<int>& choice, const CandidateSet& candidates,
                              const ValidatedCase& validated);

struct KnapsackOptions {
  double costResolution = 0.01;  // δ, budget units
  std::size_t exhaustiveMaxControls = 6;
};

/// Dispatches to exhaustive search for small instances, otherwise the
/// dominance-pruned dynamic program.
Portfolio solve_knapsack(const CandidateSet& candidates, const ValidatedCase& validated, double budget,
                         const KnapsackOptions& options = {});

Portfolio solve_knapsack_dp(const CandidateSet& candidates, const ValidatedCase& validated, double budget,
                            const KnapsackOptions& options = {});

Portfolio solve_knapsack_exhaustive(const CandidateSet& candidates, const ValidatedCase& validated,
                                    double budget, const KnapsackOptions& options = {});

/// Cost in resolution units, rounded up unless within 1e-9 of a whole unit.
long long cost_units(double cost, double resolution);

}  // namespace riskvest
