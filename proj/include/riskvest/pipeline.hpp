#pragma once

// Full solve: every control subgame, then the knapsack.

#include <vector>

#include "riskvest/investment.hpp"
#include "riskvest/subgame.hpp"

namespace riskvest {

struct EngineOptions {
  SolverOptions solver;
  KnapsackOptions knapsack;
  int threads = 1;  // parallelism across (control, lambda) subgames
};

/// Solutions indexed [control][lambda].
std::vector<std::vector<SubgameSolution>> solve_subgames(const ValidatedCase& validated,
                                                         const EngineOptions& options = {});

CandidateSet build_candidates(const ValidatedCase& validated, const EngineOptions& options = {});

Portfolio solve_case(const ValidatedCase& validated, double budget, const EngineOptions& options = {});

}  // namespace riskvest
