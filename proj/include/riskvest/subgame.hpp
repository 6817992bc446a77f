#pragma once

// Control subgames: for one control restricted to levels 0..lambda, the
// defender picks a level and the attacker a target; each cell pays a full
// loss distribution. Solved by fictitious play under the tail order.

#include <cstddef>
#include <string>
#include <vector>

#include "riskvest/lossdist.hpp"
#include "riskvest/model.hpp"

namespace riskvest {

struct SolverOptions {
  int bins = kDefaultBins;
  double kappa = 1.0;      // weight of indirect cost on the loss axis
  int maxIters = 5000;
  double tol = 1e-3;       // max-norm drift of the empirical mixes
  int window = 50;         // trailing window for the drift test
};

/// [0,1) efficacy grid.
Grid efficacy_grid(int bins);

/// Shared loss grid for every subgame of a case: [1, 1 + max I·T + kappa·max ic].
Grid loss_grid(const ValidatedCase& validated, double kappa, int bins);

struct ControlSubgame {
  std::string controlId;
  std::size_t control = 0;
  int lambda = 0;
  std::vector<std::string> targetIds;
  PayoffMatrix payoff;                           // (lambda+1) x n
  std::vector<std::vector<double>> efficacy;     // e(l,t) for l = 0..lambda
  std::vector<double> directCost;                // per level
  std::vector<double> indirectCost;              // per level
  std::vector<double> exposure;                  // I(t)·T(t)
  double kappa = 1.0;
};

struct SubgameSolution {
  std::string controlId;
  int lambda = 0;
  std::vector<double> defenderMix;    // over levels 0..lambda
  std::vector<double> attackerMix;    // over targets
  LossDistribution equilibriumDistribution;
  std::vector<double> effectiveness;  // E(Q,t), indexed like the case targets
  double directCost = 0.0;            // Γ(Q)
  int iterations = 0;
  bool converged = false;
};

ControlSubgame build_subgame(const ValidatedCase& validated, const std::string& controlId, int lambda,
                             const Grid& lossGrid, double kappa = 1.0);

/// Raw fictitious-play outcome on an arbitrary distribution-valued matrix.
/// The row player minimizes (prefers Less), the column player maximizes.
struct PlayResult {
  std::vector<double> rowMix;
  std::vector<double> colMix;
  int iterations = 0;
  bool converged = false;
};

/// Fictitious play with lowest-index tie-breaking. Opening moves are row 0 and
/// `firstColumn`. Stops once both empirical mixes drift less than `tol` over
/// the trailing window and at least ceil(1/tol) rounds have been played.
PlayResult play_fictitious(const PayoffMatrix& payoff, std::size_t firstColumn, int maxIters = 5000,
                           double tol = 1e-3, int window = 50);

SubgameSolution fictitious_play(const ControlSubgame& game, int maxIters = 5000, double tol = 1e-3,
                                int window = 50);

/// Solutions for lambda = 0..m of one control.
std::vector<SubgameSolution> solve_control(const ValidatedCase& validated, const std::string& controlId,
                                           const Grid& lossGrid, const SolverOptions& options = {});

struct EquilibriumCheck {
  bool ok = true;
  int defenderDeviation = -1;  // first profitable pure deviation, or -1
  int attackerDeviation = -1;
};

/// Margin matching a drift tolerance: each empirical mix may still carry up to
/// `tol` of weight off its limit (the opening move included), so a deviation
/// can gain up to 2·tol of tail mass.
inline double deviation_margin(double tol) { return 2.0 * tol; }

/// No pure deviation may improve on F(Φ,Θ) in the tail order by more than
/// `margin` at the deciding bin. The deciding bin is the one `compare` picks.
EquilibriumCheck check_equilibrium(const PayoffMatrix& payoff, const std::vector<double>& rowMix,
                                   const std::vector<double>& colMix, double margin);

}  // namespace riskvest
