#include "riskvest/subgame.hpp"

#include <algorithm>
#include <cmath>

namespace riskvest {

Grid efficacy_grid(int bins) { return Grid{0.0, 1.0, bins}; }

Grid loss_grid(const ValidatedCase& validated, double kappa, int bins) {
  double maxExposure = 0.0;
  for (std::size_t t = 0; t < validated.target_count(); ++t)
    maxExposure = std::max(maxExposure, validated.exposure(t));
  double maxIndirect = 0.0;
  for (std::size_t j = 0; j < validated.control_count(); ++j)
    for (int l = 0; l <= validated.max_level(j); ++l)
      maxIndirect = std::max(maxIndirect, validated.indirect_cost(j, l));
  double span = maxExposure + kappa * maxIndirect;
  if (!(span > 0.0)) span = 1.0;
  return Grid{1.0, 1.0 + span, bins};
}

ControlSubgame build_subgame(const ValidatedCase& validated, const std::string& controlId, int lambda,
                             const Grid& lossGrid, double kappa) {
  const auto index = validated.control_index(controlId);
  if (!index) throw Error(ErrorCode::UnknownControl, "unknown control " + controlId);
  const std::size_t j = *index;
  if (lambda < 0 || lambda > validated.max_level(j))
    throw Error(ErrorCode::LambdaOutOfRange,
                "lambda " + std::to_string(lambda) + " outside 0.." + std::to_string(validated.max_level(j)) +
                    " for control " + controlId);

  ControlSubgame game;
  game.controlId = controlId;
  game.control = j;
  game.lambda = lambda;
  game.kappa = kappa;
  const std::size_t n = validated.target_count();
  for (std::size_t t = 0; t < n; ++t) {
    game.targetIds.push_back(validated.target(t).id);
    game.exposure.push_back(validated.exposure(t));
  }

  const Grid effGrid = efficacy_grid(lossGrid.bins);
  for (int l = 0; l <= lambda; ++l) {
    const double offset = kappa * validated.indirect_cost(j, l);
    std::vector<LossDistribution> row;
    std::vector<double> centers;
    row.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double e = validated.efficacy(j, l, t);
      // An unimplemented control has no efficacy to be uncertain about.
      const EfficacyDistribution eff =
          l == 0 ? point_efficacy(e, effGrid) : truncated_gaussian(e, validated.sigma(j, l), effGrid);
      row.push_back(loss_distribution(validated.target(t), eff, lossGrid, offset));
      centers.push_back(e);
    }
    game.payoff.push_back(std::move(row));
    game.efficacy.push_back(std::move(centers));
    game.directCost.push_back(validated.direct_cost(j, l));
    game.indirectCost.push_back(validated.indirect_cost(j, l));
  }
  return game;
}

namespace {

struct Entry {
  const double* mass;
  int first;  // mass is zero outside [first, last]
  int last;
};

// Count-weighted mixtures for one player. Play usually repeats the same
// opposing strategy for long stretches, so repeats are kept as a pending
// multiplicity and folded in only when the opponent switches.
class Accumulators {
 public:
  Accumulators(std::size_t count, std::size_t bins) : acc_(count, std::vector<double>(bins, 0.0)), top_(count, 0) {}

  // Records one more play of the opponent strategy whose entries are `column`.
  void add(std::size_t opponent, const std::vector<const Entry*>& column) {
    if (pending_ > 0 && opponent != opponent_) flush();
    opponent_ = opponent;
    column_ = &column;
    ++pending_;
    for (std::size_t k = 0; k < top_.size(); ++k) top_[k] = std::max(top_[k], column[k]->last);
  }

  // Highest bin that has received any mass.
  int top(std::size_t k) const { return top_[k]; }

  double at(std::size_t k, int b) const {
    double v = acc_[k][static_cast<std::size_t>(b)];
    if (pending_ > 0) {
      const Entry& e = *(*column_)[k];
      if (b >= e.first && b <= e.last) v += pending_ * e.mass[b];
    }
    return v;
  }

 private:
  void flush() {
    for (std::size_t k = 0; k < acc_.size(); ++k) {
      const Entry& e = *(*column_)[k];
      auto& acc = acc_[k];
      for (int b = e.first; b <= e.last; ++b) acc[static_cast<std::size_t>(b)] += pending_ * e.mass[b];
    }
    pending_ = 0;
  }

  std::vector<std::vector<double>> acc_;
  std::size_t opponent_ = 0;
  const std::vector<const Entry*>* column_ = nullptr;
  double pending_ = 0.0;
  std::vector<int> top_;
};

// Tail scan; `threshold` is epsilon scaled by the play count.
Ordering compare_counts(const Accumulators& acc, std::size_t f, std::size_t g, double threshold) {
  for (int b = std::max(acc.top(f), acc.top(g)); b >= 0; --b) {
    const double d = acc.at(f, b) - acc.at(g, b);
    if (d > threshold) return Ordering::Greater;
    if (d < -threshold) return Ordering::Less;
  }
  return Ordering::Equal;
}

}  // namespace

PlayResult play_fictitious(const PayoffMatrix& payoff, std::size_t firstColumn, int maxIters, double tol,
                           int window) {
  const std::size_t rows = payoff.size();
  if (rows == 0 || payoff.front().empty()) throw Error(ErrorCode::InvalidValue, "empty payoff matrix");
  const std::size_t cols = payoff.front().size();
  const Grid grid = payoff.front().front().grid();
  const auto bins = static_cast<std::size_t>(grid.bins);

  // Masses at or below kNegligible are dropped; they move a count-weighted
  // difference by at most count * 1e-24, far below the comparison threshold.
  constexpr double kNegligible = 1e-24;
  std::vector<Entry> entries(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (payoff[i].size() != cols) throw Error(ErrorCode::InvalidValue, "ragged payoff matrix");
    for (std::size_t j = 0; j < cols; ++j) {
      const auto& f = payoff[i][j];
      if (!(f.grid() == grid)) throw Error(ErrorCode::GridMismatch, "payoff entries use different grids");
      const auto m = f.mass();
      int first = 0;
      int last = static_cast<int>(bins) - 1;
      while (first < last && m[static_cast<std::size_t>(first)] <= kNegligible) ++first;
      while (last > first && m[static_cast<std::size_t>(last)] <= kNegligible) --last;
      entries[i * cols + j] = Entry{m.data(), first, last};
    }
  }
  // byColumn[j][i] and byRow[i][j] both point at entry (i, j).
  std::vector<std::vector<const Entry*>> byColumn(cols, std::vector<const Entry*>(rows));
  std::vector<std::vector<const Entry*>> byRow(rows, std::vector<const Entry*>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) byColumn[j][i] = byRow[i][j] = &entries[i * cols + j];

  Accumulators rowAcc(rows, bins);
  Accumulators colAcc(cols, bins);
  std::vector<double> rowCount(rows, 0.0), colCount(cols, 0.0);
  std::vector<double> rowWindow(rows, 0.0), colWindow(cols, 0.0);
  const auto w = static_cast<std::size_t>(std::max(1, window));
  std::vector<std::pair<std::size_t, std::size_t>> history(w);
  const int minIters = static_cast<int>(std::ceil(1.0 / tol));

  std::size_t row = 0;
  std::size_t col = std::min(firstColumn, cols - 1);
  PlayResult result;
  int n = 0;
  while (n < maxIters) {
    ++n;
    rowCount[row] += 1.0;
    colCount[col] += 1.0;
    rowAcc.add(col, byColumn[col]);
    colAcc.add(row, byRow[row]);

    auto& slot = history[static_cast<std::size_t>(n - 1) % w];
    if (static_cast<std::size_t>(n) > w) {
      rowWindow[slot.first] -= 1.0;
      colWindow[slot.second] -= 1.0;
    }
    slot = {row, col};
    rowWindow[row] += 1.0;
    colWindow[col] += 1.0;

    if (n >= minIters && static_cast<std::size_t>(n) > w) {
      const double now = n;
      const double then = n - static_cast<double>(w);
      double drift = 0.0;
      for (std::size_t i = 0; i < rows; ++i)
        drift = std::max(drift, std::abs(rowCount[i] / now - (rowCount[i] - rowWindow[i]) / then));
      for (std::size_t j = 0; j < cols; ++j)
        drift = std::max(drift, std::abs(colCount[j] / now - (colCount[j] - colWindow[j]) / then));
      if (drift < tol) {
        result.converged = true;
        break;
      }
    }

    const double threshold = kCompareEpsilon * n;
    std::size_t bestRow = 0;
    for (std::size_t i = 1; i < rows; ++i)
      if (compare_counts(rowAcc, i, bestRow, threshold) == Ordering::Less) bestRow = i;
    std::size_t bestCol = 0;
    for (std::size_t j = 1; j < cols; ++j)
      if (compare_counts(colAcc, j, bestCol, threshold) == Ordering::Greater) bestCol = j;
    row = bestRow;
    col = bestCol;
  }

  result.iterations = n;
  result.rowMix.resize(rows);
  result.colMix.resize(cols);
  for (std::size_t i = 0; i < rows; ++i) result.rowMix[i] = rowCount[i] / n;
  for (std::size_t j = 0; j < cols; ++j) result.colMix[j] = colCount[j] / n;
  return result;
}

SubgameSolution fictitious_play(const ControlSubgame& game, int maxIters, double tol, int window) {
  std::size_t firstColumn = 0;
  for (std::size_t t = 1; t < game.exposure.size(); ++t)
    if (game.exposure[t] > game.exposure[firstColumn]) firstColumn = t;

  const PlayResult play = play_fictitious(game.payoff, firstColumn, maxIters, tol, window);

  SubgameSolution sol;
  sol.controlId = game.controlId;
  sol.lambda = game.lambda;
  sol.defenderMix = play.rowMix;
  sol.attackerMix = play.colMix;
  sol.iterations = play.iterations;
  sol.converged = play.converged;
  sol.equilibriumDistribution = mix(game.payoff, sol.defenderMix, sol.attackerMix);
  sol.effectiveness.assign(game.exposure.size(), 0.0);
  for (std::size_t l = 0; l < sol.defenderMix.size(); ++l) {
    const double p = sol.defenderMix[l];
    sol.directCost += p * game.directCost[l];
    for (std::size_t t = 0; t < sol.effectiveness.size(); ++t) sol.effectiveness[t] += p * game.efficacy[l][t];
  }
  return sol;
}

std::vector<SubgameSolution> solve_control(const ValidatedCase& validated, const std::string& controlId,
                                           const Grid& lossGrid, const SolverOptions& options) {
  const auto index = validated.control_index(controlId);
  if (!index) throw Error(ErrorCode::UnknownControl, "unknown control " + controlId);
  std::vector<SubgameSolution> out;
  for (int lambda = 0; lambda <= validated.max_level(*index); ++lambda) {
    const auto game = build_subgame(validated, controlId, lambda, lossGrid, options.kappa);
    out.push_back(fictitious_play(game, options.maxIters, options.tol, options.window));
  }
  return out;
}

namespace {

// Sign of the deciding bin under the exact order, zeroed when the gap there
// is within `margin`.
Ordering decided_beyond(std::span<const double> f, std::span<const double> g, double margin) {
  for (std::size_t b = f.size(); b-- > 0;) {
    const double d = f[b] - g[b];
    if (std::abs(d) <= kCompareEpsilon) continue;
    if (std::abs(d) <= margin) return Ordering::Equal;
    return d < 0 ? Ordering::Less : Ordering::Greater;
  }
  return Ordering::Equal;
}

}  // namespace

EquilibriumCheck check_equilibrium(const PayoffMatrix& payoff, const std::vector<double>& rowMix,
                                   const std::vector<double>& colMix, double margin) {
  EquilibriumCheck check;
  const LossDistribution value = mix(payoff, rowMix, colMix);
  std::vector<double> pure;
  for (std::size_t i = 0; i < rowMix.size(); ++i) {
    pure.assign(rowMix.size(), 0.0);
    pure[i] = 1.0;
    if (decided_beyond(mix(payoff, pure, colMix).mass(), value.mass(), margin) == Ordering::Less) {
      check.ok = false;
      check.defenderDeviation = static_cast<int>(i);
      break;
    }
  }
  for (std::size_t j = 0; j < colMix.size(); ++j) {
    pure.assign(colMix.size(), 0.0);
    pure[j] = 1.0;
    if (decided_beyond(mix(payoff, rowMix, pure).mass(), value.mass(), margin) == Ordering::Greater) {
      check.ok = false;
      check.attackerDeviation = static_cast<int>(j);
      break;
    }
  }
  return check;
}

}  // namespace riskvest
