#include "riskvest/investment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskvest {

CandidateSet make_candidates(const std::vector<std::vector<SubgameSolution>>& solutions) {
  CandidateSet out;
  for (const auto& perControl : solutions) {
    if (perControl.empty()) throw Error(ErrorCode::InvalidValue, "control without subgame solutions");
    out.controlIds.push_back(perControl.front().controlId);
    std::vector<Candidate> list;
    for (const auto& sol : perControl) list.push_back({sol.lambda, sol.effectiveness, sol.directCost});
    out.perControl.push_back(std::move(list));
  }
  return out;
}

void check_candidates(const CandidateSet& candidates, const ValidatedCase& validated) {
  if (candidates.perControl.size() != validated.control_count())
    throw Error(ErrorCode::InvalidValue, "candidate set does not cover every control");
  for (std::size_t j = 0; j < candidates.perControl.size(); ++j) {
    int zeroCount = 0;
    for (const auto& c : candidates.perControl[j]) {
      if (c.effectiveness.size() != validated.target_count())
        throw Error(ErrorCode::InvalidValue, "candidate effectiveness does not match target count");
      if (c.lambda != 0) continue;
      ++zeroCount;
      const bool inert = c.directCost == 0.0 &&
                         std::all_of(c.effectiveness.begin(), c.effectiveness.end(), [](double e) { return e == 0.0; });
      if (!inert) throw Error(ErrorCode::InvalidValue, "lambda 0 candidate must be cost- and effect-free");
    }
    if (zeroCount != 1) throw Error(ErrorCode::InvalidValue, "each control needs exactly one lambda 0 candidate");
  }
}

namespace {

const Candidate& find_candidate(const CandidateSet& candidates, std::size_t j, int lambda) {
  for (const auto& c : candidates.perControl[j])
    if (c.lambda == lambda) return c;
  throw Error(ErrorCode::LambdaOutOfRange,
              "no candidate with lambda " + std::to_string(lambda) + " for control " + candidates.controlIds[j]);
}

double objective_from_coverage(const std::vector<double>& coverage, const ValidatedCase& validated) {
  double residual = 0.0;
  for (std::size_t t = 0; t < coverage.size(); ++t)
    residual += (1.0 - std::min(1.0, coverage[t])) * validated.exposure(t);
  return 100.0 * residual / validated.total_exposure();
}

long long budget_units(double budget, double resolution) {
  return static_cast<long long>(std::floor(budget / resolution + 1e-9));
}

bool resolution_loss(const CandidateSet& candidates, double resolution) {
  for (const auto& list : candidates.perControl)
    for (const auto& c : list) {
      const double units = c.directCost / resolution;
      if (std::abs(units - std::round(units)) > 1e-9 * std::max(1.0, units)) return true;
    }
  return false;
}

Portfolio finish(std::vector<int> choice, const CandidateSet& candidates, const ValidatedCase& validated,
                 const KnapsackOptions& options) {
  Portfolio p;
  auto eval = evaluate_portfolio(choice, candidates, validated);
  p.choice = std::move(choice);
  p.objective = eval.objective;
  p.totalCost = eval.totalCost;
  p.perTargetResidual = std::move(eval.perTargetResidual);
  if (resolution_loss(candidates, options.costResolution))
    p.warnings.push_back("BudgetResolutionLoss: direct costs rounded up to multiples of " +
                         std::to_string(options.costResolution));
  return p;
}

void check_budget(double budget) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw Error(ErrorCode::InvalidValue, "budget must be >= 0");
}

}  // namespace

long long cost_units(double cost, double resolution) {
  const double units = cost / resolution;
  const double nearest = std::round(units);
  if (std::abs(units - nearest) <= 1e-9 * std::max(1.0, std::abs(units))) return static_cast<long long>(nearest);
  return static_cast<long long>(std::ceil(units));
}

Evaluation evaluate_portfolio(const std::vector<int>& choice, const CandidateSet& candidates,
                              const ValidatedCase& validated) {
  if (choice.size() != candidates.perControl.size())
    throw Error(ErrorCode::InvalidValue, "portfolio must choose exactly one level per control");
  if (!(validated.total_exposure() > 0.0))
    throw Error(ErrorCode::DegenerateCase, "total uncontrolled exposure is zero");

  const std::size_t n = validated.target_count();
  std::vector<double> coverage(n, 0.0);
  Evaluation eval;
  for (std::size_t j = 0; j < choice.size(); ++j) {
    const auto& c = find_candidate(candidates, j, choice[j]);
    eval.totalCost += c.directCost;
    for (std::size_t t = 0; t < n; ++t) coverage[t] += c.effectiveness[t];
  }
  eval.perTargetResidual.resize(n);
  for (std::size_t t = 0; t < n; ++t)
    eval.perTargetResidual[t] = (1.0 - std::min(1.0, coverage[t])) * validated.exposure(t);
  eval.objective = objective_from_coverage(coverage, validated);
  return eval;
}

Portfolio solve_knapsack(const CandidateSet& candidates, const ValidatedCase& validated, double budget,
                         const KnapsackOptions& options) {
  if (candidates.perControl.size() <= options.exhaustiveMaxControls)
    return solve_knapsack_exhaustive(candidates, validated, budget, options);
  return solve_knapsack_dp(candidates, validated, budget, options);
}

Portfolio solve_knapsack_exhaustive(const CandidateSet& candidates, const ValidatedCase& validated,
                                    double budget, const KnapsackOptions& options) {
  check_budget(budget);
  check_candidates(candidates, validated);
  const std::size_t c = candidates.perControl.size();
  const std::size_t n = validated.target_count();
  const long long limit = budget_units(budget, options.costResolution);

  std::vector<std::vector<long long>> units(c);
  for (std::size_t j = 0; j < c; ++j)
    for (const auto& cand : candidates.perControl[j]) units[j].push_back(cost_units(cand.directCost, options.costResolution));

  std::vector<std::size_t> idx(c, 0);
  std::vector<int> best;
  double bestObjective = 0.0;
  double bestCost = 0.0;
  std::vector<double> coverage(n);
  while (true) {
    long long spent = 0;
    double cost = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      spent += units[j][idx[j]];
      cost += candidates.perControl[j][idx[j]].directCost;
    }
    if (spent <= limit) {
      std::fill(coverage.begin(), coverage.end(), 0.0);
      for (std::size_t j = 0; j < c; ++j) {
        const auto& eff = candidates.perControl[j][idx[j]].effectiveness;
        for (std::size_t t = 0; t < n; ++t) coverage[t] += eff[t];
      }
      const double objective = objective_from_coverage(coverage, validated);
      if (best.empty() || objective < bestObjective || (objective == bestObjective && cost < bestCost)) {
        best.resize(c);
        for (std::size_t j = 0; j < c; ++j) best[j] = candidates.perControl[j][idx[j]].lambda;
        bestObjective = objective;
        bestCost = cost;
      }
    }
    std::size_t j = 0;
    while (j < c && ++idx[j] == candidates.perControl[j].size()) idx[j++] = 0;
    if (j == c) break;
  }
  return finish(std::move(best), candidates, validated, options);
}

namespace {

struct State {
  long long units = 0;
  double cost = 0.0;
  std::vector<double> coverage;  // clamped at 1
  std::vector<int> choice;
};

bool dominates(const State& a, const State& b) {
  if (a.units > b.units || a.cost > b.cost) return false;
  for (std::size_t t = 0; t < a.coverage.size(); ++t)
    if (a.coverage[t] < b.coverage[t]) return false;
  return true;
}

}  // namespace

Portfolio solve_knapsack_dp(const CandidateSet& candidates, const ValidatedCase& validated, double budget,
                            const KnapsackOptions& options) {
  check_budget(budget);
  check_candidates(candidates, validated);
  const std::size_t n = validated.target_count();
  const long long limit = budget_units(budget, options.costResolution);

  std::vector<State> states(1);
  states.front().coverage.assign(n, 0.0);

  const std::size_t c = candidates.perControl.size();
  std::vector<std::vector<long long>> units(c);
  for (std::size_t j = 0; j < c; ++j)
    for (const auto& cand : candidates.perControl[j]) units[j].push_back(cost_units(cand.directCost, options.costResolution));

  std::vector<double> reach(n);
  std::vector<double> best(n);
  for (std::size_t j = 0; j < c; ++j) {
    const auto& list = candidates.perControl[j];
    std::vector<State> next;
    next.reserve(states.size() * list.size());
    for (const auto& s : states) {
      for (std::size_t i = 0; i < list.size(); ++i) {
        const long long spent = s.units + units[j][i];
        if (spent > limit) continue;
        State grown;
        grown.units = spent;
        grown.cost = s.cost + list[i].directCost;
        grown.coverage.resize(n);
        for (std::size_t t = 0; t < n; ++t) grown.coverage[t] = std::min(1.0, s.coverage[t] + list[i].effectiveness[t]);
        grown.choice = s.choice;
        grown.choice.push_back(list[i].lambda);
        next.push_back(std::move(grown));
      }
    }
    if (j + 1 == c) {
      states = std::move(next);
      break;
    }

    // Every state can be finished at zero cost with lambda 0, so the best
    // state so far bounds the optimum from above. A state survives only if
    // the remaining controls, each adding its best affordable efficacy on
    // every target, could still match it.
    double incumbent = 100.0;
    for (const auto& s : next) incumbent = std::min(incumbent, objective_from_coverage(s.coverage, validated));
    std::vector<State> hopeful;
    hopeful.reserve(next.size());
    for (auto& s : next) {
      reach = s.coverage;
      for (std::size_t k = j + 1; k < c; ++k) {
        best.assign(n, 0.0);
        for (std::size_t i = 0; i < candidates.perControl[k].size(); ++i) {
          if (s.units + units[k][i] > limit) continue;
          const auto& eff = candidates.perControl[k][i].effectiveness;
          for (std::size_t t = 0; t < n; ++t) best[t] = std::max(best[t], eff[t]);
        }
        for (std::size_t t = 0; t < n; ++t) reach[t] += best[t];
      }
      if (objective_from_coverage(reach, validated) <= incumbent + 1e-9) hopeful.push_back(std::move(s));
    }

    // Keep the Pareto front: cheaper states first, so any dominating state is
    // already kept when a candidate is examined.
    std::stable_sort(hopeful.begin(), hopeful.end(), [](const State& a, const State& b) {
      if (a.cost != b.cost) return a.cost < b.cost;
      return a.units < b.units;
    });
    std::vector<State> kept;
    for (auto& s : hopeful) {
      const bool dominated =
          std::any_of(kept.begin(), kept.end(), [&](const State& k) { return dominates(k, s); });
      if (!dominated) kept.push_back(std::move(s));
    }
    states = std::move(kept);
  }

  const State* winner = nullptr;
  double bestObjective = 0.0;
  for (const auto& s : states) {
    const double objective = objective_from_coverage(s.coverage, validated);
    if (!winner || objective < bestObjective || (objective == bestObjective && s.cost < winner->cost)) {
      winner = &s;
      bestObjective = objective;
    }
  }
  return finish(winner->choice, candidates, validated, options);
}

}  // namespace riskvest
