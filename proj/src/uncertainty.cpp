#include "riskvest/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "riskvest/parallel.hpp"
#include "riskvest/random.hpp"

namespace riskvest {

namespace {
constexpr std::uint64_t kEfficacyStream = 1;
constexpr std::uint64_t kCostStream = 2;
constexpr double kMaxEfficacy = 1.0 - 1e-6;
}  // namespace

CaseStudy perturb_case(const ValidatedCase& validated, const PerturbationSpec& spec) {
  if (!(spec.level >= 0.0)) throw Error(ErrorCode::InvalidValue, "uncertainty level must be >= 0");
  CaseStudy out = validated.study();
  if (spec.level == 0.0) return out;

  for (std::size_t j = 0; j < out.controls.size(); ++j) {
    auto& levels = out.controls[j].levels;
    for (std::size_t l = 1; l < levels.size(); ++l) {
      auto& lvl = levels[l];
      if (spec.perturbEfficacy) {
        for (std::size_t t = 0; t < validated.target_count(); ++t) {
          auto& e = lvl.efficacy.at(validated.target(t).id);
          const double z = standard_normal(hash_key({spec.seed, kEfficacyStream, j, l, t}));
          e = std::clamp(e * (1.0 + spec.level * z), 0.0, kMaxEfficacy);
        }
      }
      if (spec.perturbDirectCost && lvl.directCost != 0.0) {
        const double z = standard_normal(hash_key({spec.seed, kCostStream, j, l, 0}));
        lvl.directCost = std::max(0.0, lvl.directCost * (1.0 + spec.level * z));
      }
    }
  }
  return out;
}

TrialResult run_trial(const ValidatedCase& validated, const CandidateSet& certain, double budget,
                      const PerturbationSpec& spec, const EngineOptions& options) {
  const ValidatedCase perturbed = validate_case(perturb_case(validated, spec));
  TrialResult r;
  r.portfolio = solve_case(perturbed, budget, options);
  r.objective = r.portfolio.objective;
  const Evaluation onCertain = evaluate_portfolio(r.portfolio.choice, certain, validated);
  r.certainObjective = onCertain.objective;
  r.trueCost = onCertain.totalCost;
  r.feasibleUnderTrueCosts = cost_units(r.trueCost, options.knapsack.costResolution) <=
                             static_cast<long long>(std::floor(budget / options.knapsack.costResolution + 1e-9));
  return r;
}

TrialResult run_trial(const ValidatedCase& validated, double budget, const PerturbationSpec& spec,
                      const EngineOptions& options) {
  return run_trial(validated, build_candidates(validated, options), budget, spec, options);
}

std::uint64_t trial_seed(std::uint64_t seed, double budget, double level, int index) {
  return hash_key({seed, double_bits(budget), double_bits(level), static_cast<std::uint64_t>(index)});
}

std::vector<int> base_solution(const std::vector<std::vector<int>>& portfolios) {
  if (portfolios.empty()) throw Error(ErrorCode::InvalidValue, "base solution of an empty portfolio list");
  std::vector<int> base = portfolios.front();
  for (const auto& p : portfolios) {
    if (p.size() != base.size()) throw Error(ErrorCode::InvalidValue, "portfolios cover different control sets");
    for (std::size_t j = 0; j < base.size(); ++j) base[j] = std::min(base[j], p[j]);
  }
  return base;
}

std::pair<std::vector<int>, int> modal_portfolio(const std::vector<std::vector<int>>& portfolios) {
  if (portfolios.empty()) throw Error(ErrorCode::InvalidValue, "modal portfolio of an empty list");
  std::map<std::vector<int>, int> counts;
  for (const auto& p : portfolios) ++counts[p];
  // std::map iterates in lexicographic order, so the first maximum wins ties.
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it)
    if (it->second > best->second) best = it;
  return {best->first, best->second};
}

SweepResult sweep(const ValidatedCase& validated, std::vector<double> budgets, std::vector<double> levels,
                  int trials, std::uint64_t seed, const SweepOptions& options) {
  if (trials < 1) throw Error(ErrorCode::InvalidValue, "trials must be >= 1");
  if (budgets.empty() || levels.empty()) throw Error(ErrorCode::InvalidValue, "sweep grid is empty");
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  EngineOptions engine = options.engine;
  engine.threads = 1;
  const CandidateSet certain = build_candidates(validated, options.engine);

  struct Job {
    std::size_t cell;
    double budget;
    double level;
    int index;
  };
  std::vector<Job> jobs;
  SweepResult result;
  result.seed = seed;
  result.trials = trials;
  for (double b : budgets) {
    for (double u : levels) {
      const int n = u == 0.0 ? 1 : trials;
      const std::size_t cell = result.cells.size();
      result.cells.push_back(SweepCell{b, u, 0.0, 0.0, {}, 0.0, 0.0, n});
      for (int i = 0; i < n; ++i) jobs.push_back({cell, b, u, i});
    }
  }

  std::vector<TrialResult> outcomes(jobs.size());
  parallel_for(jobs.size(), options.threads, [&](std::size_t k) {
    const Job& job = jobs[k];
    PerturbationSpec spec;
    spec.level = job.level;
    spec.seed = trial_seed(seed, job.budget, job.level, job.index);
    outcomes[k] = run_trial(validated, certain, job.budget, spec, engine);
  });

  std::size_t k = 0;
  for (auto& cell : result.cells) {
    std::vector<std::vector<int>> choices;
    double sum = 0.0;
    int infeasible = 0;
    const std::size_t begin = k;
    for (int i = 0; i < cell.trials; ++i, ++k) {
      sum += outcomes[k].certainObjective;
      infeasible += outcomes[k].feasibleUnderTrueCosts ? 0 : 1;
      choices.push_back(outcomes[k].portfolio.choice);
    }
    cell.meanDamage = sum / cell.trials;
    double sq = 0.0;
    for (std::size_t i = begin; i < k; ++i) {
      const double d = outcomes[i].certainObjective - cell.meanDamage;
      sq += d * d;
    }
    cell.stdDamage = std::sqrt(sq / cell.trials);
    auto [modal, count] = modal_portfolio(choices);
    cell.modalLevels = std::move(modal);
    cell.modalFrequency = static_cast<double>(count) / cell.trials;
    cell.infeasibleRate = static_cast<double>(infeasible) / cell.trials;
  }

  for (double b : budgets) {
    std::vector<std::vector<int>> modal;
    for (const auto& cell : result.cells)
      if (cell.budget == b) modal.push_back(cell.modalLevels);
    result.baseSolutions[b] = base_solution(modal);
    result.certainBaseline[b] = solve_knapsack(certain, validated, b, options.engine.knapsack);
  }
  return result;
}

}  // namespace riskvest
