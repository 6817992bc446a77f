#include "riskvest/pipeline.hpp"

#include <cstdlib>
#include <string>
#include <utility>

#include "riskvest/parallel.hpp"

namespace riskvest {

int default_threads() {
  if (const char* env = std::getenv("RISKVEST_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<std::vector<SubgameSolution>> solve_subgames(const ValidatedCase& validated,
                                                         const EngineOptions& options) {
  const Grid grid = loss_grid(validated, options.solver.kappa, options.solver.bins);
  std::vector<std::pair<std::size_t, int>> jobs;
  std::vector<std::vector<SubgameSolution>> out(validated.control_count());
  for (std::size_t j = 0; j < validated.control_count(); ++j) {
    out[j].resize(static_cast<std::size_t>(validated.max_level(j)) + 1);
    for (int l = 0; l <= validated.max_level(j); ++l) jobs.emplace_back(j, l);
  }
  parallel_for(jobs.size(), options.threads, [&](std::size_t k) {
    const auto [j, lambda] = jobs[k];
    const auto game = build_subgame(validated, validated.control(j).id, lambda, grid, options.solver.kappa);
    out[j][static_cast<std::size_t>(lambda)] =
        fictitious_play(game, options.solver.maxIters, options.solver.tol, options.solver.window);
  });
  return out;
}

CandidateSet build_candidates(const ValidatedCase& validated, const EngineOptions& options) {
  return make_candidates(solve_subgames(validated, options));
}

Portfolio solve_case(const ValidatedCase& validated, double budget, const EngineOptions& options) {
  return solve_knapsack(build_candidates(validated, options), validated, budget, options.knapsack);
}

}  // namespace riskvest
