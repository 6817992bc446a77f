#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "riskvest/io.hpp"
#include "riskvest/pipeline.hpp"
#include "riskvest/subgame.hpp"

using namespace riskvest;

namespace {

const Grid kGrid{1.0, 11.0, 256};

PayoffMatrix point_game(const std::vector<std::vector<double>>& losses, const Grid& g = kGrid) {
  PayoffMatrix a;
  for (const auto& row : losses) {
    a.emplace_back();
    for (double x : row) a.back().push_back(LossDistribution::point(g, x));
  }
  return a;
}

// Fictitious play written directly from the definition: full empirical
// mixtures every round, best responses by compare(), lowest index on ties.
std::pair<std::vector<double>, std::vector<double>> naive_play(const PayoffMatrix& a, std::size_t firstColumn,
                                                               int rounds) {
  const std::size_t r = a.size(), c = a.front().size();
  std::vector<double> rowCount(r, 0.0), colCount(c, 0.0);
  std::size_t i = 0, j = firstColumn;
  for (int n = 1; n <= rounds; ++n) {
    rowCount[i] += 1;
    colCount[j] += 1;
    if (n == rounds) break;
    std::vector<double> theta(colCount), phi(rowCount);
    for (auto& x : theta) x /= n;
    for (auto& x : phi) x /= n;
    std::size_t best = 0;
    std::vector<double> e(r, 0.0);
    e[0] = 1;
    LossDistribution bestMix = mix(a, e, theta);
    for (std::size_t k = 1; k < r; ++k) {
      std::fill(e.begin(), e.end(), 0.0);
      e[k] = 1;
      const auto m = mix(a, e, theta);
      if (compare(m, bestMix) == Ordering::Less) best = k, bestMix = m;
    }
    std::size_t bestCol = 0;
    std::vector<double> f(c, 0.0);
    f[0] = 1;
    LossDistribution colMix = mix(a, phi, f);
    for (std::size_t k = 1; k < c; ++k) {
      std::fill(f.begin(), f.end(), 0.0);
      f[k] = 1;
      const auto m = mix(a, phi, f);
      if (compare(m, colMix) == Ordering::Greater) bestCol = k, colMix = m;
    }
    i = best;
    j = bestCol;
  }
  for (auto& x : rowCount) x /= rounds;
  for (auto& x : colCount) x /= rounds;
  return {rowCount, colCount};
}

CaseStudy two_target_case(double scale, double sigma) {
  CaseStudy cs;
  cs.sigma = sigma;
  cs.targets = {fixture::target("a", 6 * scale, 0.5), fixture::target("b", 4 * scale, 0.6),
                fixture::target("c", 2 * scale, 0.9)};
  cs.controls = {fixture::control("k", {"a", "b", "c"}, {{0, 0, 0}, {0.3, 0.1, 0.2}, {0.5, 0.4, 0.1}, {0.7, 0.6, 0.5}},
                                  {0, 1, 2, 4})};
  return cs;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("lambda 0 is a single uncontrolled row") {
  const auto vc = validate_case(two_target_case(1, 0.1));
  const Grid g = loss_grid(vc, 1.0, 256);
  const auto game = build_subgame(vc, "k", 0, g);
  REQUIRE(game.payoff.size() == 1);
  REQUIRE(game.payoff[0].size() == 3);
  for (std::size_t t = 0; t < 3; ++t) CHECK(game.payoff[0][t] == LossDistribution::point(g, 1.0 + vc.exposure(t)));
}

TEST_CASE("lambda 2 on the synthetic case is 3 x 13") {
  const auto vc = io::load_case(std::string(RISKVEST_DATA_DIR) + "/synthetic-10x13.json");
  const auto game = build_subgame(vc, "c1", 2, loss_grid(vc, 1.0, 256));
  CHECK(game.payoff.size() == 3);
  for (const auto& row : game.payoff) CHECK(row.size() == 13);
}

TEST_CASE("entry means follow the loss formula") {
  std::mt19937_64 rng(21);
  const auto vc = validate_case(fixture::random_case(rng, 2, 3, 4, 0.1));
  for (double kappa : {0.0, 1.0, 2.5}) {
    const Grid g = loss_grid(vc, kappa, 256);
    const auto game = build_subgame(vc, "c2", 3, g, kappa);
    for (int l = 0; l <= 3; ++l)
      for (std::size_t t = 0; t < 4; ++t) {
        const double e = vc.efficacy(1, l, t);
        const double effMean = l == 0 ? e : oracle::truncated_mean(e, 0.1);
        const double want = 1.0 + vc.exposure(t) * (1.0 - effMean) + kappa * vc.indirect_cost(1, l);
        CHECK(std::abs(mean(game.payoff[static_cast<std::size_t>(l)][t]) - want) <= g.width());
      }
  }
}

TEST_CASE("unknown control and lambda out of range") {
  const auto vc = validate_case(two_target_case(1, 0.1));
  const Grid g = loss_grid(vc, 1.0, 256);
  try {
    build_subgame(vc, "zz", 1, g);
    FAIL("expected UnknownControl");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownControl);
  }
  for (int bad : {-1, 4}) {
    try {
      build_subgame(vc, "k", bad, g);
      FAIL("expected LambdaOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::LambdaOutOfRange);
    }
  }
}

TEST_CASE("a dominant row is played purely") {
  const auto first = play_fictitious(point_game({{2, 3, 4}, {5, 6, 7}, {3, 4, 8}}), 0);
  CHECK(first.rowMix == std::vector<double>{1.0, 0.0, 0.0});
  CHECK(first.converged);

  const auto last = play_fictitious(point_game({{5, 6, 7}, {3, 4, 8}, {2, 3, 4}}), 0);
  CHECK(last.converged);
  CHECK(last.rowMix[2] >= 1.0 - 1e-3);
}

TEST_CASE("matching pennies on losses") {
  const auto a = point_game({{2, 1}, {1, 2}});
  const auto p = play_fictitious(a, 0);
  CHECK(p.rowMix[0] == doctest::Approx(0.5).epsilon(0.04));
  CHECK(p.colMix[0] == doctest::Approx(0.5).epsilon(0.04));
  const double value = mean(mix(a, p.rowMix, p.colMix));
  // point masses sit at bin centers, so compare against the same centers
  const double centers = 0.5 * (kGrid.center(kGrid.bin_of(1.0)) + kGrid.center(kGrid.bin_of(2.0)));
  CHECK(std::abs(value - centers) <= 0.02);
  CHECK(std::abs(value - 1.5) <= 0.02 + kGrid.width());
}

TEST_CASE("fast play matches the naive definition") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g{1.0, 11.0, 48};
  for (int k = 0; k < 12; ++k) {
    const std::size_t r = 2 + k % 3, c = 2 + (k / 3) % 3;
    PayoffMatrix a(r);
    for (auto& row : a)
      for (std::size_t j = 0; j < c; ++j) {
        std::vector<double> m(static_cast<std::size_t>(g.bins), 0.0);
        const int lo = static_cast<int>(u(rng) * 40);
        for (int b = lo; b < lo + 6; ++b) m[static_cast<std::size_t>(b)] = u(rng);
        row.push_back(LossDistribution(g, m));
      }
    const auto fast = play_fictitious(a, 0, 1500);
    const auto slow = naive_play(a, 0, fast.iterations);
    for (std::size_t i = 0; i < r; ++i) CHECK(fast.rowMix[i] == doctest::Approx(slow.first[i]).epsilon(1e-12));
    for (std::size_t j = 0; j < c; ++j) CHECK(fast.colMix[j] == doctest::Approx(slow.second[j]).epsilon(1e-12));
  }
}

TEST_CASE("solve_control enumerates lambda 0..m") {
  const auto vc = io::load_case(std::string(RISKVEST_DATA_DIR) + "/synthetic-10x13.json");
  const auto sols = solve_control(vc, "c4", loss_grid(vc, 1.0, 256));
  REQUIRE(sols.size() == 6);
  for (int l = 0; l <= 5; ++l) CHECK(sols[static_cast<std::size_t>(l)].lambda == l);
  CHECK(sols[0].directCost == 0.0);
  for (double e : sols[0].effectiveness) CHECK(e == 0.0);
  CHECK(sols[0].defenderMix == std::vector<double>{1.0});
}

TEST_CASE("solution scalars follow the defender mix") {
  const auto vc = validate_case(two_target_case(1, 0.05));
  const auto sols = solve_control(vc, "k", loss_grid(vc, 1.0, 256));
  for (const auto& s : sols) {
    CHECK(std::abs(sum(s.defenderMix) - 1.0) <= 1e-9);
    CHECK(std::abs(sum(s.attackerMix) - 1.0) <= 1e-9);
    double cost = 0.0;
    for (std::size_t l = 0; l < s.defenderMix.size(); ++l) cost += s.defenderMix[l] * vc.direct_cost(0, static_cast<int>(l));
    CHECK(s.directCost == doctest::Approx(cost).epsilon(1e-12));
    for (std::size_t t = 0; t < 3; ++t) {
      double e = 0.0;
      for (std::size_t l = 0; l < s.defenderMix.size(); ++l) e += s.defenderMix[l] * vc.efficacy(0, static_cast<int>(l), t);
      CHECK(s.effectiveness[t] == doctest::Approx(e).epsilon(1e-12));
    }
  }
}

TEST_CASE("converged solutions are epsilon-equilibria") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 4; ++k) {
    const auto vc = validate_case(fixture::random_case(rng, 3, 4, 6, 0.05));
    const Grid g = loss_grid(vc, 1.0, 256);
    for (std::size_t j = 0; j < vc.control_count(); ++j)
      for (int l = 0; l <= vc.max_level(j); ++l) {
        const auto game = build_subgame(vc, vc.control(j).id, l, g);
        const auto s = fictitious_play(game);
        if (!s.converged) continue;
        const auto check = check_equilibrium(game.payoff, s.defenderMix, s.attackerMix, deviation_margin(1e-3));
        CHECK(check.ok);
      }
  }
}

TEST_CASE("the equilibrium check catches a bad profile") {
  const auto a = point_game({{2, 1}, {1, 2}});
  const auto bad = check_equilibrium(a, {1.0, 0.0}, {1.0, 0.0}, 1e-3);
  CHECK_FALSE(bad.ok);
  CHECK(bad.defenderDeviation == 1);
  CHECK(bad.attackerDeviation == -1);
  CHECK(check_equilibrium(a, {0.5, 0.5}, {0.5, 0.5}, 1e-3).ok);
}

TEST_CASE("solving is deterministic") {
  const auto vc = io::load_case(std::string(RISKVEST_DATA_DIR) + "/synthetic-10x13.json");
  const Grid g = loss_grid(vc, 1.0, 256);
  const auto a = solve_control(vc, "c7", g), b = solve_control(vc, "c7", g);
  for (std::size_t l = 0; l < a.size(); ++l) {
    CHECK(a[l].defenderMix == b[l].defenderMix);
    CHECK(a[l].attackerMix == b[l].attackerMix);
    CHECK(a[l].equilibriumDistribution == b[l].equilibriumDistribution);
  }
  EngineOptions one, many;
  many.threads = 4;
  const auto x = build_candidates(vc, one), y = build_candidates(vc, many);
  for (std::size_t j = 0; j < x.perControl.size(); ++j)
    for (std::size_t l = 0; l < x.perControl[j].size(); ++l) {
      CHECK(x.perControl[j][l].effectiveness == y.perControl[j][l].effectiveness);
      CHECK(x.perControl[j][l].directCost == y.perControl[j][l].directCost);
    }
}

TEST_CASE("scaling every impact rescales the loss, not the strategy") {
  for (double sigma : {0.0, 0.05}) {
    const auto base = validate_case(two_target_case(1, sigma));
    const auto grid1 = loss_grid(base, 1.0, 256);
    for (double scale : {0.5, 3.0, 10.0}) {
      const auto scaled = validate_case(two_target_case(scale, sigma));
      const auto grid2 = loss_grid(scaled, 1.0, 256);
      for (int l = 0; l <= 3; ++l) {
        const auto s1 = fictitious_play(build_subgame(base, "k", l, grid1));
        const auto s2 = fictitious_play(build_subgame(scaled, "k", l, grid2));
        for (std::size_t i = 0; i < s1.defenderMix.size(); ++i)
          CHECK(std::abs(s1.defenderMix[i] - s2.defenderMix[i]) <= 1e-3);
        CHECK((mean(s2.equilibriumDistribution) - 1.0) ==
              doctest::Approx(scale * (mean(s1.equilibriumDistribution) - 1.0)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("point-mass games stay near the classical value when the oracle agrees") {
  // 2x2 games with a saddle point: lexicographic and classical play coincide.
  const auto a = point_game({{3, 5}, {2, 4}});
  const auto p = play_fictitious(a, 0);
  const double v = oracle::grid_minimax_2xn({{3, 5}, {2, 4}});
  CHECK(v == doctest::Approx(4.0));
  CHECK(std::abs(mean(mix(a, p.rowMix, p.colMix)) - v) <= 0.02 + kGrid.width());
}

TEST_CASE("deviation margin applies at the deciding bin") {
  const auto a = point_game({{3}, {2}});
  CHECK(check_equilibrium(a, {0.001, 0.999}, {1.0}, deviation_margin(1e-3)).ok);
  const auto off = check_equilibrium(a, {0.01, 0.99}, {1.0}, deviation_margin(1e-3));
  CHECK_FALSE(off.ok);
  CHECK(off.defenderDeviation == 1);
  // exact ties on top pass the decision down, near-ties within the margin stop it
  const auto b = point_game({{3, 3}, {2, 1}});
  CHECK(check_equilibrium(b, {0.001, 0.999}, {0.0, 1.0}, deviation_margin(1e-3)).ok == false);
  CHECK(check_equilibrium(b, {0.001, 0.999}, {1.0, 0.0}, deviation_margin(1e-3)).ok);
}
