#include "riskvest/lossdist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace riskvest {

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// P(a < Z <= b), taken from whichever tail keeps the subtraction accurate.
double normal_interval(double a, double b) {
  if (a >= 0.0) return normal_sf(a) - normal_sf(b);
  return normal_cdf(b) - normal_cdf(a);
}

}  // namespace

int Grid::bin_of(double x) const {
  const double pos = (x - lo) / (hi - lo) * bins;
  if (!(pos > 0.0)) return 0;
  if (pos >= bins) return bins - 1;
  return static_cast<int>(pos);
}

void check_grid(const Grid& grid) {
  if (!(grid.bins > 0) || !(grid.lo < grid.hi) || !std::isfinite(grid.lo) || !std::isfinite(grid.hi))
    throw Error(ErrorCode::InvalidValue, "grid needs lo < hi and bins > 0");
}

double EfficacyDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) m += mass[i] * centroid[i];
  return m;
}

LossDistribution::LossDistribution(Grid grid, std::vector<double> mass)
    : grid_(grid), mass_(std::move(mass)) {
  check_grid(grid_);
  if (grid_.lo < 1.0) throw Error(ErrorCode::InvalidValue, "loss grid must start at or above 1");
  if (mass_.size() != static_cast<std::size_t>(grid_.bins))
    throw Error(ErrorCode::InvalidValue, "mass vector does not match grid bins");
  double total = 0.0;
  for (double m : mass_) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw Error(ErrorCode::InvalidValue, "negative or non-finite mass");
    total += m;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidValue, "distribution has zero total mass");
  if (total != 1.0) {
    for (double& m : mass_) m /= total;
  }
}

LossDistribution LossDistribution::point(const Grid& grid, double value) {
  std::vector<double> mass(static_cast<std::size_t>(grid.bins), 0.0);
  mass[static_cast<std::size_t>(grid.bin_of(value))] = 1.0;
  return LossDistribution(grid, std::move(mass));
}

EfficacyDistribution point_efficacy(double value, const Grid& grid) {
  check_grid(grid);
  EfficacyDistribution out{grid, std::vector<double>(static_cast<std::size_t>(grid.bins), 0.0), {}};
  out.centroid.resize(out.mass.size());
  for (int i = 0; i < grid.bins; ++i) out.centroid[static_cast<std::size_t>(i)] = grid.center(i);
  const auto bin = static_cast<std::size_t>(grid.bin_of(value));
  out.mass[bin] = 1.0;
  out.centroid[bin] = value;
  return out;
}

EfficacyDistribution truncated_gaussian(double center, double sigma, const Grid& grid) {
  if (!(sigma > 0.0)) return point_efficacy(center, grid);
  check_grid(grid);

  const auto n = static_cast<std::size_t>(grid.bins);
  EfficacyDistribution out{grid, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  double total = 0.0;
  for (int i = 0; i < grid.bins; ++i) {
    const double za = (grid.edge(i) - center) / sigma;
    const double zb = (grid.edge(i + 1) - center) / sigma;
    const double p = normal_interval(za, zb);
    const auto k = static_cast<std::size_t>(i);
    out.mass[k] = p;
    // Conditional mean of a Gaussian restricted to (a, b].
    if (p > 1e-300) {
      out.centroid[k] = std::clamp(center + sigma * (normal_pdf(za) - normal_pdf(zb)) / p,
                                   grid.edge(i), grid.edge(i + 1));
    } else {
      out.centroid[k] = grid.center(i);
    }
    total += p;
  }
  if (!(total > 0.0)) return point_efficacy(center, grid);
  for (double& m : out.mass) m /= total;
  return out;
}

LossDistribution loss_distribution(const Target& target, const EfficacyDistribution& eff,
                                   const Grid& lossGrid, double offset) {
  check_grid(lossGrid);
  const double exposure = target.impact * target.threat;
  const double limit = lossGrid.hi + 1e-12 * std::max(1.0, std::abs(lossGrid.hi));
  std::vector<double> mass(static_cast<std::size_t>(lossGrid.bins), 0.0);
  for (std::size_t i = 0; i < eff.mass.size(); ++i) {
    if (eff.mass[i] == 0.0) continue;
    const double s = 1.0 + exposure * (1.0 - eff.centroid[i]) + offset;
    if (s > limit || s < lossGrid.lo - 1e-12)
      throw Error(ErrorCode::SupportOverflow,
                  "loss " + std::to_string(s) + " for target " + target.id + " falls outside the loss grid");
    mass[static_cast<std::size_t>(lossGrid.bin_of(s))] += eff.mass[i];
  }
  return LossDistribution(lossGrid, std::move(mass));
}

LossDistribution mix(const PayoffMatrix& matrix, std::span<const double> phi,
                     std::span<const double> theta) {
  if (matrix.empty() || matrix.size() != phi.size())
    throw Error(ErrorCode::InvalidValue, "row strategy does not match payoff matrix");
  const Grid grid = matrix.front().front().grid();
  std::vector<double> out(static_cast<std::size_t>(grid.bins), 0.0);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    if (matrix[i].size() != theta.size())
      throw Error(ErrorCode::InvalidValue, "column strategy does not match payoff matrix");
    for (std::size_t j = 0; j < matrix[i].size(); ++j) {
      const auto& f = matrix[i][j];
      if (!(f.grid() == grid)) throw Error(ErrorCode::GridMismatch, "payoff entries use different grids");
      const double w = phi[i] * theta[j];
      if (w == 0.0) continue;
      const auto m = f.mass();
      for (std::size_t b = 0; b < out.size(); ++b) out[b] += w * m[b];
    }
  }
  return LossDistribution(grid, std::move(out));
}

double moment(const LossDistribution& f, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidValue, "moment order must be >= 1");
  const int n = f.bins();
  const auto m = f.mass();
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = n == 1 ? 1.0 : 1.0 + static_cast<double>(i) / (n - 1);
    sum += m[static_cast<std::size_t>(i)] * std::pow(x, k);
  }
  return sum;
}

double mean(const LossDistribution& f) {
  const auto m = f.mass();
  double sum = 0.0;
  for (int i = 0; i < f.bins(); ++i) sum += m[static_cast<std::size_t>(i)] * f.grid().center(i);
  return sum;
}

const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::Less: return "Less";
    case Ordering::Equal: return "Equal";
    case Ordering::Greater: return "Greater";
  }
  return "?";
}

Ordering compare_mass(std::span<const double> f, std::span<const double> g, double epsilon) {
  for (std::size_t i = f.size(); i-- > 0;) {
    const double d = f[i] - g[i];
    if (d > epsilon) return Ordering::Greater;
    if (d < -epsilon) return Ordering::Less;
  }
  return Ordering::Equal;
}

Ordering compare(const LossDistribution& f, const LossDistribution& g) {
  if (!(f.grid() == g.grid())) throw Error(ErrorCode::GridMismatch, "cannot compare distributions on different grids");
  return compare_mass(f.mass(), g.mass());
}

}  // namespace riskvest
