#pragma once

// Discretized loss distributions on a shared uniform grid, the truncated
// Gaussian efficacy model, mixtures of payoff matrices and the tail order.

#include <cstddef>
#include <span>
#include <vector>

#include "riskvest/model.hpp"

namespace riskvest {

inline constexpr int kDefaultBins = 256;
inline constexpr double kCompareEpsilon = 1e-9;

struct Grid {
  double lo = 0.0;
  double hi = 1.0;
  int bins = kDefaultBins;

  double width() const { return (hi - lo) / bins; }
  double edge(int i) const { return lo + (hi - lo) * i / bins; }
  double center(int i) const { return lo + (hi - lo) * (i + 0.5) / bins; }
  /// Bin containing x; x == hi maps to the last bin. Values outside are clamped.
  int bin_of(double x) const;

  bool operator==(const Grid&) const = default;
};

/// Throws Error(InvalidValue) unless lo < hi and bins > 0.
void check_grid(const Grid& grid);

/// Distribution of a control's efficacy on [0,1). `centroid[i]` is the
/// conditional mean within bin i, which keeps the first moment exact when the
/// mass is pushed through the loss formula.
struct EfficacyDistribution {
  Grid grid;
  std::vector<double> mass;
  std::vector<double> centroid;

  double mean() const;
};

class LossDistribution {
 public:
  LossDistribution() = default;
  /// Renormalizes `mass` to sum 1. Throws on negative entries, a zero total,
  /// a size mismatch, or grid.lo < 1.
  LossDistribution(Grid grid, std::vector<double> mass);

  static LossDistribution point(const Grid& grid, double value);

  const Grid& grid() const { return grid_; }
  std::span<const double> mass() const { return mass_; }
  double mass(int bin) const { return mass_[static_cast<std::size_t>(bin)]; }
  int bins() const { return grid_.bins; }

  bool operator==(const LossDistribution&) const = default;

 private:
  Grid grid_;
  std::vector<double> mass_;
};

EfficacyDistribution truncated_gaussian(double center, double sigma, const Grid& grid);
EfficacyDistribution point_efficacy(double value, const Grid& grid);

/// Loss 1 + I·T·(1 - e) + offset for each efficacy bin, binned onto
/// `lossGrid`. The offset carries the indirect-cost translation.
LossDistribution loss_distribution(const Target& target, const EfficacyDistribution& eff,
                                   const Grid& lossGrid, double offset = 0.0);

using PayoffMatrix = std::vector<std::vector<LossDistribution>>;

/// Σ_ij phi_i · theta_j · F_ij, bin-wise.
LossDistribution mix(const PayoffMatrix& matrix, std::span<const double> phi,
                     std::span<const double> theta);

/// k-th raw moment with bin centers mapped affinely onto [1,2] (first center
/// -> 1, last center -> 2).
double moment(const LossDistribution& f, int k);

/// Mean on the original loss axis (bin centers).
double mean(const LossDistribution& f);

enum class Ordering { Less = -1, Equal = 0, Greater = 1 };

const char* to_string(Ordering o);

/// Tail-lexicographic order on bin masses. Scanning from the highest bin
/// down, the first bin whose masses differ by more than `epsilon` decides;
/// the distribution with less mass there is Less (preferred, lower risk).
Ordering compare_mass(std::span<const double> f, std::span<const double> g,
                      double epsilon = kCompareEpsilon);

/// Throws Error(GridMismatch) when the grids differ.
Ordering compare(const LossDistribution& f, const LossDistribution& g);

}  // namespace riskvest
