// Generates the bundled synthetic 10-control x 13-target case study. The
// numbers are invented; they only share the shape of a small SME assessment
// (levels 0-5, impacts on a 0-100 scale, threat probabilities).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <vector>

#include "CLI11.hpp"
#include "riskvest/io.hpp"
#include "riskvest/random.hpp"

namespace {

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : seed_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * riskvest::unit_open(riskvest::hash_key({seed_, n_++})); }
  int integer(int lo, int hi) { return std::min(hi, lo + static_cast<int>(uniform(0.0, hi - lo + 1))); }

 private:
  std::uint64_t seed_;
  std::uint64_t n_ = 0;
};

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 2017;
  int controls = 10;
  int targets = 13;
  int levels = 5;
  double sigma = 0.05;
  std::string out;
  CLI::App app{"Generate a synthetic case study", "make_synthetic_case"};
  app.add_option("--seed", seed, "Generator seed")->capture_default_str();
  app.add_option("--controls", controls, "Number of controls")->capture_default_str();
  app.add_option("--targets", targets, "Number of targets")->capture_default_str();
  app.add_option("--levels", levels, "Highest implementation level")->capture_default_str();
  app.add_option("--sigma", sigma, "Efficacy uncertainty")->capture_default_str();
  app.add_option("--out", out, "Output path (default: standard output)");
  CLI11_PARSE(app, argc, argv);

  Draws draw(seed);
  riskvest::CaseStudy study;
  study.sigma = sigma;
  study.metadata["name"] = "synthetic-" + std::to_string(controls) + "x" + std::to_string(targets);
  study.metadata["note"] = "Synthetic data for testing and demos; not a real organization's assessment.";
  study.metadata["generator"] = "make_synthetic_case --seed " + std::to_string(seed);

  for (int t = 0; t < targets; ++t) {
    riskvest::Target target;
    target.id = "t" + std::to_string(t + 1);
    target.name = "Vulnerability " + std::to_string(t + 1);
    target.impact = round_to(draw.uniform(10.0, 100.0), 0.1);
    target.threat = round_to(draw.uniform(0.1, 0.9), 0.01);
    study.targets.push_back(target);
  }

  for (int j = 0; j < controls; ++j) {
    riskvest::Control control;
    control.id = "c" + std::to_string(j + 1);
    control.name = "Control " + std::to_string(j + 1);

    // Each control mitigates a random subset of targets.
    std::vector<int> order(static_cast<std::size_t>(targets));
    std::iota(order.begin(), order.end(), 0);
    for (int k = targets - 1; k > 0; --k) std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(draw.integer(0, k))]);
    const int covered = draw.integer(3, std::min(7, targets));
    std::vector<double> peak(static_cast<std::size_t>(targets), 0.0);
    for (int k = 0; k < covered; ++k) peak[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = draw.uniform(0.35, 0.9);

    const double baseCost = draw.uniform(0.6, 1.6);
    const double friction = draw.uniform(0.02, 0.06);
    for (int l = 0; l <= levels; ++l) {
      riskvest::ControlLevel level;
      level.level = l;
      if (l > 0) {
        level.directCost = round_to(baseCost * std::pow(l, 1.3), 0.01);
        level.indirectCost = round_to(friction * l, 0.01);
      }
      for (int t = 0; t < targets; ++t) {
        const double ramp = l == 0 ? 0.0 : 0.35 + 0.65 * (l - 1) / std::max(1, levels - 1);
        level.efficacy["t" + std::to_string(t + 1)] = round_to(peak[static_cast<std::size_t>(t)] * ramp, 0.001);
      }
      control.levels.push_back(level);
    }
    study.controls.push_back(control);
  }

  riskvest::validate_case(study);
  const std::string text = riskvest::io::case_to_json(study).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    riskvest::io::write_file(out, text);
  }
  return 0;
}
