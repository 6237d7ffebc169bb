#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qslkit/common.hpp"

namespace qslkit {

struct Level {
    double energy = 0.0;
    double weight = 0.0;
};

// State in energy representation: strictly increasing energies with positive
// weights. build() enforces sum(weights) = 1 (renormalizing drift <= 1e-6);
// build_raw() keeps the weights exactly as given, which is needed to reproduce
// published results computed on an un-normalized state.
class DiscreteSpectrum {
  public:
    static DiscreteSpectrum build(std::vector<Level> raw, std::string name = "");
    static DiscreteSpectrum build_raw(std::vector<Level> raw, std::string name = "");

    const std::vector<Level>& levels() const { return levels_; }
    const std::string& name() const { return name_; }
    std::size_t size() const { return levels_.size(); }
    double total_weight() const { return total_weight_; }

  private:
    DiscreteSpectrum() = default;
    std::vector<Level> levels_;
    std::string name_;
    double total_weight_ = 0.0;
};

struct GridPoint {
    double energy = 0.0;
    double rho = 0.0;
};

// Piecewise-linear density on a strictly increasing grid, integrating to 1.
class ContinuousSpectrum {
  public:
    static ContinuousSpectrum build(std::vector<GridPoint> grid, std::string name = "");
    const std::vector<GridPoint>& grid() const { return grid_; }
    const std::string& name() const { return name_; }

  private:
    ContinuousSpectrum() = default;
    std::vector<GridPoint> grid_;
    std::string name_;
};

struct SpectrumSummary {
    double mean = 0.0;
    double std_dev = 0.0;
    double ground = 0.0;
    double top = 0.0;
    double mean_above_ground = 0.0;
    double mean_below_top = 0.0;
    double median = 0.0;
};

struct Moments {
    double abs_moment = 0.0;
    double plus_moment = 0.0;
    double minus_moment = 0.0;
};

struct MomentProfile {
    double p = 0.0;
    double e_r_opt = 0.0;
    double moment = 0.0;
    double mu_plus = 0.0;
    double mu_minus = 0.0;
    std::vector<double> candidates;  // tied minimizers, p < 1 only
};

// One-sided pth moments about e_r; levels with E_j = e_r contribute zero.
Moments moments(const DiscreteSpectrum& state, double p, double e_r);

SpectrumSummary summary(const DiscreteSpectrum& state);

// Minimization of <|E - E_r|^p> over E_r: root of the one-sided (p-1)-moment
// balance for p > 1, weighted median for p = 1, exhaustive level scan for p < 1.
MomentProfile e_r_opt(const DiscreteSpectrum& state, double p);

MomentProfile continuous_profile(const ContinuousSpectrum& state, double p);

// pth moments of a piecewise-linear density about e_r (adaptive Simpson).
Moments continuous_moments(const ContinuousSpectrum& state, double p, double e_r);

}  // namespace qslkit
