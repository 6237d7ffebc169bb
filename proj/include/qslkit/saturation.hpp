#pragma once

#include <optional>

#include "qslkit/bounds.hpp"

namespace qslkit {

// Three-level state saturating the fixed-(p, theta, E_r) bound:
// E_pm = e_r + scale (phi_p^pm - theta), weights from the 3x3 linear system of
// the saturation analysis, predicted_tau = 1/scale.
struct SaturatingTriple {
    double e_plus = 0.0;
    double e_r = 0.0;
    double e_minus = 0.0;
    double w_plus = 0.0;
    double w_r = 0.0;
    double w_minus = 0.0;
    double predicted_tau = 0.0;
    double p = 0.0;
    double theta = 0.0;
    double epsilon = 0.0;

    DiscreteSpectrum as_state() const;
};

// p = 2 with eps < 1 -> DomainError ("cannot be saturated").
// p in (1,2) requires theta = 0 and sqrt(eps) >= cos phi_p^+ (SaturabilityError).
// p in (0,1] requires |theta| <= arccos(sqrt(eps)).
SaturatingTriple saturating_state(double p, double epsilon, double theta, double e_r,
                                  double scale);

struct OracleResult {
    std::optional<double> tau_first;
    double achieved_fidelity = 0.0;
    double horizon = 0.0;
};

// Brute-force first time with |sum_j w_j e^{-i E_j t}| = sqrt(eps): dense scan
// for sign changes plus derivative-refined local minima (tangential contacts).
OracleResult evolution_time(const DiscreteSpectrum& state, double epsilon, double horizon);

struct SaturationReport {
    SaturatingTriple triple;
    double bound = 0.0;
    double tau_oracle = 0.0;
    double rel_gap = 0.0;
    bool mu_condition_ok = false;
};

// Builds the triple, evaluates the fixed-p bound on it, runs the oracle, and
// reports the relative gap.
SaturationReport verify_saturation(double p, double epsilon, double theta);

}  // namespace qslkit
