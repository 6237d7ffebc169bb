#pragma once

#include "qslkit/bounds.hpp"

namespace qslkit {

// Small-p asymptotics of the LC/CZ bound: value -> pi e^{-c_bar} r0^{1/p} with
// r0 = (1 - sqrt(eps)) / (2 (W - w*)), w* the heaviest level weight, W the
// total weight, and c_bar the w-weighted mean of ln|E_j - E_{r*}| over j != r*.
struct DivergenceAnalysis {
    enum class Verdict { Divergent, FiniteLimit, Vanishing };
    double ratio_r0 = 0.0;
    double c_bar = 0.0;
    double limit_value = 0.0;  // pi e^{-c_bar}, the finite-limit candidate
    Verdict verdict = Verdict::Vanishing;
};

DivergenceAnalysis divergence_analysis(const DiscreteSpectrum& state, double epsilon);

// Default p floor 1e-4, overridable through QSLKIT_P_MIN.
double default_p_min();

// Deterministic 64-point log-uniform grid plus golden-section refinement to
// |dp| <= 1e-6; LC/CZ run the divergence analysis first. p_used = 0 marks the
// analytic p -> 0 limit winning.
BoundResult optimize_p(BoundKind kind, const DiscreteSpectrum& state, double epsilon,
                       double p_min, double p_max);
BoundResult optimize_p(BoundKind kind, const DiscreteSpectrum& state, double epsilon);

// max over {MT, ML, dual ML, optimized LZ, optimized LC, optimized CZ}.
BoundResult best_bound(const DiscreteSpectrum& state, double epsilon);

// p at which the p-optimized LC bound recovers MT:
// sqrt((1 + sqrt(eps)) / (1 - sqrt(eps))) arccos(sqrt(eps)).
double mt_recovery_p(double epsilon);

}  // namespace qslkit
