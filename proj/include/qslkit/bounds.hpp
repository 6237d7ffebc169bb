#pragma once

#include <optional>
#include <string>

#include "qslkit/spectrum.hpp"

namespace qslkit {

enum class BoundKind { MT, ML, DualML, LZ, LC, Chau, CZ, CZ2D, CZAsym };

const char* bound_kind_name(BoundKind kind);

struct BoundResult {
    BoundKind kind = BoundKind::MT;
    double value = 0.0;  // time in hbar/u; +inf when divergent
    bool divergent = false;
    std::string reason;  // set when divergent
    std::optional<double> p_used;
    std::optional<double> theta_used;
    std::optional<double> e_r_used;
    int iterations = 0;
    double residual = 0.0;
};

// arccos(sqrt(eps)) / DeltaE
BoundResult mt_bound(const DiscreteSpectrum& state, double epsilon);

// Single-equation route: theta* = -theta_crit(1, eps),
// value = (cos theta* - sqrt(eps)) / (<E - E0> sin phi_1^+(theta*)).
BoundResult ml_bound(const DiscreteSpectrum& state, double epsilon);

// ML bound of the energy-reversed state (E_j -> -E_j, same weights).
BoundResult dual_ml_bound(const DiscreteSpectrum& state, double epsilon);

// pi [ (1 - sqrt(eps (1 + 4p^2/pi^2))) / (2 <(E-E0)^p>) ]^{1/p};
// DomainError when eps exceeds the validity ceiling pi^2 / (pi^2 + 4p^2).
BoundResult lz_bound(const DiscreteSpectrum& state, double epsilon, double p);
double lz_p_ceiling(double epsilon);  // largest admissible p for given eps

// [ (1 - sqrt(eps)) / (A_{p,0} min_Er <|E-E_r|^p>) ]^{1/p}; kind Chau at p = 1.
BoundResult lc_bound(const DiscreteSpectrum& state, double epsilon, double p);

// p in (1,2]: identical to lc_bound. p in (0,1]: angle-optimized factor over
// all tied E_r candidates.
BoundResult cz_bound_fixed_p(const DiscreteSpectrum& state, double epsilon, double p);

// Closed form for 2-level states, maximized over p on both branches.
BoundResult cz_bound_2d(const DiscreteSpectrum& state, double epsilon);

enum class AsymVariant { P_EQUALS_2Q, Q_EQUALS_2P };

// Asymmetric-exponent bound at fixed (q, theta), maximized over E_r by
// golden-section per inter-level interval plus level candidates (best effort).
BoundResult cz_asymmetric(const DiscreteSpectrum& state, double epsilon, double q,
                          double theta, AsymVariant variant);

// Evaluate the asymmetric closed form at one reference energy (for residual tests).
double cz_asymmetric_at(const DiscreteSpectrum& state, double epsilon, double q,
                        double theta, AsymVariant variant, double e_r);

}  // namespace qslkit
