#include "qslkit/saturation.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "qslkit/scalar_kernel.hpp"

namespace qslkit {

namespace {

constexpr double kPi = std::numbers::pi;

double clip_weight(double w) {
    if (w < 0.0) {
        if (w < -1e-14) {
            throw SaturabilityError("saturating_state: negative weight " +
                                    std::to_string(w) + " from the 3x3 system");
        }
        return 0.0;
    }
    return w;
}

double fidelity(const std::vector<Level>& lv, double total, double t) {
    std::complex<double> s{0.0, 0.0};
    for (const Level& l : lv) {
        s += (l.weight / total) * std::exp(std::complex<double>(0.0, -l.energy * t));
    }
    return std::abs(s);
}

// d(F^2)/dt = 2 Re(conj(S) S') with S' = -i sum w E e^{-iEt}.
double fidelity_sq_slope(const std::vector<Level>& lv, double total, double t) {
    std::complex<double> s{0.0, 0.0}, ds{0.0, 0.0};
    for (const Level& l : lv) {
        const std::complex<double> ph =
            (l.weight / total) * std::exp(std::complex<double>(0.0, -l.energy * t));
        s += ph;
        ds += std::complex<double>(0.0, -l.energy) * ph;
    }
    return 2.0 * std::real(std::conj(s) * ds);
}

}  // namespace

DiscreteSpectrum SaturatingTriple::as_state() const {
    return DiscreteSpectrum::build(
        {{e_minus, w_minus}, {e_r, w_r}, {e_plus, w_plus}}, "saturating-triple");
}

SaturatingTriple saturating_state(double p, double epsilon, double theta, double e_r,
                                  double scale) {
    if (!(p > 0.0 && p <= 2.0)) throw DomainError("saturating_state: p outside (0, 2]");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw DomainError("saturating_state: epsilon outside [0, 1]");
    }
    if (!(scale > 0.0)) throw DomainError("saturating_state: scale must be positive");
    const double se = std::sqrt(epsilon);
    if (p == 2.0 && epsilon < 1.0) {
        throw DomainError("saturating_state: the p = 2 bound cannot be saturated");
    }
    if (p > 1.0) {
        if (theta != 0.0) {
            throw SaturabilityError("saturating_state: theta must be 0 for p in (1, 2)");
        }
        const TangentPair probe = phi_pair(p, 0.0);
        if (se < std::cos(probe.phi_plus) - 1e-15) {
            throw SaturabilityError(
                "saturating_state: sqrt(eps) below cos(phi+), weights would go negative");
        }
    } else if (std::abs(theta) > std::acos(se) + 1e-15) {
        throw SaturabilityError("saturating_state: |theta| exceeds arccos(sqrt(eps))");
    }

    const TangentPair tp = phi_pair(p, theta);
    SaturatingTriple out;
    out.p = p;
    out.theta = theta;
    out.epsilon = epsilon;
    out.e_r = e_r;
    out.e_plus = e_r + scale * (tp.phi_plus - theta);
    out.e_minus = e_r + scale * (tp.phi_minus - theta);

    if (epsilon == 1.0) {
        out.w_r = 1.0;
        out.predicted_tau = 0.0;
        return out;
    }

    const double up = tp.phi_plus - theta;   // > 0
    const double um = theta - tp.phi_minus;  // > 0
    const double full = tp.phi_plus - tp.phi_minus;
    const double d = 2.0 * std::sin(full / 2) * std::sin(up / 2) * std::sin(um / 2);
    out.w_plus = clip_weight(
        std::sin(um / 2) *
        (std::cos(um / 2) - se * std::cos((theta + tp.phi_minus) / 2)) / d);
    out.w_r = clip_weight(
        -std::sin(full / 2) *
        (std::cos(full / 2) - se * std::cos((tp.phi_plus + tp.phi_minus) / 2)) / d);
    out.w_minus = clip_weight(
        std::sin(up / 2) *
        (std::cos(up / 2) - se * std::cos((tp.phi_plus + theta) / 2)) / d);
    out.predicted_tau = 1.0 / scale;
    return out;
}

OracleResult evolution_time(const DiscreteSpectrum& state, double epsilon, double horizon) {
    if (!(horizon > 0.0)) throw DomainError("evolution_time: horizon must be positive");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw DomainError("evolution_time: epsilon outside [0, 1]");
    }
    const auto& lv = state.levels();
    const double total = state.total_weight();
    const double se = std::sqrt(epsilon);
    OracleResult out;
    out.horizon = horizon;

    if (se >= 1.0) {
        out.tau_first = 0.0;
        out.achieved_fidelity = 1.0;
        return out;
    }
    const double span = lv.back().energy - lv.front().energy;
    if (span == 0.0) {
        out.achieved_fidelity = 1.0;
        return out;  // F == 1 forever, sqrt(eps) < 1 unreachable
    }

    auto f = [&](double t) { return fidelity(lv, total, t); };
    auto bisect_crossing = [&](double a, double b) {
        // f(a) > se > f(b)
        while (b - a > 1e-12 * std::max(b, 1e-30)) {
            const double m = 0.5 * (a + b);
            if (f(m) > se) a = m; else b = m;
        }
        return 0.5 * (a + b);
    };

    const double dt = std::min(kPi / (20.0 * span), horizon / 1e4);
    double t0 = 0.0, t1 = dt;
    double f0 = f(t0), f1 = f(t1);
    double min_seen = std::min(f0, f1);
    while (t1 <= horizon + dt) {
        if (f1 < se) {  // plain sign change in [t0, t1]
            const double tau = bisect_crossing(t0, t1);
            out.tau_first = tau;
            out.achieved_fidelity = f(tau);
            return out;
        }
        const double t2 = t1 + dt;
        const double f2 = f(t2);
        min_seen = std::min(min_seen, f2);
        // Tangential contact: refine local minima that come near sqrt(eps).
        if (f1 <= f0 && f1 < f2 && f1 <= se + 0.1) {
            double a = t0, b = t2;
            for (int it = 0; it < 120 && b - a > 1e-16 * std::max(b, 1.0); ++it) {
                const double m = 0.5 * (a + b);
                if (fidelity_sq_slope(lv, total, m) < 0.0) a = m; else b = m;
            }
            const double tmin = 0.5 * (a + b);
            const double fmin = f(tmin);
            min_seen = std::min(min_seen, fmin);
            if (fmin < se - 1e-9) {
                const double tau = bisect_crossing(t0, tmin);
                out.tau_first = tau;
                out.achieved_fidelity = f(tau);
                return out;
            }
            if (fmin <= se + 1e-9) {
                out.tau_first = tmin;
                out.achieved_fidelity = fmin;
                return out;
            }
        }
        t0 = t1;
        f0 = f1;
        t1 = t2;
        f1 = f2;
    }
    out.achieved_fidelity = min_seen;
    return out;
}

SaturationReport verify_saturation(double p, double epsilon, double theta) {
    SaturationReport out;
    out.triple = saturating_state(p, epsilon, theta, 0.0, 1.0);
    const DiscreteSpectrum state = out.triple.as_state();
    const BoundResult bound = cz_bound_fixed_p(state, epsilon, p);
    out.bound = bound.value;
    if (out.triple.predicted_tau == 0.0) {
        out.tau_oracle = 0.0;
        out.rel_gap = 0.0;
        out.mu_condition_ok = true;
        return out;
    }
    const double horizon = 3.0 * out.triple.predicted_tau;
    const OracleResult oracle = evolution_time(state, epsilon, horizon);
    out.tau_oracle = oracle.tau_first.value_or(horizon);
    out.rel_gap = std::abs(out.bound - out.tau_oracle) / out.tau_oracle;

    const TangentPair tp = phi_pair(p, theta);
    const double up = tp.phi_plus - theta, um = theta - tp.phi_minus;
    const Moments m = moments(state, p, out.triple.e_r);
    if (m.abs_moment > 0.0 && !std::isnan(tp.phi_minus)) {
        const double mu_plus = m.plus_moment / m.abs_moment;
        const double mu_minus = m.minus_moment / m.abs_moment;
        const double lhs = mu_plus * out.triple.w_minus * std::pow(um, p);
        const double rhs = mu_minus * out.triple.w_plus * std::pow(up, p);
        out.mu_condition_ok =
            std::abs(lhs - rhs) <= 1e-10 * std::max({std::abs(lhs), std::abs(rhs), 1e-30});
    }
    return out;
}

}  // namespace qslkit
