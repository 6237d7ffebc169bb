#include "qslkit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qslkit/scalar_kernel.hpp"

namespace qslkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_eps(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw DomainError("epsilon outside [0, 1]");
    }
}

BoundResult divergent_result(BoundKind kind, std::string reason) {
    BoundResult out;
    out.kind = kind;
    out.value = kInf;
    out.divergent = true;
    out.reason = std::move(reason);
    return out;
}

}  // namespace

const char* bound_kind_name(BoundKind kind) {
    switch (kind) {
        case BoundKind::MT: return "mt";
        case BoundKind::ML: return "ml";
        case BoundKind::DualML: return "dualml";
        case BoundKind::LZ: return "lz";
        case BoundKind::LC: return "lc";
        case BoundKind::Chau: return "chau";
        case BoundKind::CZ: return "cz";
        case BoundKind::CZ2D: return "cz2d";
        case BoundKind::CZAsym: return "czasym";
    }
    return "?";
}

BoundResult mt_bound(const DiscreteSpectrum& state, double epsilon) {
    require_eps(epsilon);
    BoundResult out;
    out.kind = BoundKind::MT;
    if (epsilon == 1.0) return out;
    const double dE = summary(state).std_dev;
    if (dE == 0.0) {
        return divergent_result(BoundKind::MT, "zero energy spread");
    }
    out.value = std::acos(std::sqrt(epsilon)) / dE;
    return out;
}

BoundResult ml_bound(const DiscreteSpectrum& state, double epsilon) {
    require_eps(epsilon);
    BoundResult out;
    out.kind = BoundKind::ML;
    if (epsilon == 1.0) return out;
    const double mean_above = summary(state).mean_above_ground;
    if (mean_above == 0.0) {
        return divergent_result(BoundKind::ML, "mean energy equals ground energy");
    }
    const double theta_star = -theta_crit(1.0, epsilon);
    const TangentPair tp = phi_pair(1.0, theta_star);
    out.value = (std::cos(theta_star) - std::sqrt(epsilon)) /
                (mean_above * std::sin(tp.phi_plus));
    out.value = std::max(out.value, 0.0);
    out.theta_used = theta_star;
    out.iterations = tp.iterations;
    out.residual = tp.residual;
    return out;
}

BoundResult dual_ml_bound(const DiscreteSpectrum& state, double epsilon) {
    std::vector<Level> reversed;
    reversed.reserve(state.size());
    for (const Level& lv : state.levels()) reversed.push_back({-lv.energy, lv.weight});
    BoundResult out = ml_bound(DiscreteSpectrum::build_raw(std::move(reversed)), epsilon);
    out.kind = BoundKind::DualML;
    if (out.divergent) out.reason = "mean energy equals top energy";
    return out;
}

double lz_p_ceiling(double epsilon) {
    if (epsilon <= 0.0) return 2.0;
    return std::min(2.0, (kPi / 2) * std::sqrt((1.0 - epsilon) / epsilon));
}

BoundResult lz_bound(const DiscreteSpectrum& state, double epsilon, double p) {
    require_eps(epsilon);
    if (!(p > 0.0 && p <= 2.0)) throw DomainError("lz_bound: p outside (0, 2]");
    const double ceiling = kPi * kPi / (kPi * kPi + 4.0 * p * p);
    if (epsilon > ceiling + 1e-15) {
        throw DomainError("lz_bound: epsilon above the validity ceiling for this p");
    }
    BoundResult out;
    out.kind = BoundKind::LZ;
    out.p_used = p;
    const double ground = state.levels().front().energy;
    const double moment = moments(state, p, ground).plus_moment;
    const double numer =
        1.0 - std::sqrt(std::min(epsilon * (1.0 + 4.0 * p * p / (kPi * kPi)), 1.0));
    if (numer <= 0.0) return out;  // value 0 at the validity boundary
    if (moment == 0.0) {
        return divergent_result(BoundKind::LZ, "zero pth moment above ground");
    }
    out.value = kPi * std::pow(numer / (2.0 * moment), 1.0 / p);
    return out;
}

BoundResult lc_bound(const DiscreteSpectrum& state, double epsilon, double p) {
    require_eps(epsilon);
    if (!(p > 0.0 && p <= 2.0)) throw DomainError("lc_bound: p outside (0, 2]");
    BoundResult out;
    out.kind = (p == 1.0) ? BoundKind::Chau : BoundKind::LC;
    out.p_used = p;
    if (epsilon == 1.0) return out;
    const MomentProfile prof = e_r_opt(state, p);
    out.e_r_used = prof.e_r_opt;
    if (prof.moment == 0.0) {
        BoundResult div = divergent_result(out.kind, "zero optimal pth moment");
        div.p_used = p;
        return div;
    }
    const TangentPair tp = phi_pair(p, 0.0);
    out.value = std::pow((1.0 - std::sqrt(epsilon)) / (tp.a_plus * prof.moment), 1.0 / p);
    out.iterations = tp.iterations;
    out.residual = tp.residual;
    return out;
}

BoundResult cz_bound_fixed_p(const DiscreteSpectrum& state, double epsilon, double p) {
    require_eps(epsilon);
    if (!(p > 0.0 && p <= 2.0)) throw DomainError("cz_bound_fixed_p: p outside (0, 2]");
    if (state.size() == 1) {
        if (epsilon == 1.0) {
            BoundResult out;
            out.kind = BoundKind::CZ;
            out.p_used = p;
            return out;
        }
        return divergent_result(BoundKind::CZ, "degenerate single-level state");
    }
    if (p > 1.0) {
        BoundResult out = lc_bound(state, epsilon, p);
        out.kind = BoundKind::CZ;
        out.theta_used = 0.0;
        return out;
    }
    BoundResult out;
    out.kind = BoundKind::CZ;
    out.p_used = p;
    if (epsilon == 1.0) return out;
    const MomentProfile prof = e_r_opt(state, p);
    std::vector<double> candidates = prof.candidates;
    if (candidates.empty()) candidates.push_back(prof.e_r_opt);
    double best = -1.0;
    for (double e_r : candidates) {
        const Moments m = moments(state, p, e_r);
        if (m.abs_moment == 0.0) {
            return divergent_result(BoundKind::CZ, "zero pth moment at the optimal E_r");
        }
        const double mu_plus = m.plus_moment / m.abs_moment;
        const AngleFactor af = cz_angle_factor(p, epsilon, mu_plus);
        const double value = std::pow(af.value / m.abs_moment, 1.0 / p);
        if (value > best) {
            best = value;
            out.value = value;
            out.theta_used = af.theta;
            out.e_r_used = e_r;
        }
    }
    return out;
}

namespace {

// Closed-form time from the asymmetric two-exponent inequality at equality:
// a2 y^2 + a1 y = cos(theta) - sqrt(eps) with y = tau^{base exponent}.
double asym_quadratic(double a2, double a1, double c) {
    if (c <= 0.0) return 0.0;
    if (a2 <= 0.0 && a1 <= 0.0) return kInf;
    if (a2 <= 0.0) return c / a1;
    const double disc = a1 * a1 + 4.0 * a2 * c;
    return (std::sqrt(disc) - a1) / (2.0 * a2);
}

struct AsymCoeffs {
    double a_hi = 0.0;  // coefficient multiplying the doubled-exponent moment
    double a_lo = 0.0;  // coefficient multiplying the base-exponent moment
};

void check_asym_region(double q, double theta, AsymVariant variant) {
    if (!(q > 0.0 && q <= 1.0)) {
        throw DomainError("cz_asymmetric: base exponent outside (0, 1]");
    }
    if (std::abs(theta) > kPi / 2 + 1e-15) {
        throw DomainError("cz_asymmetric: theta outside [-pi/2, pi/2]");
    }
    if (q > 0.5) {
        if (variant == AsymVariant::P_EQUALS_2Q && theta > 1e-15) {
            throw DomainError("cz_asymmetric: theta must be <= 0 for q > 1/2");
        }
        if (variant == AsymVariant::Q_EQUALS_2P && theta < -1e-15) {
            throw DomainError("cz_asymmetric: theta must be >= 0 for p > 1/2");
        }
    }
}

double asym_value_at(const DiscreteSpectrum& state, double epsilon, double q,
                     double theta, AsymVariant variant, double e_r, double* residual) {
    const double se = std::sqrt(epsilon);
    const double c = std::cos(theta) - se;
    // A+ at (p, theta) solves the tangency at theta; A- at (p, theta) equals
    // A+ at (p, -theta).
    double tau;
    if (variant == AsymVariant::P_EQUALS_2Q) {
        // cos t - A+_{2q,t} M2q+ tau^{2q} - A-_{q,t} Mq- tau^q = sqrt(eps)
        const double a_plus = phi_pair(2.0 * q, theta).a_plus;
        const double a_minus = phi_pair(q, -theta).a_plus;
        const double m_hi = moments(state, std::min(2.0 * q, 2.0), e_r).plus_moment;
        const double m_lo = moments(state, q, e_r).minus_moment;
        const double y = asym_quadratic(a_plus * m_hi, a_minus * m_lo, c);
        tau = std::isinf(y) ? kInf : std::pow(y, 1.0 / q);
        if (residual) {
            *residual = std::isinf(tau) ? 0.0
                                        : std::abs(std::cos(theta) - a_plus * m_hi * y * y -
                                                   a_minus * m_lo * y - se);
        }
    } else {
        // cos t - A+_{p,t} Mp+ tau^p - A-_{2p,t} M2p- tau^{2p} = sqrt(eps)
        const double a_plus = phi_pair(q, theta).a_plus;
        const double a_minus = phi_pair(2.0 * q, -theta).a_plus;
        const double m_lo = moments(state, q, e_r).plus_moment;
        const double m_hi = moments(state, std::min(2.0 * q, 2.0), e_r).minus_moment;
        const double y = asym_quadratic(a_minus * m_hi, a_plus * m_lo, c);
        tau = std::isinf(y) ? kInf : std::pow(y, 1.0 / q);
        if (residual) {
            *residual = std::isinf(tau) ? 0.0
                                        : std::abs(std::cos(theta) - a_minus * m_hi * y * y -
                                                   a_plus * m_lo * y - se);
        }
    }
    return tau;
}

}  // namespace

double cz_asymmetric_at(const DiscreteSpectrum& state, double epsilon, double q,
                        double theta, AsymVariant variant, double e_r) {
    require_eps(epsilon);
    check_asym_region(q, theta, variant);
    return asym_value_at(state, epsilon, q, theta, variant, e_r, nullptr);
}

BoundResult cz_asymmetric(const DiscreteSpectrum& state, double epsilon, double q,
                          double theta, AsymVariant variant) {
    require_eps(epsilon);
    check_asym_region(q, theta, variant);
    BoundResult out;
    out.kind = BoundKind::CZAsym;
    out.p_used = q;
    out.theta_used = theta;
    if (epsilon == 1.0 && std::cos(theta) <= 1.0) {
        const Level& lo = state.levels().front();
        out.e_r_used = lo.energy;
        return out;
    }
    auto value_at = [&](double e_r) {
        return asym_value_at(state, epsilon, q, theta, variant, e_r, nullptr);
    };
    const auto& lv = state.levels();
    double best = -1.0, best_er = lv.front().energy;
    auto consider = [&](double e_r) {
        const double v = value_at(e_r);
        if (v > best) {
            best = v;
            best_er = e_r;
        }
    };
    for (const Level& l : lv) consider(l.energy);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t j = 0; j + 1 < lv.size(); ++j) {
        double a = lv[j].energy, b = lv[j + 1].energy;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = value_at(x1), f2 = value_at(x2);
        const double tol = 1e-10 * std::max(1.0, lv.back().energy - lv.front().energy);
        while (b - a > tol) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = value_at(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = value_at(x1);
            }
        }
        consider(0.5 * (a + b));
    }
    if (std::isinf(best)) {
        BoundResult div = divergent_result(BoundKind::CZAsym, "no mass on one side of E_r");
        div.p_used = q;
        div.theta_used = theta;
        return div;
    }
    double residual = 0.0;
    out.value = asym_value_at(state, epsilon, q, theta, variant, best_er, &residual);
    out.e_r_used = best_er;
    out.residual = residual;
    return out;
}

}  // namespace qslkit
