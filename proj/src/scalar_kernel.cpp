#include "qslkit/scalar_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qslkit {

namespace {

constexpr double kPi = std::numbers::pi;

struct RootResult {
    double x = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

// Safeguarded Newton for f_{p,theta}(phi) = 0 on the bracket (lo, pi); every
// step is clipped to the current bracket (bisection fallback, cf. Press et al.).
RootResult solve_phi_plus(double p, double theta) {
    const auto& cfg = solver_config();
    auto f = [&](double x) {
        return p * (std::cos(x) - std::cos(theta)) + (x - theta) * std::sin(x);
    };
    auto df = [&](double x) {
        return (1.0 - p) * std::sin(x) + (x - theta) * std::cos(x);
    };

    // The tangency equation also vanishes at phi = theta; the wanted root lies
    // in (|theta|, pi) and, for p <= 1, in [pi/2, pi).
    double xl = (p <= 1.0) ? std::max(std::abs(theta), kPi / 2) : std::abs(theta);
    double xh = kPi;

    // Degenerate corner p = 1, theta -> pi/2: phi+ collapses onto theta.
    if (p == 1.0 && theta >= kPi / 2 - 1e-12) {
        return {theta, 0, 0.0};
    }
    // Nudge off the trivial root at the low end.
    double fl = f(xl);
    if (fl <= 0.0) {
        double step = 1e-12;
        while (fl <= 0.0 && step < 1e-3) {
            xl = std::min(xl + step, xh);
            fl = f(xl);
            step *= 10.0;
        }
        if (fl <= 0.0) return {xl, 0, std::abs(fl)};  // root within nudge of theta
    }

    double rts = kPi;  // guaranteed-convergence start per the solver contract
    double dxold = xh - xl, dx = dxold;
    double fv = f(rts), dfv = df(rts);
    bool pure_bisection = false;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        const bool newton_unsafe =
            pure_bisection || dfv == 0.0 ||
            (((rts - xh) * dfv - fv) * ((rts - xl) * dfv - fv) >= 0.0) ||
            (std::abs(2.0 * fv) > std::abs(dxold * dfv));
        if (newton_unsafe) {
            dxold = dx;
            dx = 0.5 * (xh - xl);
            rts = xl + dx;
        } else {
            dxold = dx;
            dx = fv / dfv;
            rts -= dx;
        }
        fv = f(rts);
        dfv = df(rts);
        if (std::abs(fv) <= cfg.abs_tol) return {rts, it, std::abs(fv)};
        if (fv > 0.0) xl = rts; else xh = rts;
        if (rts - theta < 1e-6) pure_bisection = true;  // ill-conditioned corner
        if (xh - xl <= 4.0 * std::numeric_limits<double>::epsilon() * kPi) {
            return {0.5 * (xl + xh), it, std::abs(fv)};
        }
    }
    throw ConvergenceError("phi_pair: tangency solver did not reach tolerance (p=" +
                           std::to_string(p) + ", theta=" + std::to_string(theta) + ")");
}

double coefficient_a(double p, double theta, double phi) {
    return std::sin(phi) / (p * std::pow(phi - theta, p - 1.0));
}

}  // namespace

bool in_admissible_region(double p, double theta) {
    if (!(p > 0.0 && p <= 2.0)) return false;
    if (theta <= -kPi || theta > kPi / 2) return false;
    if (p > 1.0 && theta > 0.0) return false;
    return true;
}

TangentPair phi_pair(double p, double theta) {
    if (!in_admissible_region(p, theta)) {
        throw DomainError("phi_pair: (p, theta) outside the admissible region (p=" +
                          std::to_string(p) + ", theta=" + std::to_string(theta) + ")");
    }
    TangentPair out;
    out.p = p;
    out.theta = theta;
    if (p == 2.0 && theta == 0.0) {
        out.phi_plus = 0.0;
        out.phi_minus = 0.0;
        out.a_plus = 0.5;  // limit of sin(phi) / (2 phi)
        out.a_minus = 0.5;
        return out;
    }
    const RootResult plus = solve_phi_plus(p, theta);
    out.phi_plus = plus.x;
    out.a_plus = coefficient_a(p, theta, plus.x);
    out.iterations = plus.iterations;
    out.residual = plus.residual;
    if (p <= 1.0 || theta == 0.0) {
        const RootResult mirrored = solve_phi_plus(p, -theta);
        out.phi_minus = -mirrored.x;
        out.a_minus = coefficient_a(p, -theta, mirrored.x);
        out.iterations += mirrored.iterations;
        out.residual = std::max(out.residual, mirrored.residual);
    } else {
        // The mirrored tangency equation has no root for p > 1, theta < 0;
        // phi_minus does not exist in that part of the region.
        out.phi_minus = std::numeric_limits<double>::quiet_NaN();
        out.a_minus = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

double h_of(double x) {
    if (x < 0.0 || x > kPi) throw DomainError("h_of: x outside [0, pi]");
    if (x < 1e-8) return 2.0 - x * x / 6.0;  // series of x cot(x/2)
    return x * std::cos(x / 2) / std::sin(x / 2);
}

double h_inverse(double y) {
    if (y < 0.0 || y > 2.0) throw DomainError("h_inverse: y outside [0, 2]");
    double lo = 0.0, hi = kPi;  // h decreasing: h(lo)=2, h(hi)=0
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (h_of(mid) >= y) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double epsilon_c(double p) {
    if (p < kPi / 2 - 1e-12 || p > 2.0) {
        throw DomainError("epsilon_c: p outside [pi/2, 2]");
    }
    const double c = std::cos(h_inverse(std::min(p, 2.0)));
    return c * c;
}

double theta_crit(double p, double epsilon) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("theta_crit: p outside (0, 1]");
    if (epsilon < 0.0 || epsilon > 1.0) throw DomainError("theta_crit: epsilon outside [0, 1]");
    const double se = std::sqrt(epsilon);
    const double hi = std::acos(se);
    if (hi == 0.0) return 0.0;
    auto r = [&](double th) {
        const double pm = phi_pair(p, th).phi_minus;
        return std::cos((pm - th) / 2) - se * std::cos((pm + th) / 2);
    };
    if (r(hi) >= 0.0) return hi;
    double lo = 0.0, up = hi;  // r decreasing, r(0) >= 0
    for (int it = 0; it < 200 && up - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + up);
        if (r(mid) >= 0.0) lo = mid; else up = mid;
    }
    return 0.5 * (lo + up);
}

double sin_half_over_pow(double u, double p) {
    if (std::abs(u) >= 1e-4) return std::sin(u / 2) / std::pow(u, p);
    const double u2 = u * u;
    return std::pow(u, 1.0 - p) *
           (0.5 - u2 / 48.0 + u2 * u2 / 3840.0 - u2 * u2 * u2 / 645120.0);
}

double s_epsilon(double p, double epsilon, double mu_plus, double theta) {
    const double se = std::sqrt(epsilon);
    const TangentPair tp = phi_pair(p, theta);
    const double up = tp.phi_plus - theta;
    const double um = theta - tp.phi_minus;
    const double s_plus =
        sin_half_over_pow(up, p) * (std::cos(up / 2) - se * std::cos((tp.phi_plus + theta) / 2));
    const double s_minus =
        -sin_half_over_pow(um, p) * (std::cos(um / 2) - se * std::cos((tp.phi_minus + theta) / 2));
    return mu_plus * s_plus + (1.0 - mu_plus) * s_minus;
}

AngleSolution theta_opt(double p, double epsilon, double mu_plus) {
    const auto& cfg = solver_config();
    AngleSolution out;
    out.theta_crit = theta_crit(p, epsilon);
    if (out.theta_crit == 0.0) return out;
    if (mu_plus >= 1.0) {
        out.theta_opt = -out.theta_crit;
        out.residual = 0.0;
        return out;
    }
    if (mu_plus <= 0.0) {
        out.theta_opt = out.theta_crit;
        return out;
    }
    auto s = [&](double th) { return s_epsilon(p, epsilon, mu_plus, th); };
    double xl = -out.theta_crit, xh = out.theta_crit;  // s increasing: s(xl) <= 0 <= s(xh)
    double sl = s(xl), sh = s(xh);
    if (sl >= 0.0) { out.theta_opt = xl; out.residual = std::abs(sl); return out; }
    if (sh <= 0.0) { out.theta_opt = xh; out.residual = std::abs(sh); return out; }

    double rts = 0.0;  // Newton from theta = 0 with numeric derivative
    double fv = s(rts);
    double dxold = xh - xl, dx = dxold;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        if (std::abs(fv) <= cfg.abs_tol) break;
        const double hstep = 1e-7 * std::max(1.0, std::abs(rts));
        const double dfv = (s(rts + hstep) - s(rts - hstep)) / (2.0 * hstep);
        const bool newton_unsafe =
            dfv == 0.0 || (((rts - xh) * dfv - fv) * ((rts - xl) * dfv - fv) >= 0.0) ||
            (std::abs(2.0 * fv) > std::abs(dxold * dfv));
        if (newton_unsafe) {
            dxold = dx;
            dx = 0.5 * (xh - xl);
            rts = xl + dx;
        } else {
            dxold = dx;
            dx = fv / dfv;
            rts -= dx;
        }
        fv = s(rts);
        if (fv < 0.0) xl = rts; else xh = rts;
        if (xh - xl <= 1e-16) break;
    }
    out.theta_opt = rts;
    out.residual = std::abs(fv);
    return out;
}

AngleFactor cz_angle_factor(double p, double epsilon, double mu_plus) {
    if (epsilon >= 1.0) return {0.0, 0.0};
    const AngleSolution sol = theta_opt(p, epsilon, mu_plus);
    const TangentPair tp = phi_pair(p, sol.theta_opt);
    const double denom = mu_plus * tp.a_plus + (1.0 - mu_plus) * tp.a_minus;
    const double value = (std::cos(sol.theta_opt) - std::sqrt(epsilon)) / denom;
    return {std::max(value, 0.0), sol.theta_opt};
}

}  // namespace qslkit
