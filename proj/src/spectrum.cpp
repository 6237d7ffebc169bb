#include "qslkit/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qslkit {

namespace {

std::vector<Level> sanitize(std::vector<Level> raw) {
    if (raw.empty()) throw ValidationError("state: no levels given");
    for (const Level& lv : raw) {
        if (!std::isfinite(lv.energy) || !std::isfinite(lv.weight)) {
            throw ValidationError("state: non-finite energy or weight");
        }
        if (lv.weight < 0.0) throw ValidationError("state: negative weight");
    }
    std::sort(raw.begin(), raw.end(),
              [](const Level& a, const Level& b) { return a.energy < b.energy; });
    std::vector<Level> merged;
    for (const Level& lv : raw) {
        if (!merged.empty() && merged.back().energy == lv.energy) {
            merged.back().weight += lv.weight;
        } else {
            merged.push_back(lv);
        }
    }
    std::erase_if(merged, [](const Level& lv) { return lv.weight == 0.0; });
    if (merged.empty()) throw ValidationError("state: all weights vanish");
    return merged;
}

double weight_sum(const std::vector<Level>& levels) {
    double s = 0.0;
    for (const Level& lv : levels) s += lv.weight;
    return s;
}

void require_p(double p, const char* who) {
    if (!(p > 0.0 && p <= 2.0)) {
        throw DomainError(std::string(who) + ": p outside (0, 2]");
    }
}

// One-sided q-moments (q may be negative-exponent-free here: q > -1 not needed
// for the discrete case; any real q works on strict inequalities).
void one_sided(const std::vector<Level>& levels, double q, double e_r, double& plus,
               double& minus) {
    plus = 0.0;
    minus = 0.0;
    for (const Level& lv : levels) {
        if (lv.energy > e_r) {
            plus += lv.weight * std::pow(lv.energy - e_r, q);
        } else if (lv.energy < e_r) {
            minus += lv.weight * std::pow(e_r - lv.energy, q);
        }
    }
}

}  // namespace

DiscreteSpectrum DiscreteSpectrum::build(std::vector<Level> raw, std::string name) {
    DiscreteSpectrum out;
    out.levels_ = sanitize(std::move(raw));
    out.name_ = std::move(name);
    const double sum = weight_sum(out.levels_);
    if (std::abs(sum - 1.0) > 1e-6) {
        throw ValidationError("state: weights sum to " + std::to_string(sum) +
                              ", expected 1 within 1e-6");
    }
    if (sum != 1.0) {
        for (Level& lv : out.levels_) lv.weight /= sum;
    }
    out.total_weight_ = weight_sum(out.levels_);
    return out;
}

DiscreteSpectrum DiscreteSpectrum::build_raw(std::vector<Level> raw, std::string name) {
    DiscreteSpectrum out;
    out.levels_ = sanitize(std::move(raw));
    out.name_ = std::move(name);
    out.total_weight_ = weight_sum(out.levels_);
    return out;
}

Moments moments(const DiscreteSpectrum& state, double p, double e_r) {
    require_p(p, "moments");
    Moments out;
    one_sided(state.levels(), p, e_r, out.plus_moment, out.minus_moment);
    out.abs_moment = out.plus_moment + out.minus_moment;
    return out;
}

SpectrumSummary summary(const DiscreteSpectrum& state) {
    const auto& lv = state.levels();
    SpectrumSummary out;
    double m1 = 0.0, m2 = 0.0;
    for (const Level& l : lv) {
        m1 += l.weight * l.energy;
        m2 += l.weight * l.energy * l.energy;
    }
    out.mean = m1;
    out.std_dev = std::sqrt(std::max(m2 - m1 * m1, 0.0));
    out.ground = lv.front().energy;
    out.top = lv.back().energy;
    out.mean_above_ground = out.mean - out.ground;
    out.mean_below_top = out.top - out.mean;
    const double half = state.total_weight() / 2.0;
    double cum = 0.0;
    out.median = lv.back().energy;
    for (const Level& l : lv) {
        cum += l.weight;
        if (cum >= half) {
            out.median = l.energy;
            break;
        }
    }
    return out;
}

MomentProfile e_r_opt(const DiscreteSpectrum& state, double p) {
    require_p(p, "e_r_opt");
    const auto& cfg = solver_config();
    const auto& lv = state.levels();
    const std::size_t n = lv.size();
    MomentProfile out;
    out.p = p;
    if (n == 1) {
        out.e_r_opt = lv.front().energy;
        return out;
    }

    auto finish = [&](double e_r) {
        const Moments m = moments(state, p, e_r);
        out.e_r_opt = e_r;
        out.moment = m.abs_moment;
        if (m.abs_moment > 0.0) {
            out.mu_plus = m.plus_moment / m.abs_moment;
            out.mu_minus = m.minus_moment / m.abs_moment;
        }
    };

    if (p > 1.0) {
        // Balance of one-sided (p-1)-moments, strictly decreasing in E_r.
        auto g = [&](double x) {
            double pl, mi;
            one_sided(lv, p - 1.0, x, pl, mi);
            return pl - mi;
        };
        // Largest level index with g > 0 (g(E_0) > 0 > g(E_{n-1})).
        std::size_t lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (g(lv[mid].energy) > 0.0) lo = mid; else hi = mid;
        }
        if (g(lv[hi].energy) > 0.0) lo = hi;  // cannot happen by the sign contract
        const double span = lv.back().energy - lv.front().energy;
        double xl = lv[lo].energy, xh = lv[lo + 1].energy;
        const double delta = 1e-9 * span;
        double rts = xh - delta;
        double fv = g(rts);
        double dxold = xh - xl, dx = dxold;
        for (int it = 0; it < cfg.max_iter; ++it) {
            if (fv == 0.0) break;
            double pl, mi;
            one_sided(lv, p - 2.0, rts, pl, mi);
            const double dfv = -(p - 1.0) * (pl + mi);
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
            fv = g(rts);
            if (fv > 0.0) xl = rts; else xh = rts;
            if (xh - xl <= 1e-15 * std::max(span, 1.0)) break;
        }
        finish(rts);
        return out;
    }

    if (p == 1.0) {
        // Weighted median; interval medians resolve to the lower level.
        const double half = state.total_weight() / 2.0;
        double cum = 0.0;
        double med = lv.back().energy;
        for (const Level& l : lv) {
            cum += l.weight;
            if (cum >= half) {
                med = l.energy;
                break;
            }
        }
        finish(med);
        return out;
    }

    // p < 1: the minimizer sits on a level; exhaustive scan with tie retention.
    std::vector<double> vals(n);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        vals[j] = moments(state, p, lv[j].energy).abs_moment;
        best = std::min(best, vals[j]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (vals[j] <= best * (1.0 + 1e-12)) out.candidates.push_back(lv[j].energy);
    }
    finish(out.candidates.front());
    return out;
}

// ---------------------------------------------------------------------------
// Continuous spectra
// ---------------------------------------------------------------------------

namespace {

double trapezoid_mass(const std::vector<GridPoint>& g) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        s += 0.5 * (g[i].rho + g[i + 1].rho) * (g[i + 1].energy - g[i].energy);
    }
    return s;
}

template <class F>
double simpson_segment(const F& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // Stop when converged or when the interval can no longer be resolved in
    // double precision (sliver pieces next to a grid node).
    if (std::abs(delta) <= 15.0 * tol || !(a < lm && lm < m && m < rm && rm < b) ||
        b - a <= 1e-13 * (std::abs(a) + std::abs(b))) {
        return left + right + delta / 15.0;
    }
    if (depth <= 0) throw QuadratureError("adaptive Simpson: refinement limit reached");
    return simpson_segment(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_segment(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Depth 64: an |x|^p endpoint singularity with p near 1/2 sheds error as
    // 2^{-3d/2} against a tolerance halving per level, so ~60 levels suffice.
    return simpson_segment(f, a, b, fa, fm, fb, whole, tol, 64);
}

// Exact one-sided integrals of a linear density piece rho(E) = c0 + s (E - a)
// against |E - x|^q (q > -1); closed forms keep the singular q < 0 case exact.
double piece_above(double c0, double s, double a, double b, double x, double q) {
    // requires x <= a: integral of rho(E) (E - x)^q over [a, b]
    const double A = c0 - s * (a - x);
    auto anti = [&](double u) {
        return A * std::pow(u, q + 1.0) / (q + 1.0) + s * std::pow(u, q + 2.0) / (q + 2.0);
    };
    return anti(b - x) - anti(a - x);
}

double piece_below(double c0, double s, double a, double b, double x, double q) {
    // requires x >= b: integral of rho(E) (x - E)^q over [a, b]
    const double A = c0 + s * (x - a);
    auto anti = [&](double u) {
        return A * std::pow(u, q + 1.0) / (q + 1.0) - s * std::pow(u, q + 2.0) / (q + 2.0);
    };
    return anti(x - a) - anti(x - b);
}

}  // namespace

ContinuousSpectrum ContinuousSpectrum::build(std::vector<GridPoint> grid,
                                             std::string name) {
    if (grid.size() < 2) throw ValidationError("density: need at least two grid points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i].energy) || !std::isfinite(grid[i].rho)) {
            throw ValidationError("density: non-finite grid entry");
        }
        if (grid[i].rho < 0.0) throw ValidationError("density: negative density");
        if (i > 0 && grid[i].energy <= grid[i - 1].energy) {
            throw ValidationError("density: energies must be strictly increasing");
        }
    }
    const double mass = trapezoid_mass(grid);
    if (std::abs(mass - 1.0) > 1e-6) {
        throw ValidationError("density: integrates to " + std::to_string(mass) +
                              ", expected 1 within 1e-6");
    }
    if (mass != 1.0) {
        for (GridPoint& gp : grid) gp.rho /= mass;
    }
    ContinuousSpectrum out;
    out.grid_ = std::move(grid);
    out.name_ = std::move(name);
    return out;
}

Moments continuous_moments(const ContinuousSpectrum& state, double p, double e_r) {
    require_p(p, "continuous_moments");
    const auto& g = state.grid();
    Moments out;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        double a = g[i].energy, b = g[i + 1].energy;
        const double slope = (g[i + 1].rho - g[i].rho) / (b - a);
        auto rho = [&](double x) { return g[i].rho + slope * (x - g[i].energy); };
        auto f = [&](double x) { return rho(x) * std::pow(std::abs(x - e_r), p); };
        auto piece = [&](double lo, double hi) {
            if (hi <= lo) return 0.0;
            const double coarse = (hi - lo) * f(0.5 * (lo + hi));
            const double tol = 1e-10 * std::max(std::abs(coarse), 1e-16);
            return adaptive_simpson(f, lo, hi, tol);
        };
        if (e_r <= a) {
            out.plus_moment += piece(a, b);
        } else if (e_r >= b) {
            out.minus_moment += piece(a, b);
        } else {
            out.minus_moment += piece(a, e_r);
            out.plus_moment += piece(e_r, b);
        }
    }
    out.abs_moment = out.plus_moment + out.minus_moment;
    return out;
}

MomentProfile continuous_profile(const ContinuousSpectrum& state, double p) {
    require_p(p, "continuous_profile");
    const auto& cfg = solver_config();
    const auto& g = state.grid();
    // Balance of one-sided (p-1)-moments; exact per linear piece so the q < 0
    // singularity at E = x costs nothing.
    auto balance = [&](double x) {
        double plus = 0.0, minus = 0.0;
        const double q = p - 1.0;
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            const double a = g[i].energy, b = g[i + 1].energy;
            const double slope = (g[i + 1].rho - g[i].rho) / (b - a);
            if (x <= a) {
                plus += piece_above(g[i].rho, slope, a, b, x, q);
            } else if (x >= b) {
                minus += piece_below(g[i].rho, slope, a, b, x, q);
            } else {
                minus += piece_below(g[i].rho, slope, a, x, x, q);
                plus += piece_above(g[i].rho + slope * (x - a), slope, x, b, x, q);
            }
        }
        return plus - minus;
    };
    double xl = g.front().energy, xh = g.back().energy;
    double rts = 0.5 * (xl + xh);
    double fv = balance(rts);
    for (int it = 0; it < cfg.max_iter; ++it) {
        if (fv > 0.0) xl = rts; else xh = rts;
        rts = 0.5 * (xl + xh);
        if (xh - xl <= 1e-14 * std::max(std::abs(xh) + std::abs(xl), 1.0)) break;
        fv = balance(rts);
    }
    MomentProfile out;
    out.p = p;
    out.e_r_opt = rts;
    const Moments m = continuous_moments(state, p, rts);
    out.moment = m.abs_moment;
    if (m.abs_moment > 0.0) {
        out.mu_plus = m.plus_moment / m.abs_moment;
        out.mu_minus = m.minus_moment / m.abs_moment;
    }
    return out;
}

}  // namespace qslkit
