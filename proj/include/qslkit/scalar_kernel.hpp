#pragma once

#include "qslkit/common.hpp"

namespace qslkit {

// Solution bundle of the tangency equation
//   f_{p,theta}(phi) = p (cos phi - cos theta) + (phi - theta) sin phi = 0.
// phi_plus is the unique root in (|theta|, pi); phi_minus = -phi_plus(p, -theta).
// a_plus = sin(phi_plus) / (p (phi_plus - theta)^{p-1}), analogously for a_minus.
struct TangentPair {
    double theta = 0.0;
    double phi_plus = 0.0;
    double phi_minus = 0.0;
    double a_plus = 0.0;
    double a_minus = 0.0;
    double p = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

// Admissible region for (p, theta): p in (0,1] with theta in (-pi, pi/2],
// or p in (1,2] with theta in (-pi, 0].
bool in_admissible_region(double p, double theta);

// Safeguarded Newton from pi with bisection fallback; (p,theta)=(2,0) returns
// the limit phi = 0, A = 1/2. Throws DomainError outside the admissible region.
TangentPair phi_pair(double p, double theta);

// h(x) = x cot(x/2) on [0, pi], h(0) = 2; strictly decreasing.
double h_of(double x);
// Inverse of h on [0, 2] by monotone bisection.
double h_inverse(double y);

// Minimum fidelity for which the LC bound is saturable at exponent p in [pi/2, 2].
double epsilon_c(double p);

// Unique root of r_eps^-(theta) = cos((phi_minus - theta)/2)
//   - sqrt(eps) cos((phi_minus + theta)/2) in [0, arccos(sqrt(eps))], p in (0,1].
double theta_crit(double p, double epsilon);

struct AngleSolution {
    double theta_crit = 0.0;
    double theta_opt = 0.0;
    double residual = 0.0;
};

// Unique root of s_eps(theta) = mu+ s+ + mu- s- in [-theta_crit, theta_crit].
AngleSolution theta_opt(double p, double epsilon, double mu_plus);

struct AngleFactor {
    double value = 0.0;
    double theta = 0.0;
};

// max over theta of (cos theta - sqrt(eps)) / (mu+ A+ + mu- A-), at theta_opt.
AngleFactor cz_angle_factor(double p, double epsilon, double mu_plus);

// sin(u/2) / u^p with a series branch for |u| < 1e-4.
double sin_half_over_pow(double u, double p);

// s_eps(theta) for given (p, eps, mu_plus); exposed for tests.
double s_epsilon(double p, double epsilon, double mu_plus, double theta);

}  // namespace qslkit
