#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qslkit/fixtures.hpp"
#include "qslkit/optimizer.hpp"
#include "qslkit/saturation.hpp"
#include "qslkit/scalar_kernel.hpp"

using namespace qslkit;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("saturating triple, p = 1/2, eps = 0") {
    const SaturatingTriple t = saturating_state(0.5, 0.0, 0.0, 0.0, 1.0);
    CHECK(t.e_plus == doctest::Approx(2.7864981506511945).epsilon(1e-12));
    CHECK(t.e_minus == doctest::Approx(-2.7864981506511945).epsilon(1e-12));
    CHECK(t.w_plus == doctest::Approx(0.25804938127357441).epsilon(1e-11));
    CHECK(t.w_r == doctest::Approx(0.48390123745285124).epsilon(1e-11));
    CHECK(t.w_minus == doctest::Approx(0.25804938127357441).epsilon(1e-11));
    CHECK(t.predicted_tau == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.w_plus + t.w_r + t.w_minus == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("saturating triple, p = 1 (Chau), eps = 0") {
    const SaturatingTriple t = saturating_state(1.0, 0.0, 0.0, 0.0, 1.0);
    CHECK(t.e_plus == doctest::Approx(2.331122370414423).epsilon(1e-12));
    CHECK(t.w_plus == doctest::Approx(0.29600551).epsilon(1e-7));
    CHECK(t.w_r == doctest::Approx(0.40798898).epsilon(1e-7));
    CHECK(t.w_minus == doctest::Approx(0.29600551).epsilon(1e-7));
    const BoundResult b = cz_bound_fixed_p(t.as_state(), 0.0, 1.0);
    CHECK(b.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("saturating triple, p = 1.9 above the saturability frontier") {
    const double se = 0.7674;
    const SaturatingTriple t = saturating_state(1.9, se * se, 0.0, 0.0, 1.0);
    CHECK(t.e_plus == doctest::Approx(0.7707362).epsilon(1e-6));
    CHECK(t.w_plus == doctest::Approx(0.411533).epsilon(1e-4));
    CHECK(t.w_r == doctest::Approx(0.176934).epsilon(1e-4));
    CHECK(t.w_minus == t.w_plus);  // theta = 0 is exactly symmetric
}

TEST_CASE("saturability frontier for p in (1, 2)") {
    const double p = 1.9;
    const double ec = epsilon_c(p);
    CHECK_NOTHROW(saturating_state(p, ec + 1e-6, 0.0, 0.0, 1.0));
    CHECK_THROWS_AS(saturating_state(p, ec - 1e-6, 0.0, 0.0, 1.0), SaturabilityError);
    CHECK_THROWS_AS(saturating_state(1.5, 0.9, 0.1, 0.0, 1.0), SaturabilityError);
    CHECK_THROWS_AS(saturating_state(2.0, 0.5, 0.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(saturating_state(0.5, 0.25, 1.2, 0.0, 1.0), SaturabilityError);
}

TEST_CASE("eps = 1 collapses onto the reference level") {
    const SaturatingTriple t = saturating_state(0.7, 1.0, 0.0, 0.3, 1.0);
    CHECK(t.w_r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.predicted_tau == 0.0);
}

TEST_CASE("triple covariance under energy shift and scale") {
    const SaturatingTriple base = saturating_state(0.6, 0.04, -0.2, 0.0, 1.0);
    const SaturatingTriple moved = saturating_state(0.6, 0.04, -0.2, 3.0, 2.0);
    CHECK(moved.e_plus == doctest::Approx(3.0 + 2.0 * (base.e_plus - 0.0)).epsilon(1e-12));
    CHECK(moved.e_minus == doctest::Approx(3.0 + 2.0 * base.e_minus).epsilon(1e-12));
    CHECK(moved.w_plus == doctest::Approx(base.w_plus).epsilon(1e-12));
    CHECK(moved.predicted_tau == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("weights stay a distribution across the admissible set") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> up(0.05, 1.0), ue(0.0, 0.999), uf(0.0, 1.0);
    int built = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const double p = up(rng), eps = ue(rng);
        const double cap = theta_crit(p, eps);
        const double th = (2.0 * uf(rng) - 1.0) * cap;
        const SaturatingTriple t = saturating_state(p, eps, th, 0.0, 1.0);
        CHECK(t.w_plus >= 0.0);
        CHECK(t.w_r >= 0.0);
        CHECK(t.w_minus >= 0.0);
        CHECK(t.w_plus + t.w_r + t.w_minus == doctest::Approx(1.0).epsilon(1e-10));
        ++built;
    }
    CHECK(built == 1000);
}

TEST_CASE("evolution-time oracle spot checks") {
    const OracleResult a = evolution_time(builtin_state("a"), 0.0, 10.0);
    REQUIRE(a.tau_first.has_value());
    CHECK(*a.tau_first == doctest::Approx(kPi).epsilon(1e-10));

    const OracleResult b = evolution_time(builtin_state("b"), 0.0, 0.1);
    REQUIRE(b.tau_first.has_value());
    CHECK(*b.tau_first == doctest::Approx(0.0030679615757712823).epsilon(1e-9));

    const OracleResult none = evolution_time(builtin_state("a"), 0.0, 1.0);
    CHECK(!none.tau_first.has_value());  // horizon shorter than pi

    const OracleResult triv = evolution_time(builtin_state("a"), 1.0, 1.0);
    REQUIRE(triv.tau_first.has_value());
    CHECK(*triv.tau_first == 0.0);
}

TEST_CASE("constructed triples saturate their own bound") {
    // the angle is given as a fraction of theta_crit (0 for the p > 1 cases)
    for (auto [p, se, frac] : {std::tuple{0.5, 0.0, 0.0}, {1.0, 0.3, 0.5},
                               {0.8, 0.5, -0.8}, {1.9, 0.9, 0.0}}) {
        const double th = (p <= 1.0) ? frac * theta_crit(p, se * se) : 0.0;
        const SaturationReport rep = verify_saturation(p, se * se, th);
        CHECK(rep.rel_gap <= 1e-6);
        CHECK(rep.mu_condition_ok);
        CHECK(rep.tau_oracle == doctest::Approx(rep.triple.predicted_tau).epsilon(1e-8));
    }
}
