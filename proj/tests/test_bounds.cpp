#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qslkit/bounds.hpp"
#include "qslkit/fixtures.hpp"

using namespace qslkit;

namespace {

constexpr double kPi = std::numbers::pi;

DiscreteSpectrum random_state(std::mt19937& rng, int max_levels = 6) {
    std::uniform_real_distribution<double> ue(0.0, 10.0), uw(0.05, 1.0);
    std::vector<Level> raw;
    const int n = 2 + int(rng() % (max_levels - 1));
    for (int j = 0; j < n; ++j) raw.push_back({ue(rng), uw(rng)});
    double tot = 0.0;
    for (const Level& lv : raw) tot += lv.weight;
    for (Level& lv : raw) lv.weight /= tot;
    return DiscreteSpectrum::build(std::move(raw));
}

}  // namespace

TEST_CASE("MT bound reference values") {
    CHECK(mt_bound(builtin_state("a"), 0.0).value == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(mt_bound(builtin_state("d"), 0.01).value ==
          doctest::Approx(std::acos(0.1) / 0.3).epsilon(1e-12));
    CHECK(mt_bound(builtin_state("a"), 1.0).value == 0.0);
    CHECK_THROWS_AS(mt_bound(builtin_state("a"), -0.1), DomainError);
    CHECK_THROWS_AS(mt_bound(builtin_state("a"), 1.1), DomainError);
}

TEST_CASE("ML bound reference values") {
    CHECK(ml_bound(builtin_state("a"), 0.0).value == doctest::Approx(kPi).epsilon(1e-10));
    CHECK(ml_bound(builtin_state("d"), 0.01).value ==
          doctest::Approx(1.5431871268622237).epsilon(1e-11));
    CHECK(ml_bound(builtin_state("g"), 0.9801).value ==
          doctest::Approx(0.009919900213663168).epsilon(1e-11));
    CHECK(ml_bound(builtin_state("a"), 1.0).value == 0.0);
}

TEST_CASE("dual ML is ML of the reversed state") {
    CHECK(dual_ml_bound(builtin_state("d"), 0.01).value ==
          doctest::Approx(13.888684141760015).epsilon(1e-11));
    std::mt19937 rng(29);
    for (int rep = 0; rep < 20; ++rep) {
        const DiscreteSpectrum s = random_state(rng);
        std::vector<Level> rev;
        for (const Level& lv : s.levels()) rev.push_back({-lv.energy, lv.weight});
        const DiscreteSpectrum r = DiscreteSpectrum::build(std::move(rev));
        CHECK(dual_ml_bound(s, 0.2).value ==
              doctest::Approx(ml_bound(r, 0.2).value).epsilon(1e-11));
        CHECK(dual_ml_bound(r, 0.2).value ==
              doctest::Approx(ml_bound(s, 0.2).value).epsilon(1e-11));
    }
}

TEST_CASE("LZ bound and its validity ceiling") {
    const auto& a = builtin_state("a");
    // p = 1, eps = 0: pi (1 - 0) / (2 * 0.5) = pi
    CHECK(lz_bound(a, 0.0, 1.0).value == doctest::Approx(kPi).epsilon(1e-12));
    // p = 2, eps = 0: pi [1 / (2 * 0.5)]^{1/2} = pi
    CHECK(lz_bound(a, 0.0, 2.0).value == doctest::Approx(kPi).epsilon(1e-12));
    const double eps = 0.5;
    const double pc = lz_p_ceiling(eps);
    CHECK(pc == doctest::Approx((kPi / 2) * std::sqrt((1 - eps) / eps)).epsilon(1e-12));
    CHECK_NOTHROW(lz_bound(a, eps, pc - 1e-9));
    CHECK_THROWS_AS(lz_bound(a, eps, pc + 1e-6), DomainError);
    CHECK(lz_p_ceiling(0.0) == 2.0);
}

TEST_CASE("LC bound reference values and Chau at p = 1") {
    const BoundResult chau = lc_bound(builtin_state("a"), 0.0, 1.0);
    CHECK(chau.kind == BoundKind::Chau);
    CHECK(chau.value == doctest::Approx(2.7601002793786025).epsilon(1e-11));
    const BoundResult lc = lc_bound(builtin_state("a"), 0.0, 1.5);
    CHECK(lc.kind == BoundKind::LC);
    CHECK(lc.value > 0.0);
    CHECK(lc_bound(builtin_state("a"), 1.0, 0.7).value == 0.0);
}

TEST_CASE("CZ fixed-p reference value") {
    const BoundResult cz = cz_bound_fixed_p(builtin_state("g"), 0.35 * 0.35, 1.0);
    CHECK(cz.value == doctest::Approx(0.7577).epsilon(5e-4));
    REQUIRE(cz.theta_used.has_value());
    CHECK(*cz.theta_used == doctest::Approx(-0.10).epsilon(5e-2));
    // p > 1 falls back to the symmetric-angle form
    const BoundResult hi = cz_bound_fixed_p(builtin_state("g"), 0.04, 1.5);
    CHECK(hi.kind == BoundKind::CZ);
    CHECK(hi.value == doctest::Approx(lc_bound(builtin_state("g"), 0.04, 1.5).value).epsilon(1e-12));
}

TEST_CASE("CZ dominates LC at equal p") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> up(0.1, 1.0), ue(0.0, 0.9);
    for (int rep = 0; rep < 40; ++rep) {
        const DiscreteSpectrum s = random_state(rng);
        const double p = up(rng), eps = ue(rng);
        const BoundResult lc = lc_bound(s, eps, p);
        const BoundResult cz = cz_bound_fixed_p(s, eps, p);
        CHECK(cz.value >= lc.value - 1e-12 * std::max(1.0, lc.value));
    }
}

TEST_CASE("bounds decrease with epsilon") {
    const auto& g = builtin_state("g");
    double prev_mt = 1e300, prev_ml = 1e300, prev_lc = 1e300, prev_cz = 1e300;
    for (double eps : {0.0, 0.1, 0.3, 0.6, 0.9, 1.0}) {
        const double mt = mt_bound(g, eps).value;
        const double ml = ml_bound(g, eps).value;
        const double lc = lc_bound(g, eps, 0.8).value;
        const double cz = cz_bound_fixed_p(g, eps, 0.8).value;
        CHECK(mt <= prev_mt);
        CHECK(ml <= prev_ml);
        CHECK(lc <= prev_lc);
        CHECK(cz <= prev_cz);
        prev_mt = mt; prev_ml = ml; prev_lc = lc; prev_cz = cz;
    }
    CHECK(prev_mt == 0.0);
    CHECK(prev_cz == 0.0);
}

TEST_CASE("two-level closed form agrees with the generic CZ optimum") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> uw(0.1, 0.9), ue(0.0, 0.9);
    for (int rep = 0; rep < 10; ++rep) {
        const double w0 = uw(rng), eps = ue(rng);
        const auto s = DiscreteSpectrum::build({{0, w0}, {1, 1 - w0}});
        const BoundResult closed = cz_bound_2d(s, eps);
        double grid_best = 0.0;
        for (double p = 0.05; p <= 2.0; p += 0.0125) {
            grid_best = std::max(grid_best, cz_bound_fixed_p(s, eps, p).value);
        }
        if (closed.divergent) continue;  // divergent cases checked elsewhere
        CHECK(closed.value >= grid_best - 1e-6 * std::max(1.0, grid_best));
    }
}

TEST_CASE("asymmetric bound basics") {
    const auto& g = builtin_state("g");
    const BoundResult at1 = cz_asymmetric(g, 1.0, 0.5, 0.0, AsymVariant::P_EQUALS_2Q);
    CHECK(at1.value == 0.0);
    const BoundResult r = cz_asymmetric(g, 0.04, 0.5, -0.2, AsymVariant::P_EQUALS_2Q);
    CHECK(r.value > 0.0);
    REQUIRE(r.e_r_used.has_value());
    const double again = cz_asymmetric_at(g, 0.04, 0.5, -0.2,
                                          AsymVariant::P_EQUALS_2Q, *r.e_r_used);
    CHECK(r.value == doctest::Approx(again).epsilon(1e-10));
    CHECK(r.residual <= 1e-10);
    // mirrored variant with mirrored angle on a mirrored state
    std::vector<Level> rev;
    for (const Level& lv : g.levels()) rev.push_back({-lv.energy, lv.weight});
    const auto gr = DiscreteSpectrum::build(std::move(rev));
    const BoundResult m = cz_asymmetric(gr, 0.04, 0.5, 0.2, AsymVariant::Q_EQUALS_2P);
    CHECK(m.value == doctest::Approx(r.value).epsilon(1e-8));
}

TEST_CASE("asymmetric region gating") {
    const auto& g = builtin_state("g");
    // base exponent > 1/2 restricts the sign of theta per variant
    CHECK_THROWS_AS(cz_asymmetric(g, 0.04, 0.8, 0.3, AsymVariant::P_EQUALS_2Q), DomainError);
    CHECK_NOTHROW(cz_asymmetric(g, 0.04, 0.8, -0.3, AsymVariant::P_EQUALS_2Q));
    CHECK_THROWS_AS(cz_asymmetric(g, 0.04, 0.8, -0.3, AsymVariant::Q_EQUALS_2P), DomainError);
    CHECK_NOTHROW(cz_asymmetric(g, 0.04, 0.8, 0.3, AsymVariant::Q_EQUALS_2P));
}
