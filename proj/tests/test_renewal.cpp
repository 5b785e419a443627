#include <doctest.h>

#include <cmath>

#include "reset_ruin/compensated_sum.hpp"
#include "reset_ruin/oracle.hpp"
#include "reset_ruin/renewal.hpp"

using namespace reset_ruin;

TEST_SUITE("renewal") {

TEST_CASE("finite-time laws on small domains")
{
    const auto one = finite_time_spectral(WalkConfig<double>(2, 1, 0.6, 0.0), 4);
    CHECK(one.u[0] == doctest::Approx(0.4));
    CHECK(one.v[0] == doctest::Approx(0.6));
    for (int k = 1; k < 4; ++k) {
        CHECK(one.u[k] == 0.0);
        CHECK(one.v[k] == 0.0);
    }

    const auto three = finite_time_spectral(WalkConfig<double>(3, 1, 0.5, 0.0), 3);
    const double u3[] = {0.5, 0.0, 0.125};
    const double v3[] = {0.0, 0.25, 0.0};
    for (int k = 0; k < 3; ++k) {
        CHECK(three.u[k] == doctest::Approx(u3[k]).epsilon(1e-14));
        CHECK(three.v[k] == doctest::Approx(v3[k]).epsilon(1e-14));
    }

    const auto five = finite_time_spectral(WalkConfig<double>(5, 2, 0.6, 0.0), 8);
    const double u5[] = {0, 0.16, 0, 0.0768, 0, 0.04608, 0, 0.02875392};
    const double v5[] = {0, 0, 0.216, 0, 0.15552, 0, 0.0995328, 0};
    for (int k = 0; k < 8; ++k) {
        CHECK(five.u[k] == doctest::Approx(u5[k]).epsilon(1e-14));
        CHECK(five.v[k] == doctest::Approx(v5[k]).epsilon(1e-14));
        CHECK(five.s[k] == five.u[k] + five.v[k]);
    }
    CHECK_THROWS_AS(finite_time_spectral(WalkConfig<double>(5, 2, 0.6, 0.0), 0), DomainError);
}

TEST_CASE("finite-time laws match probability propagation")
{
    double worst = 0.0;
    for (int a = 2; a <= 12; ++a)
        for (int z = 1; z < a; ++z)
            for (double p : {0.1, 0.35, 0.5, 0.8}) {
                const auto spectral = finite_time_spectral(WalkConfig<double>(a, z, p, 0.0), 60);
                const auto dp = finite_time_dp(a, z, p, 60);
                for (std::size_t k = 0; k < 60; ++k)
                    worst = std::max({worst, std::abs(spectral.u[k] - dp.u[k]),
                                      std::abs(spectral.v[k] - dp.v[k])});
            }
    CHECK(worst <= 1e-12);
}

TEST_CASE("parity and minimum distance")
{
    for (int a : {4, 7, 10})
        for (int z = 1; z < a; ++z) {
            const auto d = finite_time_spectral(WalkConfig<double>(a, z, 0.45, 0.0), 40);
            for (int k = 1; k <= 40; ++k) {
                const auto i = static_cast<std::size_t>(k - 1);
                CHECK(d.u[i] >= 0.0);
                CHECK(d.v[i] >= 0.0);
                if (k < z || (k - z) % 2 != 0)
                    CHECK(d.u[i] == 0.0);
                if (k < a - z || (k - (a - z)) % 2 != 0)
                    CHECK(d.v[i] == 0.0);
            }
        }
}

TEST_CASE("normalisation within the certified horizon")
{
    for (int a = 2; a <= 12; ++a)
        for (int z = 1; z < a; ++z)
            for (double p : {0.2, 0.5, 0.75}) {
                const WalkConfig<double> c(a, z, p, 0.0);
                const int horizon = truncation_horizon(c);
                const auto d = finite_time_spectral(c, horizon);
                CompensatedSum<double> total;
                for (double x : d.s)
                    total += x;
                CHECK(total.value() >= 1.0 - std::ldexp(1.0, -40));
                CHECK(total.value() <= 1.0 + 1e-12);
            }
}

TEST_CASE("generating functions")
{
    const auto g = generating_functions(WalkConfig<double>(2, 1, 0.6, 0.0));
    CHECK(g.unscaled_U() == doctest::Approx(0.4));
    CHECK(g.unscaled_S() == doctest::Approx(1.0));
    CHECK(std::abs(generating_functions(WalkConfig<double>(5, 2, 0.6, 0.3)).ruin() - 0.4829) < 5e-5);

    // The unscaled sums are the discounted first-passage expectations.
    for (double gamma : {0.0, 0.3, 0.7}) {
        const auto gf = generating_functions(WalkConfig<double>(7, 3, 0.55, gamma));
        const auto dp = discounted_dp(7, 3, 0.55, 1.0 - gamma);
        CHECK(gf.unscaled_U() == doctest::Approx(dp.U).epsilon(1e-10));
        CHECK(gf.unscaled_S() == doctest::Approx(dp.S).epsilon(1e-10));
    }
}

TEST_CASE("discounting identity at gamma = 0")
{
    for (int a = 2; a <= 15; ++a)
        for (int z = 1; z < a; ++z)
            for (double p : {0.3, 0.5, 0.6})
                CHECK(ruin_probability_renewal(WalkConfig<double>(a, z, p, 0.0)) ==
                      doctest::Approx(classical_ruin(a, z, p)).epsilon(1e-10));
}

TEST_CASE("renewal route")
{
    CHECK(std::abs(ruin_probability_renewal(WalkConfig<double>(5, 1, 0.5, 0.9)) - 0.9999) < 5e-5);
    CHECK(std::abs(ruin_probability_renewal(WalkConfig<double>(5, 4, 0.6, 0.6)) - 0.0029) < 5e-5);
    for (double p : {0.2, 0.5, 0.9})
        for (double gamma : {0.0, 0.4, 0.95})
            CHECK(ruin_probability_renewal(WalkConfig<double>(2, 1, p, gamma)) ==
                  doctest::Approx(1.0 - p).epsilon(1e-14));

    double worst = 0.0;
    for (int a = 2; a <= 30; ++a)
        for (int z = 1; z < a; ++z)
            for (double p : {0.2, 0.4, 0.5, 0.7})
                for (double gamma : {0.0, 0.3, 0.6, 0.9}) {
                    const WalkConfig<double> c(a, z, p, gamma);
                    worst = std::max(worst, std::abs(ruin_probability_renewal(c) -
                                                     ruin_probability_spectral(c)));
                }
    CHECK(worst <= 1e-12);
}

TEST_CASE("agreement with discounted propagation")
{
    for (int a : {3, 6, 11, 20})
        for (int z = 1; z < a; ++z)
            for (double p : {0.3, 0.5, 0.65})
                for (double gamma : {0.0, 0.2, 0.6, 0.9}) {
                    const auto dp = discounted_dp(a, z, p, 1.0 - gamma);
                    CHECK(std::abs(ruin_probability_renewal(WalkConfig<double>(a, z, p, gamma)) - dp.ruin()) <=
                          1e-10);
                }
}

}
