#include <catch2/catch_amalgamated.hpp>

#include "liq/asymptotics.hpp"
#include "support/series_oracle.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <random>

using Catch::Approx;
using liq::ReducedParams;

namespace {

bool rel_close(double got, double want, double tol) {
    if (want == 0.0) return std::abs(got) <= tol;
    return std::abs(got / want - 1.0) <= tol;
}

}  // namespace

TEST_CASE("leading coefficient", "[asymptotics]") {
    const auto s = liq::series_coefficients({2.0, 0.5}, 1);
    REQUIRE(s.order() == 1);
    CHECK(s.coeffs[0] == Approx(-1.490712).margin(5e-7));
    CHECK(s.coeffs[0] == Approx(-(2.0 / 3.0) * std::sqrt(5.0)).epsilon(1e-15));

    const auto tiny = liq::series_coefficients({1.0, -1.0 + 1e-12}, 1);
    CHECK(tiny.coeffs[0] < 0.0);
    CHECK(tiny.coeffs[0] > -1e-5);
}

TEST_CASE("series_coefficients rejects bad input", "[asymptotics]") {
    CHECK_THROWS_AS(liq::series_coefficients({1.0, -1.0}, 3), liq::ValidationError);
    CHECK_THROWS_AS(liq::series_coefficients({2.0, 0.5}, 0), liq::ValidationError);
}

TEST_CASE("k2..k4 for a=2, b=0.5 agree with coefficient matching", "[asymptotics][oracle]") {
    // Frozen from oracle::coefficients(2, 0.5, 4).
    const double k2 = 0.916666666666667;
    const double k3 = -0.10931887889999;
    const double k4 = -0.0461728395061728;
    const auto s = liq::series_coefficients({2.0, 0.5}, 4);
    CHECK(rel_close(s.coeffs[1], k2, 1e-10));
    CHECK(rel_close(s.coeffs[2], k3, 1e-10));
    CHECK(rel_close(s.coeffs[3], k4, 1e-10));
    CHECK(s.coeffs[1] == Approx(11.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("recursion equals undetermined coefficients for random (a, b)", "[asymptotics][oracle][property]") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> ua(-4.0, 4.0);
    std::uniform_real_distribution<double> ub(0.05, 6.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = ua(rng);
        const double b = ub(rng) - a;  // a + b in (0.05, 6)
        const auto s = liq::series_coefficients({a, b}, 8);
        const auto o = oracle::coefficients(a, b, 8);
        for (std::size_t i = 0; i < 8; ++i) {
            INFO("a=" << a << " b=" << b << " k_" << i + 1);
            CHECK(rel_close(s.coeffs[i], o[i], 1e-10));
        }
    }
}

TEST_CASE("series_eval basics", "[asymptotics]") {
    const auto s = liq::series_coefficients({2.0, 0.5}, 6);
    const auto v0 = liq::series_eval(s, 0.0);
    CHECK(v0.u == 0.0);
    CHECK(v0.du == 1.0);
    CHECK_THROWS_AS(liq::series_eval(s, -1e-3), liq::ValidationError);

    const auto s1 = liq::series_coefficients({2.0, 0.5}, 1);
    const auto v = liq::series_eval(s1, 1e-4);
    CHECK(v.u == Approx(1e-4 - 1.490712e-6).epsilon(1e-7));
    CHECK(v.du == Approx(1.0 - 1.5 * 1.4907119849998598e-2).epsilon(1e-12));
    CHECK(liq::series_shortfall(s1, 1e-4) == Approx(1.4907119849998598e-2).epsilon(1e-14));
}

TEST_CASE("double coefficients agree with extended precision", "[asymptotics]") {
    using Big = boost::multiprecision::cpp_bin_float_50;
    const auto s = liq::series_coefficients({2.0, 0.5}, 8);
    const auto k = liq::recursion_coefficients<Big>(Big(2), Big(0.5), 8);
    for (std::size_t i = 0; i < 8; ++i) CHECK(s.coeffs[i] == Approx(k[i].convert_to<double>()).epsilon(1e-14));
}

TEST_CASE("scaled residual of h_n stays bounded near zero", "[asymptotics][oracle]") {
    using Big = boost::multiprecision::cpp_bin_float_50;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ua(-3.0, 3.0);
    std::uniform_real_distribution<double> ub(0.1, 5.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double a = ua(rng);
        const double b = ub(rng) - a;
        for (std::size_t n = 1; n <= 6; ++n) {
            const auto s = liq::series_coefficients({a, b}, n);
            // Leading residual coefficient, at t^{n+2}, from the oracle.
            const double lead = std::abs(oracle::residual(s.coeffs, a, b, n + 2)[n + 2]);
            const auto k = liq::recursion_coefficients<Big>(Big(a), Big(b), n);
            double worst = 0.0;
            for (double e = -8.0; e <= -4.0 + 1e-9; e += 0.25) {
                const Big x = boost::multiprecision::pow(Big(10), Big(e));
                const Big r = liq::series_residual<Big>(k, Big(a), Big(b), x);
                const Big scaled = abs(r) / boost::multiprecision::pow(x, Big(n + 2) / 2);
                worst = std::max(worst, scaled.convert_to<double>());
            }
            INFO("a=" << a << " b=" << b << " n=" << n << " lead=" << lead);
            CHECK(std::isfinite(worst));
            CHECK(worst <= 2.0 * lead + 1e-9);
        }
    }
}

TEST_CASE("special solutions solve the ODE exactly", "[asymptotics]") {
    auto sweep = [](const ReducedParams& red) {
        const auto sol = liq::special_solution(red);
        REQUIRE(sol.has_value());
        CHECK(sol->series.order() == 2);
        double worst = 0.0;
        for (double e = -6.0; e <= 0.0 + 1e-12; e += 0.05) {
            const double x = std::pow(10.0, e);
            worst = std::max(worst, std::abs(liq::series_residual(sol->series, x)));
        }
        return worst;
    };
    // K1 = 0: b = (3 - 6a)/4 with a + b > 0
    const double a1 = -1.0;
    CHECK(sweep({a1, (3.0 - 6.0 * a1) / 4.0}) < 1e-10);
    // K2 = 0: b = (9 - 6a)/2
    const double a2 = 1.0;
    CHECK(sweep({a2, (9.0 - 6.0 * a2) / 2.0}) < 1e-10);

    CHECK_FALSE(liq::special_solution({2.0, 0.5}).has_value());
}

TEST_CASE("singularity constants", "[asymptotics]") {
    const auto c = liq::singularity_constants({2.0, 0.5});
    CHECK(c.K1 == Approx(11.0));
    CHECK(c.K2 == Approx(4.0));
    CHECK(c.alpha == Approx(2.0 - 1.0 / 3.0));
    CHECK(c.beta == Approx(std::sqrt(20.0)));
    CHECK(c.beta > 0.0);
}

TEST_CASE("optimal truncation", "[asymptotics]") {
    const auto s = liq::series_coefficients({2.0, 0.5}, 8);
    CHECK(liq::optimal_truncation(s, 1e-10) == 8);
    // Term magnitudes |k_m| at x = 1: the smallest is k_7 (scan of the coefficients above).
    std::size_t scan = 1;
    for (std::size_t m = 2; m <= 8; ++m)
        if (std::abs(s.coeffs[m - 1]) <= std::abs(s.coeffs[scan - 1])) scan = m;
    CHECK(scan == 7);
    CHECK(liq::optimal_truncation(s, 1.0) == scan);
    CHECK(liq::optimal_truncation(s, 1.0) < s.order());
    const auto s1 = liq::series_coefficients({2.0, 0.5}, 1);
    CHECK(liq::optimal_truncation(s1, 0.5) == 1);
    CHECK(liq::optimal_truncation(s1, 1e-9) == 1);
    CHECK_THROWS_AS(liq::optimal_truncation(s, 0.0), liq::ValidationError);
}
