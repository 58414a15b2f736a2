#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracpinn/special.hpp"
#include "oracles.hpp"

using namespace fracpinn;

TEST_CASE("exponential integral matches high-precision values") {
    CHECK(exp_integral_e1(0.1) == doctest::Approx(oracle::e1_01).epsilon(1e-13));
    CHECK(exp_integral_e1(0.5) == doctest::Approx(oracle::e1_05).epsilon(1e-13));
    CHECK(exp_integral_e1(1.0) == doctest::Approx(oracle::e1_1).epsilon(1e-13));
    CHECK(exp_integral_e1(2.0) == doctest::Approx(oracle::e1_2).epsilon(1e-13));
    CHECK(exp_integral_e1(10.0) == doctest::Approx(oracle::e1_10).epsilon(1e-13));
    CHECK(exp_integral_e1(50.0) == doctest::Approx(oracle::e1_50).epsilon(1e-12));
}

TEST_CASE("exponential integral is continuous at the series/fraction crossover") {
    const double below = exp_integral_e1(std::nextafter(1.0, 0.0));
    const double above = exp_integral_e1(std::nextafter(1.0, 2.0));
    CHECK(std::abs(below - above) <= 1e-12);
}

TEST_CASE("exponential integral underflow guard") {
    CHECK(exp_integral_e1(701.0) == 0.0);
    CHECK(exp_integral_e1(1e9) == 0.0);
}

TEST_CASE("exponential integral rejects nonpositive arguments") {
    CHECK_THROWS(exp_integral_e1(0.0));
    CHECK_THROWS(exp_integral_e1(-1.0));
}

TEST_CASE("c_s by quadrature matches high-precision values") {
    CHECK(c_s_constant(0.25) == doctest::Approx(oracle::c_025).epsilon(1e-11));
    CHECK(c_s_constant(0.5) == doctest::Approx(oracle::c_05).epsilon(1e-11));
    CHECK(c_s_constant(1.0) == doctest::Approx(oracle::c_1).epsilon(1e-11));
    CHECK(c_s_constant(1.5) == doctest::Approx(oracle::c_15).epsilon(1e-11));
    CHECK(c_s_constant(1.75) == doctest::Approx(oracle::c_175).epsilon(1e-11));
}

TEST_CASE("c_s quadrature agrees with the gamma-function closed form") {
    for (double s : {0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 1.9})
        CHECK(std::abs(c_s_constant(s) - c_s_closed_form(s)) <= 1e-10);
}

TEST_CASE("c_s domain ends rejected") {
    CHECK_THROWS(c_s_constant(0.0));
    CHECK_THROWS(c_s_constant(2.0));
}
