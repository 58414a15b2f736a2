#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fracpinn/operators.hpp"
#include "oracles.hpp"

using namespace fracpinn;

namespace {

Eigen::VectorXd random_coeff(std::mt19937_64& rng, int n) {
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i)
        c[i] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    return c;
}

}  // namespace

TEST_CASE("fractional multiplier on a single mode") {
    SpectralBasis basis = build_basis({1, 1.0}, 4);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
    c[2] = 3.0;  // mode j=3, lambda=9
    SpectralField f(basis, c);
    CHECK(frac_laplacian(f, 1.0).coeff[2] == doctest::Approx(9.0).epsilon(1e-15));   // 9^{1/2}*3
    CHECK(frac_laplacian(f, 2.0).coeff[2] == doctest::Approx(27.0).epsilon(1e-15));  // 9*3
    CHECK(frac_laplacian(f, 0.0).coeff[2] == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("Sobolev norm on explicit coefficients") {
    SpectralBasis basis = build_basis({1, 1.0}, 3);
    Eigen::VectorXd c(3);
    c << 1.0, 0.5, 0.0;  // lambdas 1, 4
    SpectralField f(basis, c);
    CHECK(sobolev_norm(f, 0.0) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
    CHECK(sobolev_norm(f, 1.0) == doctest::Approx(std::sqrt(1.0 + 4.0 * 0.25)).epsilon(1e-15));
}

TEST_CASE("heat semigroup decays, composes, and rejects negative time") {
    std::mt19937_64 rng(11);
    SpectralBasis basis = build_basis({1, 1.0}, 8);
    SpectralField f(basis, random_coeff(rng, 8));
    SpectralField once = heat_semigroup(heat_semigroup(f, 0.2), 0.3);
    SpectralField direct = heat_semigroup(f, 0.5);
    CHECK((once.coeff - direct.coeff).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(heat_semigroup(f, 0.0).coeff.isApprox(f.coeff));
    CHECK_THROWS(heat_semigroup(f, -0.1));
}

TEST_CASE("heat kernel: symmetry and the reproducing (semigroup) identity") {
    SpectralBasis basis = build_basis({1, 1.0}, 8);
    QuadratureGrid grid = build_grid(basis, 17, 2);
    CHECK(heat_kernel_1d(0.7, 1.9, 0.3, basis) ==
          doctest::Approx(heat_kernel_1d(1.9, 0.7, 0.3, basis)).epsilon(1e-13));
    // int H(x,z,t) H(z,y,s) dz = H(x,y,t+s); the midpoint rule integrates the
    // truncated-kernel product exactly.
    const double x = 0.8, y = 2.1;
    double conv = 0.0;
    for (int n = 0; n < grid.interior_count(); ++n)
        conv += grid.interior_weights[n] * heat_kernel_1d(x, grid.interior_nodes[n][0], 0.2, basis) *
                heat_kernel_1d(grid.interior_nodes[n][0], y, 0.3, basis);
    CHECK(conv == doctest::Approx(heat_kernel_1d(x, y, 0.5, basis)).epsilon(1e-12));
    CHECK_THROWS(heat_kernel_1d(x, y, 0.0, basis));
}

TEST_CASE("mollifier multiplier matches high-precision values") {
    CHECK(mollifier_multiplier(0.1, 1.0) == doctest::Approx(oracle::m_01_1).epsilon(1e-13));
    CHECK(mollifier_multiplier(0.1, 4.0) == doctest::Approx(oracle::m_01_4).epsilon(1e-13));
    CHECK(mollifier_multiplier(0.01, 1.0) == doctest::Approx(oracle::m_001_1).epsilon(1e-13));
    CHECK(mollifier_multiplier(1e-6, 1.0) == doctest::Approx(oracle::m_1em6_1).epsilon(1e-13));
}

TEST_CASE("mollifier multiplier: range, monotonicity, limits") {
    // On the eigenvalue range lambda >= 1 the multiplier sits in (0,1] and
    // decreases; once eps*lambda passes ~700 it underflows to an exact 0.
    for (double eps : {0.5, 0.1, 0.01, 1e-4}) {
        double prev = 1.0;
        for (int i = 0; i <= 80; ++i) {
            const double lam = std::pow(10.0, 8.0 * i / 80.0);
            const double m = mollifier_multiplier(eps, lam);
            if (eps * lam <= 700.0)
                CHECK(m > 0.0);
            else
                CHECK(m == 0.0);
            CHECK(m <= 1.0);
            CHECK(m <= prev + 1e-15);  // decreasing in lambda
            prev = m;
        }
    }
    // Below lambda = 1 the multiplier exceeds 1 and approaches 2 at the origin.
    CHECK(mollifier_multiplier(0.1, 1e-2) > 1.0);
    CHECK(mollifier_multiplier(0.1, 1e-8) < 2.0);
    CHECK(mollifier_multiplier(0.1, 1e-8) > 1.9);
    // approach to 1 at fixed lambda is slow (logarithmic): monotone but far
    // from 1 even at eps = 1e-6
    CHECK(mollifier_multiplier(1e-6, 1.0) > mollifier_multiplier(1e-2, 1.0));
    CHECK(mollifier_multiplier(1e-6, 1.0) < 0.999);
    CHECK_THROWS(mollifier_multiplier(0.0, 1.0));
    CHECK_THROWS(mollifier_multiplier(1.0, 1.0));
    CHECK_THROWS(mollifier_multiplier(0.1, 0.0));
}

TEST_CASE("apply_mollifier uses the per-mode multipliers") {
    std::mt19937_64 rng(3);
    SpectralBasis basis = build_basis({2, 1.0}, 6);
    SpectralField f(basis, random_coeff(rng, 6));
    SpectralField g = apply_mollifier(f, 0.1);
    for (int j = 0; j < 6; ++j)
        CHECK(g.coeff[j] ==
              doctest::Approx(f.coeff[j] * mollifier_multiplier(0.1, basis.modes[j].lambda)));
}

TEST_CASE("diagonal operators commute to rounding") {
    std::mt19937_64 rng(5);
    SpectralBasis basis = build_basis({1, 1.0}, 16);
    SpectralField f(basis, random_coeff(rng, 16));
    for (double s : {0.5, 1.0, 1.5}) {
        for (double eps : {0.1, 0.01}) {
            Eigen::VectorXd ab = frac_laplacian(apply_mollifier(f, eps), s).coeff;
            Eigen::VectorXd ba = apply_mollifier(frac_laplacian(f, s), eps).coeff;
            CHECK((ab - ba).cwiseAbs().maxCoeff() <= 1e-15 * ab.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("integral representation matches the spectral multiplier") {
    std::mt19937_64 rng(9);
    SpectralBasis basis = build_basis({1, 1.0}, 12);
    SpectralField f(basis, random_coeff(rng, 12));
    for (double s : {0.25, 0.5, 1.0, 1.5, 1.75}) {
        Eigen::VectorXd spectral = frac_laplacian(f, s).coeff;
        Eigen::VectorXd integral = frac_laplacian_integral(f, s).coeff;
        for (int j = 0; j < 12; ++j)
            CHECK(std::abs(integral[j] - spectral[j]) <= 1e-8 * std::abs(spectral[j]));
    }
    CHECK_THROWS(frac_laplacian_integral(f, 0.0));
    CHECK_THROWS(frac_laplacian_integral(f, 2.0));
}

TEST_CASE("kappa matches the independently summed series") {
    SpectralBasis basis = build_basis({1, 1.0}, 4);
    CHECK(kappa(0.1, basis, 1000000).value ==
          doctest::Approx(oracle::kappa1d_01).epsilon(1e-6));
    CHECK(kappa(0.01, basis, 1000000).value ==
          doctest::Approx(oracle::kappa1d_001).epsilon(1e-6));
    CHECK(kappa(1e-6, basis, 1000000).value ==
          doctest::Approx(oracle::kappa1d_1em6).epsilon(1e-6));
}

TEST_CASE("kappa: strictly decreasing sweep with halving, small tail bound") {
    SpectralBasis basis = build_basis({1, 1.0}, 4);
    double prev = 1e300;
    double first = 0.0, last = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        KappaResult kr = kappa(eps, basis, 1000000);
        CHECK(kr.value < prev);
        CHECK(kr.tail_bound <= 1.1e-6);
        prev = kr.value;
        if (first == 0.0) first = kr.value;
        last = kr.value;
    }
    CHECK(last < first / 2.0);
}

TEST_CASE("kappa in 2D is finite and decreasing") {
    SpectralBasis basis = build_basis({2, 1.0}, 4);
    KappaResult a = kappa(0.1, basis, 100000);
    KappaResult b = kappa(0.01, basis, 100000);
    CHECK(std::isfinite(a.value));
    CHECK(b.value < a.value);
}

TEST_CASE("mollifier convergence bound holds on random fields") {
    std::mt19937_64 rng(21);
    SpectralBasis basis = build_basis({1, 1.0}, 8);
    for (int trial = 0; trial < 25; ++trial) {
        SpectralField f(basis, random_coeff(rng, 8));
        for (double s : {0.0, 0.5, 1.0}) {
            for (double eps : {0.1, 0.01}) {
                MollifierBoundReport rep = mollifier_convergence_bound_check(f, eps, s, 100000);
                CHECK(rep.holds);
                CHECK(rep.lhs <= rep.rhs * (1.0 + 1e-12));
            }
        }
    }
}
