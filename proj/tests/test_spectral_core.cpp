#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fracpinn/spectral_core.hpp"

using namespace fracpinn;

TEST_CASE("1D basis: eigenvalues j^2 in order") {
    SpectralBasis basis = build_basis({1, 1.0}, 6);
    REQUIRE(basis.size() == 6);
    for (int j = 0; j < 6; ++j) {
        CHECK(basis.modes[j].jx == j + 1);
        CHECK(basis.modes[j].jy == 0);
        CHECK(basis.modes[j].lambda == doctest::Approx((j + 1.0) * (j + 1.0)));
    }
}

TEST_CASE("2D basis: sorted by eigenvalue, smallest mode (1,1)") {
    SpectralBasis basis = build_basis({2, 1.0}, 10);
    REQUIRE(basis.size() == 10);
    CHECK(basis.modes[0].jx == 1);
    CHECK(basis.modes[0].jy == 1);
    CHECK(basis.modes[0].lambda == doctest::Approx(2.0));
    for (int m = 1; m < 10; ++m) CHECK(basis.modes[m].lambda >= basis.modes[m - 1].lambda);
    // (1,2) and (2,1) both have lambda 5 and must both appear
    CHECK(basis.modes[1].lambda == doctest::Approx(5.0));
    CHECK(basis.modes[2].lambda == doctest::Approx(5.0));
}

TEST_CASE("eigenfunctions are L2-normalized and vanish at the boundary") {
    SpectralBasis basis = build_basis({1, 1.0}, 4);
    QuadratureGrid grid = build_grid(basis, 16, 4);
    for (int m = 0; m < basis.size(); ++m) {
        double norm_sq = 0.0;
        for (int n = 0; n < grid.interior_count(); ++n) {
            const double w = basis.eigenfunction(m, grid.interior_nodes[n][0]);
            norm_sq += grid.interior_weights[n] * w * w;
        }
        CHECK(norm_sq == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(basis.eigenfunction(m, 0.0)) <= 1e-14);
        CHECK(std::abs(basis.eigenfunction(m, M_PI)) <= 1e-13);
    }
}

TEST_CASE("weights sum to the domain volume exactly") {
    for (int dim : {1, 2}) {
        SpectralBasis basis = build_basis({dim, 1.0}, 5);
        QuadratureGrid grid = build_grid(basis, 11, 3);
        CHECK(std::abs(grid.interior_weights.sum() - basis.domain.volume()) <= 1e-12);
    }
}

TEST_CASE("Gram matrix of the retained modes is the identity") {
    for (int dim : {1, 2}) {
        SpectralBasis basis = build_basis({dim, 1.0}, 8);
        QuadratureGrid grid = build_grid(basis, dim == 1 ? 17 : 7, 3);
        SpectralTransform tr(basis, grid);
        const Eigen::MatrixXd gram = tr.proj * tr.synth;
        const double dev =
            (gram - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff();
        CHECK(dev <= 1e-12);
    }
}

TEST_CASE("grid rejects too few nodes for the retained modes") {
    SpectralBasis basis = build_basis({1, 1.0}, 8);
    CHECK_THROWS(build_grid(basis, 16, 4));  // needs M >= 17
    CHECK_NOTHROW(build_grid(basis, 17, 4));
}

TEST_CASE("round trip grid -> spectral -> grid is the identity") {
    std::mt19937_64 rng(7);
    for (int dim : {1, 2}) {
        SpectralBasis basis = build_basis({dim, 2.0}, 6);
        QuadratureGrid grid = build_grid(basis, 13, 5);
        Eigen::VectorXd coeff(basis.size());
        for (int j = 0; j < basis.size(); ++j)
            coeff[j] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
        SpectralField f(basis, coeff);
        GridField g = to_grid(f, grid);
        SpectralField back = to_spectral(g, basis);
        CHECK((back.coeff - coeff).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("derivative synthesis matches central differences") {
    SpectralBasis basis = build_basis({2, 1.0}, 5);
    QuadratureGrid grid = build_grid(basis, 11, 2);
    SpectralTransform tr(basis, grid);
    const double h = 1e-6;
    const int n = 17;  // an interior node index
    const double x = grid.interior_nodes[n][0];
    const double y = grid.interior_nodes[n][1];
    for (int j = 0; j < basis.size(); ++j) {
        const double fd_x =
            (basis.eigenfunction(j, x + h, y) - basis.eigenfunction(j, x - h, y)) / (2 * h);
        const double fd_y =
            (basis.eigenfunction(j, x, y + h) - basis.eigenfunction(j, x, y - h)) / (2 * h);
        CHECK(tr.synth_dx(n, j) == doctest::Approx(fd_x).epsilon(1e-8));
        CHECK(tr.synth_dy(n, j) == doctest::Approx(fd_y).epsilon(1e-8));
    }
}

TEST_CASE("time rule: trapezoid weights on uniform nodes integrate linear exactly") {
    SpectralBasis basis = build_basis({1, 3.0}, 3);
    QuadratureGrid grid = build_grid(basis, 9, 6);
    REQUIRE(grid.time_nodes.size() == 7);
    CHECK(grid.time_nodes[0] == doctest::Approx(0.0));
    CHECK(grid.time_nodes[6] == doctest::Approx(3.0));
    double integral = 0.0;
    for (int q = 0; q < 7; ++q) integral += grid.time_weights[q] * grid.time_nodes[q];
    CHECK(integral == doctest::Approx(4.5).epsilon(1e-14));  // int_0^3 t dt
}

TEST_CASE("boundary rule: 1D endpoints with unit weights, 2D edges sum to perimeter") {
    SpectralBasis b1 = build_basis({1, 1.0}, 3);
    QuadratureGrid g1 = build_grid(b1, 9, 2);
    REQUIRE(g1.boundary_count() == 2);
    CHECK(g1.boundary_weights.sum() == doctest::Approx(2.0));

    SpectralBasis b2 = build_basis({2, 1.0}, 3);
    QuadratureGrid g2 = build_grid(b2, 9, 2);
    CHECK(g2.boundary_weights.sum() == doctest::Approx(4.0 * M_PI).epsilon(1e-13));
}

TEST_CASE("invalid domains rejected") {
    CHECK_THROWS(build_basis({3, 1.0}, 4));
    CHECK_THROWS(build_basis({1, -1.0}, 4));
    CHECK_THROWS(build_basis({1, 1.0}, 0));
}
