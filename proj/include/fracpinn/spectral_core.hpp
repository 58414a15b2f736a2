#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace fracpinn {

/// Model domain: the interval (0,pi) for dim==1, the square (0,pi)^2 for
/// dim==2, with a final time T for the time slab [0,T].
struct DomainSpec {
    int dim = 1;
    double final_time = 1.0;

    void validate() const;
    double volume() const;
};

/// One Dirichlet eigenmode. For dim==1 the index is jx (jy==0) and
/// lambda = jx^2; for dim==2 the multi-index is (jx,jy) and
/// lambda = jx^2 + jy^2. Eigenfunctions are L2-normalized products of
/// sqrt(2/pi)*sin(j x) factors.
struct Mode {
    int jx = 0;
    int jy = 0;
    double lambda = 0.0;
};

/// Truncated Dirichlet eigenbasis, modes sorted by (lambda, jx, jy).
struct SpectralBasis {
    DomainSpec domain;
    std::vector<Mode> modes;

    int size() const { return static_cast<int>(modes.size()); }

    /// Evaluate eigenfunction of mode m at (x,y); y ignored for dim==1.
    double eigenfunction(int m, double x, double y = 0.0) const;
    /// Partial derivatives of the eigenfunction.
    double eigenfunction_dx(int m, double x, double y = 0.0) const;
    double eigenfunction_dy(int m, double x, double y = 0.0) const;
};

SpectralBasis build_basis(const DomainSpec& domain, int J);

/// Tensor quadrature over the domain plus boundary and time rules.
///
/// The spatial rule is composite Gauss-Legendre with M panels of one node
/// each per axis (the midpoint rule x_m = (m-1/2)pi/M, weight pi/M). On
/// this rule the discrete sine orthogonality is exact for all mode pairs
/// with jx+kx < 2M, so the Gram matrix of the retained eigenfunctions is
/// exactly the identity whenever M >= 2J+1, and the weights sum exactly
/// to |Omega|.
struct QuadratureGrid {
    DomainSpec domain;
    int nodes_per_axis = 0;   // M
    int time_intervals = 0;   // Q

    std::vector<double> axis_nodes;  // midpoint nodes on (0,pi)
    double axis_weight = 0.0;        // pi/M

    // Interior tensor nodes, flattened row-major ((ix,iy) -> ix*M+iy in 2D).
    std::vector<std::array<double, 2>> interior_nodes;
    Eigen::VectorXd interior_weights;

    std::vector<std::array<double, 2>> boundary_nodes;
    Eigen::VectorXd boundary_weights;

    // Time nodes 0 = t_0 < ... < t_Q = T with trapezoid weights.
    Eigen::VectorXd time_nodes;
    Eigen::VectorXd time_weights;

    int interior_count() const { return static_cast<int>(interior_nodes.size()); }
    int boundary_count() const { return static_cast<int>(boundary_nodes.size()); }
};

QuadratureGrid build_grid(const SpectralBasis& basis, int M, int Q);

/// Coefficient vector of a function in the eigenbasis.
struct SpectralField {
    const SpectralBasis* basis = nullptr;
    Eigen::VectorXd coeff;

    SpectralField() = default;
    SpectralField(const SpectralBasis& b, Eigen::VectorXd c);
    explicit SpectralField(const SpectralBasis& b);

    int size() const { return static_cast<int>(coeff.size()); }
};

/// Point values over the interior tensor nodes of a grid.
struct GridField {
    const QuadratureGrid* grid = nullptr;
    Eigen::VectorXd values;

    GridField() = default;
    GridField(const QuadratureGrid& g, Eigen::VectorXd v);
    explicit GridField(const QuadratureGrid& g);
};

/// Dense synthesis/projection matrices binding a basis to a grid.
/// Built once and reused inside solvers and loss evaluators.
struct SpectralTransform {
    const SpectralBasis* basis = nullptr;
    const QuadratureGrid* grid = nullptr;
    Eigen::MatrixXd synth;     // N x J, w_j(x_n)
    Eigen::MatrixXd synth_dx;  // N x J, d/dx w_j(x_n)
    Eigen::MatrixXd synth_dy;  // N x J (zero for dim==1)
    Eigen::MatrixXd proj;      // J x N, synth^T * diag(weights)

    SpectralTransform(const SpectralBasis& b, const QuadratureGrid& g);

    Eigen::VectorXd to_spectral(const Eigen::VectorXd& values) const;
    Eigen::VectorXd to_grid(const Eigen::VectorXd& coeff) const;
};

SpectralField to_spectral(const GridField& gf, const SpectralBasis& basis);
GridField to_grid(const SpectralField& sf, const QuadratureGrid& grid);

}  // namespace fracpinn
