#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracpinn/spectral_core.hpp"

namespace fracpinn {

/// Closed-form scalar time modulation g(t) = constant + amplitude*cos(frequency*t + phase).
/// All time derivatives are analytic, which the initial-residual recursion needs.
struct TimeTag {
    double constant = 1.0;
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;

    double eval(double t) const;
    double derivative(int order, double t) const;
};

/// Divergence-free velocity on the square: u = g(t) * (-d_y phi, d_x phi)
/// with phi a finite sine series, so u.n = 0 on the boundary by construction.
/// An empty stream series means u == 0 (the only admissible case in 1D).
struct StreamTerm {
    int jx = 1;
    int jy = 1;
    double coeff = 0.0;
};

struct VelocitySpec {
    std::vector<StreamTerm> stream;
    TimeTag modulation;

    bool is_zero() const { return stream.empty(); }
    /// Velocity components at a point (2D), excluding the time modulation.
    void base_velocity(double x, double y, double& ux, double& uy) const;
};

/// Forcing as a finite eigenfunction series with per-mode time tags.
struct ForcingTerm {
    int mode = 0;  // index into the basis
    TimeTag tag;
};

struct ForcingSpec {
    std::vector<ForcingTerm> terms;

    Eigen::VectorXd coeff_at(const SpectralBasis& basis, double t) const;
    Eigen::VectorXd coeff_derivative_at(const SpectralBasis& basis, int order, double t) const;
};

struct PdeProblem {
    const SpectralBasis* basis = nullptr;
    double alpha = 1.0;  // diffusion order, in [0,2]
    Eigen::VectorXd initial_coeff;
    VelocitySpec velocity;
    ForcingSpec forcing;

    void validate() const;
};

/// Galerkin advection operator assembled pseudo-spectrally:
/// synthesize, multiply by u on the grid, project back.
struct AdvectionOperator {
    const SpectralBasis* basis = nullptr;
    const QuadratureGrid* grid = nullptr;
    const VelocitySpec* velocity = nullptr;
    Eigen::MatrixXd matrix;  // time-independent part A0; apply() scales by g(t)

    AdvectionOperator(const SpectralBasis& b, const QuadratureGrid& g, const VelocitySpec& u);

    Eigen::VectorXd apply(const Eigen::VectorXd& coeff, double t) const;
};

SpectralField advection_apply(const VelocitySpec& u, const SpectralField& c,
                              const QuadratureGrid& grid, double t);

struct ReferenceSolution {
    PdeProblem problem;
    const QuadratureGrid* grid = nullptr;
    Eigen::VectorXd times;          // the grid's time nodes
    Eigen::MatrixXd coeffs;         // (Q+1) x J, row q = coefficients at t_q
    Eigen::MatrixXd advection_matrix;  // Galerkin matrix A0 (time modulation separate)
    Eigen::VectorXd diffusion;         // lambda_j^{alpha/2}
    bool diffusion_included = true;
    int steps_taken = 0;
    std::string scheme;
    double max_coeff = 0.0;

    Eigen::VectorXd coeff_at(int q) const { return coeffs.row(q).transpose(); }
    /// d/dt of the coefficients at node q, from the Galerkin right-hand side.
    Eigen::VectorXd coeff_derivative_at(int q) const;
};

struct SolveOptions {
    bool include_diffusion = true;  // test hook for the pure-advection energy check
};

/// Integrating-factor classical four-stage explicit integration of the
/// Galerkin system dc/dt = -diag(lambda^{alpha/2}) c - A(t) c + f(t);
/// the diagonal diffusion is applied exactly through the integrating factor.
ReferenceSolution solve_reference(const PdeProblem& problem, const QuadratureGrid& grid,
                                  int steps, const SolveOptions& options = {});

/// [d_t psi(0), d_t^2 psi(0), ..., d_t^k psi(0)] in coefficient space,
/// from recursive application of d_t psi = f - u.grad psi - Lambda^alpha psi.
std::vector<Eigen::VectorXd> initial_time_derivatives(const PdeProblem& problem,
                                                      const QuadratureGrid& grid, int k);

}  // namespace fracpinn
