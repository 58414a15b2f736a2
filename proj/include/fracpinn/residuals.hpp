#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracpinn/mlp.hpp"
#include "fracpinn/operators.hpp"
#include "fracpinn/solver.hpp"
#include "fracpinn/spectral_core.hpp"

namespace fracpinn {

/// Order-0 initial-mismatch policy: 'A' includes psi_theta(.,0)-psi_0 in the
/// initial residual, 'B' starts the sum at order 1.
struct ResidualConfig {
    double eps = 0.1;
    int ell = 0;     // spatial regularity index, <= 2
    int k = 0;       // time regularity index, <= 1 trainable (2 diagnostic)
    char policy = 'A';
    int eval_nodes = 0;  // uniform FD grid per axis; 0 = match the quadrature grid

    void validate() const;
};

struct ErrorReport {
    double eg_interior = 0.0;
    double eg_initial = 0.0;
    double eg_boundary = 0.0;
    double eg_total = 0.0;  // sqrt of the sum of squares of the three parts
    std::optional<double> total_error;  // E[ell,k] when a reference is supplied
    std::vector<double> per_time_residual_norm;  // L2 norm of R_i at each time node
    std::vector<double> initial_per_order;       // diagnostic per-order norms in R_t
    double eps = 0.0;
    int ell = 0;
    int k = 0;
    char policy = 'A';
    long step = -1;
    std::string stencil_note;  // set when one-sided boundary stencils were used
};

struct HkReport {
    double hk_norm = 0.0;    // H^k([0,T]xOmega) norm of psi - J_eps psi_theta
    double total_error = 0.0;  // E[k,k]
    double ratio = 0.0;
    int k = 0;
};

struct InitialResidual {
    std::vector<SpectralField> per_order;  // orders 1..k, coefficient space
    SpectralField order0;                  // psi_theta(.,0) - psi_0, reported separately
};

/// Uniform midpoint evaluation grid for the local (finite-difference)
/// operators applied to residuals, separate from the quadrature grid.
struct EvalGrid {
    int nodes_per_axis = 0;
    double h = 0.0;
    std::vector<double> axis_nodes;
};

/// Binds a problem, quadrature grid and residual configuration; precomputes
/// every synthesis/projection/stencil matrix the functionals need.
class ResidualEvaluator {
  public:
    ResidualEvaluator(const PdeProblem& problem, const QuadratureGrid& grid,
                      const ResidualConfig& config);

    /// Mollified PDE residual at time node q, synthesized on the quad grid.
    GridField pde_residual(const ScalarFieldModel& model, int time_index) const;

    /// Per-order initial residual fields in coefficient space.
    InitialResidual initial_residual(const ScalarFieldModel& model, int k) const;

    /// Raw network trace at the boundary quadrature nodes at time node q.
    Eigen::VectorXd boundary_residual(const ScalarFieldModel& model, int time_index) const;

    /// The three generalization-error components and their square-sum root.
    /// When grad is non-null the model must be an MlpModel and the gradient
    /// of eg_total^2 is accumulated into it.
    ErrorReport generalization_error(const ScalarFieldModel& model,
                                     ParamGradient* grad = nullptr) const;

    /// E[ell,k;theta] against a reference solution on matching time nodes.
    double total_error(const ScalarFieldModel& model, const ReferenceSolution& ref) const;
    /// Same with explicit indices, independent of the bound configuration.
    double total_error(const ScalarFieldModel& model, const ReferenceSolution& ref, int ell,
                       int k) const;

    HkReport hk_domination_check(const ScalarFieldModel& model, const ReferenceSolution& ref,
                                 int k) const;

    const ResidualConfig& config() const { return config_; }
    const QuadratureGrid& grid() const { return *grid_; }
    const PdeProblem& problem() const { return problem_; }

  private:
    PdeProblem problem_;
    const QuadratureGrid* grid_ = nullptr;
    ResidualConfig config_;
    const SpectralBasis* basis_ = nullptr;

    Eigen::VectorXd mult_;       // mollifier multipliers m_eps(lambda_j)
    Eigen::VectorXd lam_alpha_;  // lambda_j^{alpha/2}
    Eigen::VectorXd lam_;        // lambda_j
    Eigen::MatrixXd proj_;       // J x Nq
    Eigen::MatrixXd synth_q_;    // Nq x J
    Eigen::MatrixXd adv_q_;      // Nq x J, u0 . grad synthesis on the quad grid
    Eigen::MatrixXd adv_galerkin_;  // J x J

    EvalGrid eval_;
    Eigen::MatrixXd synth_e_;  // Ne^d x J
    Eigen::MatrixXd adv_e_;    // Ne^d x J
    Eigen::MatrixXd d1_;       // Ne x Ne first-derivative stencil
    Eigen::MatrixXd d2_;       // Ne x Ne second-derivative stencil
    double eval_weight_ = 0.0;

    std::vector<EvalPoint> quad_points_at(double t) const;
    std::vector<EvalPoint> eval_points_at(double t) const;
    std::vector<EvalPoint> boundary_points_at(double t) const;

    // j-th time derivative of R_i on the eval grid from projected jets.
    Eigen::VectorXd residual_on_eval(int j, double t, const Eigen::VectorXd& c0,
                                     const Eigen::VectorXd& c1, const Eigen::VectorXd& c2) const;
    // Local operator branch: returns the squared weighted norm of L_ell r and,
    // if rbar is non-null, accumulates d(norm^2)/dr into it.
    double local_operator_norm_sq(const Eigen::VectorXd& r, int ell,
                                  Eigen::VectorXd* rbar) const;
    Eigen::VectorXd apply_axis_op(const Eigen::MatrixXd& op, const Eigen::VectorXd& f,
                                  int axis) const;

    Eigen::VectorXd reference_coeff_deriv(const ReferenceSolution& ref, int q, int order) const;
};

struct CutoffRow {
    double eps = 0.0;
    double mollifier_norm = 0.0;  // ||Lambda (J_eps psi - psi)||
    double cutoff_norm = 0.0;     // ||d_x ((chi_eps - 1) psi)||
};

/// Mollifier-vs-cutoff comparison for a 1D field; eps == 0 is the chi == 1
/// sentinel.
std::vector<CutoffRow> cutoff_comparison(const SpectralField& psi,
                                         const std::vector<double>& eps_list);

/// Smooth cutoff vanishing within distance eps of {0, pi}; chi == 1 for eps == 0.
double cutoff_chi(double x, double eps);
double cutoff_chi_dx(double x, double eps);

}  // namespace fracpinn
