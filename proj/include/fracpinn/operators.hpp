#pragma once

#include "fracpinn/spectral_core.hpp"

namespace fracpinn {

/// Fractional Dirichlet Laplacian: c_j -> lambda_j^{s/2} c_j.
SpectralField frac_laplacian(const SpectralField& f, double s);

/// (sum_j lambda_j^s c_j^2)^{1/2}.
double sobolev_norm(const SpectralField& f, double s);

/// Heat semigroup: c_j -> exp(-t lambda_j) c_j, t >= 0.
SpectralField heat_semigroup(const SpectralField& f, double t);

/// Truncated Dirichlet heat kernel sum over the basis modes.
double heat_kernel(double x, double y, double xi, double eta, double t,
                   const SpectralBasis& basis);
double heat_kernel_1d(double x, double y, double t, const SpectralBasis& basis);

/// Spectral multiplier of the heat-semigroup mollifier,
/// m_eps(lambda) = (E1(eps*lambda) - E1(lambda/eps)) / ln(1/eps).
double mollifier_multiplier(double eps, double lambda);

/// Cached mollifier multipliers for one basis.
struct MollifierSpec {
    double eps = 0.0;
    Eigen::VectorXd multipliers;

    MollifierSpec(const SpectralBasis& basis, double eps);
};

/// c_j -> m_eps(lambda_j) c_j.
SpectralField apply_mollifier(const SpectralField& f, double eps);

/// Modewise t-quadrature of the singular-integral representation of
/// Lambda^s, s in (0,2). Matches frac_laplacian to ~1e-8 relative per mode.
SpectralField frac_laplacian_integral(const SpectralField& f, double s);

struct KappaResult {
    double value = 0.0;       // kappa(eps) over the first tail_terms analytic modes
    double tail_bound = 0.0;  // integral-test bound on the 4th power of the remainder
};

/// Convergence-rate constant kappa(eps)^4 = sum_j lambda_j^{-d} (m_eps(lambda_j)-1)^4,
/// summed over tail_terms modes of the analytic eigenvalue sequence of the
/// basis dimension.
KappaResult kappa(double eps, const SpectralBasis& basis, long tail_terms);

struct MollifierBoundReport {
    double lhs = 0.0;  // ||Lambda^s (J_eps f - f)||
    double rhs = 0.0;  // kappa(eps) ||f||^{1/2} ||Lambda^{2s+d} f||^{1/2}
    bool holds = false;
};

/// Quantitative mollifier convergence inequality check.
MollifierBoundReport mollifier_convergence_bound_check(const SpectralField& f, double eps,
                                                       double s, long tail_terms = 1000000);

}  // namespace fracpinn
