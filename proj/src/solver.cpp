#include "fracpinn/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace fracpinn {

double TimeTag::eval(double t) const {
    return constant + amplitude * std::cos(frequency * t + phase);
}

double TimeTag::derivative(int order, double t) const {
    if (order < 0) throw std::invalid_argument("TimeTag: derivative order must be >= 0");
    if (order == 0) return eval(t);
    // d^n/dt^n cos(wt+p) = w^n cos(wt + p + n pi/2)
    return amplitude * std::pow(frequency, order) *
           std::cos(frequency * t + phase + order * M_PI / 2.0);
}

void VelocitySpec::base_velocity(double x, double y, double& ux, double& uy) const {
    ux = 0.0;
    uy = 0.0;
    for (const StreamTerm& s : stream) {
        // phi = coeff * sin(jx x) sin(jy y); u = (-d_y phi, d_x phi)
        ux -= s.coeff * s.jy * std::sin(s.jx * x) * std::cos(s.jy * y);
        uy += s.coeff * s.jx * std::cos(s.jx * x) * std::sin(s.jy * y);
    }
}

Eigen::VectorXd ForcingSpec::coeff_at(const SpectralBasis& basis, double t) const {
    return coeff_derivative_at(basis, 0, t);
}

Eigen::VectorXd ForcingSpec::coeff_derivative_at(const SpectralBasis& basis, int order,
                                                 double t) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
    for (const ForcingTerm& term : terms) {
        if (term.mode < 0 || term.mode >= basis.size())
            throw std::invalid_argument("ForcingSpec: mode index out of range");
        c[term.mode] += term.tag.derivative(order, t);
    }
    return c;
}

void PdeProblem::validate() const {
    if (basis == nullptr) throw std::invalid_argument("PdeProblem: missing basis");
    if (!(alpha >= 0.0 && alpha <= 2.0))
        throw std::invalid_argument("PdeProblem: alpha must be in [0,2]");
    if (initial_coeff.size() != basis->size())
        throw std::invalid_argument("PdeProblem: initial coefficient length mismatch");
    if (basis->domain.dim == 1 && !velocity.is_zero())
        throw std::invalid_argument(
            "PdeProblem: nonzero velocity is not admissible in 1D "
            "(divergence-free + no-penetration forces u == 0)");
}

AdvectionOperator::AdvectionOperator(const SpectralBasis& b, const QuadratureGrid& g,
                                     const VelocitySpec& u)
    : basis(&b), grid(&g), velocity(&u) {
    const int J = b.size();
    if (u.is_zero() || b.domain.dim == 1) {
        if (b.domain.dim == 1 && !u.is_zero())
            throw std::invalid_argument("AdvectionOperator: nonzero velocity in 1D");
        matrix = Eigen::MatrixXd::Zero(J, J);
        return;
    }
    SpectralTransform tr(b, g);
    const int N = g.interior_count();
    Eigen::VectorXd ux(N), uy(N);
    for (int n = 0; n < N; ++n) {
        const auto& p = g.interior_nodes[static_cast<size_t>(n)];
        u.base_velocity(p[0], p[1], ux[n], uy[n]);
    }
    matrix = tr.proj * (ux.asDiagonal() * tr.synth_dx + uy.asDiagonal() * tr.synth_dy);
}

Eigen::VectorXd AdvectionOperator::apply(const Eigen::VectorXd& coeff, double t) const {
    return velocity->modulation.eval(t) * (matrix * coeff);
}

SpectralField advection_apply(const VelocitySpec& u, const SpectralField& c,
                              const QuadratureGrid& grid, double t) {
    if (c.basis->domain.dim == 1 && !u.is_zero())
        throw std::invalid_argument("advection_apply: nonzero velocity in 1D");
    AdvectionOperator A(*c.basis, grid, u);
    return SpectralField(*c.basis, A.apply(c.coeff, t));
}

Eigen::VectorXd ReferenceSolution::coeff_derivative_at(int q) const {
    const double t = times[q];
    Eigen::VectorXd c = coeff_at(q);
    Eigen::VectorXd rhs = problem.forcing.coeff_at(*problem.basis, t) -
                          problem.velocity.modulation.eval(t) * (advection_matrix * c);
    if (diffusion_included) rhs -= diffusion.cwiseProduct(c);
    return rhs;
}

ReferenceSolution solve_reference(const PdeProblem& problem, const QuadratureGrid& grid,
                                  int steps, const SolveOptions& options) {
    problem.validate();
    if (steps < 1) throw std::invalid_argument("solve_reference: steps must be >= 1");
    const SpectralBasis& basis = *problem.basis;
    const int J = basis.size();
    const int Q = grid.time_intervals;
    const double T = basis.domain.final_time;

    AdvectionOperator adv(basis, grid, problem.velocity);
    Eigen::VectorXd diffusion(J);
    for (int j = 0; j < J; ++j)
        diffusion[j] = std::pow(basis.modes[static_cast<size_t>(j)].lambda, problem.alpha / 2.0);
    if (!options.include_diffusion) diffusion.setZero();

    const int sub = std::max(1, (steps + Q - 1) / Q);
    const int total = sub * Q;
    const double h = T / total;
    const Eigen::VectorXd e_half = (-0.5 * h * diffusion.array()).exp();
    const Eigen::VectorXd e_full = (-h * diffusion.array()).exp();

    auto nonstiff = [&](double t, const Eigen::VectorXd& c) -> Eigen::VectorXd {
        return problem.forcing.coeff_at(basis, t) - adv.apply(c, t);
    };

    ReferenceSolution sol;
    sol.problem = problem;
    sol.grid = &grid;
    sol.times = grid.time_nodes;
    sol.coeffs.resize(Q + 1, J);
    sol.advection_matrix = adv.matrix;
    sol.diffusion = diffusion;
    sol.diffusion_included = options.include_diffusion;
    sol.steps_taken = total;
    sol.scheme = "integrating-factor RK4";

    Eigen::VectorXd y = problem.initial_coeff;
    sol.coeffs.row(0) = y.transpose();
    sol.max_coeff = y.cwiseAbs().maxCoeff();
    for (int q = 0; q < Q; ++q) {
        for (int m = 0; m < sub; ++m) {
            const double t = grid.time_nodes[q] + m * h;
            const Eigen::VectorXd k1 = nonstiff(t, y);
            const Eigen::VectorXd k2 =
                nonstiff(t + 0.5 * h, e_half.cwiseProduct(y + 0.5 * h * k1));
            const Eigen::VectorXd k3 =
                nonstiff(t + 0.5 * h, e_half.cwiseProduct(y) + 0.5 * h * k2);
            const Eigen::VectorXd k4 =
                nonstiff(t + h, e_full.cwiseProduct(y) + h * e_half.cwiseProduct(k3));
            y = e_full.cwiseProduct(y) +
                (h / 6.0) * (e_full.cwiseProduct(k1) + 2.0 * e_half.cwiseProduct(k2 + k3) + k4);
        }
        if (!y.allFinite())
            throw std::runtime_error("solve_reference: non-finite coefficients during integration");
        sol.coeffs.row(q + 1) = y.transpose();
        sol.max_coeff = std::max(sol.max_coeff, y.cwiseAbs().maxCoeff());
    }
    return sol;
}

std::vector<Eigen::VectorXd> initial_time_derivatives(const PdeProblem& problem,
                                                      const QuadratureGrid& grid, int k) {
    problem.validate();
    if (k < 0) throw std::invalid_argument("initial_time_derivatives: k must be >= 0");
    const SpectralBasis& basis = *problem.basis;
    const int J = basis.size();

    AdvectionOperator adv(basis, grid, problem.velocity);
    Eigen::VectorXd diffusion(J);
    for (int j = 0; j < J; ++j)
        diffusion[j] = std::pow(basis.modes[static_cast<size_t>(j)].lambda, problem.alpha / 2.0);

    std::vector<Eigen::VectorXd> derivs;  // derivs[i] = d_t^{(i)} psi(0), i >= 0
    derivs.push_back(problem.initial_coeff);
    for (int i = 0; i < k; ++i) {
        // d_t^{(i+1)} psi = d_t^{(i)} [f - g(t) A0 psi - D psi] at t = 0
        Eigen::VectorXd next = problem.forcing.coeff_derivative_at(basis, i, 0.0);
        double binom = 1.0;
        for (int v = 0; v <= i; ++v) {
            if (v > 0) binom = binom * (i - v + 1) / v;
            next -= binom * problem.velocity.modulation.derivative(v, 0.0) *
                    (adv.matrix * derivs[static_cast<size_t>(i - v)]);
        }
        next -= diffusion.cwiseProduct(derivs.back());
        derivs.push_back(std::move(next));
    }
    return {derivs.begin() + 1, derivs.end()};
}

}  // namespace fracpinn
