#include "fracpinn/residuals.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracpinn {

namespace {

double binom(int n, int k) {
    double b = 1.0;
    for (int v = 1; v <= k; ++v) b = b * (n - v + 1) / v;
    return b;
}

// First-derivative stencil: fourth-order centered inside, second-order at the
// two nodes nearest each end (one-sided at the very edge).
Eigen::MatrixXd first_derivative_stencil(int n, double h) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 2; i < n - 2; ++i) {
        d(i, i - 2) = 1.0 / (12.0 * h);
        d(i, i - 1) = -8.0 / (12.0 * h);
        d(i, i + 1) = 8.0 / (12.0 * h);
        d(i, i + 2) = -1.0 / (12.0 * h);
    }
    d(0, 0) = -3.0 / (2.0 * h);
    d(0, 1) = 4.0 / (2.0 * h);
    d(0, 2) = -1.0 / (2.0 * h);
    d(1, 0) = -1.0 / (2.0 * h);
    d(1, 2) = 1.0 / (2.0 * h);
    d(n - 2, n - 3) = -1.0 / (2.0 * h);
    d(n - 2, n - 1) = 1.0 / (2.0 * h);
    d(n - 1, n - 3) = 1.0 / (2.0 * h);
    d(n - 1, n - 2) = -4.0 / (2.0 * h);
    d(n - 1, n - 1) = 3.0 / (2.0 * h);
    return d;
}

Eigen::MatrixXd second_derivative_stencil(int n, double h) {
    const double h2 = h * h;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 2; i < n - 2; ++i) {
        d(i, i - 2) = -1.0 / (12.0 * h2);
        d(i, i - 1) = 16.0 / (12.0 * h2);
        d(i, i) = -30.0 / (12.0 * h2);
        d(i, i + 1) = 16.0 / (12.0 * h2);
        d(i, i + 2) = -1.0 / (12.0 * h2);
    }
    d(0, 0) = 2.0 / h2;
    d(0, 1) = -5.0 / h2;
    d(0, 2) = 4.0 / h2;
    d(0, 3) = -1.0 / h2;
    d(1, 0) = 1.0 / h2;
    d(1, 1) = -2.0 / h2;
    d(1, 2) = 1.0 / h2;
    d(n - 2, n - 3) = 1.0 / h2;
    d(n - 2, n - 2) = -2.0 / h2;
    d(n - 2, n - 1) = 1.0 / h2;
    d(n - 1, n - 4) = -1.0 / h2;
    d(n - 1, n - 3) = 4.0 / h2;
    d(n - 1, n - 2) = -5.0 / h2;
    d(n - 1, n - 1) = 2.0 / h2;
    return d;
}

}  // namespace

void ResidualConfig::validate() const {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("ResidualConfig: eps must be in (0,1)");
    if (ell < 0 || ell > 2) throw std::invalid_argument("ResidualConfig: ell must be 0, 1 or 2");
    if (k < 0 || k > 2) throw std::invalid_argument("ResidualConfig: k must be 0, 1 or 2");
    if (policy != 'A' && policy != 'B')
        throw std::invalid_argument("ResidualConfig: policy must be 'A' or 'B'");
    if (eval_nodes != 0 && eval_nodes < 7)
        throw std::invalid_argument("ResidualConfig: eval_nodes must be 0 or >= 7");
}

ResidualEvaluator::ResidualEvaluator(const PdeProblem& problem, const QuadratureGrid& grid,
                                     const ResidualConfig& config)
    : problem_(problem), grid_(&grid), config_(config), basis_(problem.basis) {
    config_.validate();
    problem_.validate();
    if (grid.domain.dim != basis_->domain.dim)
        throw std::invalid_argument("ResidualEvaluator: grid/basis dimension mismatch");

    const int J = basis_->size();
    mult_ = MollifierSpec(*basis_, config_.eps).multipliers;
    lam_.resize(J);
    lam_alpha_.resize(J);
    for (int j = 0; j < J; ++j) {
        lam_[j] = basis_->modes[static_cast<size_t>(j)].lambda;
        lam_alpha_[j] = std::pow(lam_[j], problem_.alpha / 2.0);
    }

    SpectralTransform tr(*basis_, grid);
    proj_ = tr.proj;
    synth_q_ = tr.synth;
    const bool advect = basis_->domain.dim == 2 && !problem_.velocity.is_zero();
    if (advect) {
        const int Nq = grid.interior_count();
        Eigen::VectorXd ux(Nq), uy(Nq);
        for (int n = 0; n < Nq; ++n) {
            const auto& p = grid.interior_nodes[static_cast<size_t>(n)];
            problem_.velocity.base_velocity(p[0], p[1], ux[n], uy[n]);
        }
        adv_q_ = ux.asDiagonal() * tr.synth_dx + uy.asDiagonal() * tr.synth_dy;
    } else {
        adv_q_ = Eigen::MatrixXd::Zero(grid.interior_count(), J);
    }
    adv_galerkin_ = proj_ * adv_q_;

    const int dim = basis_->domain.dim;
    const int ne = config_.eval_nodes > 0 ? config_.eval_nodes : grid.nodes_per_axis;
    if (ne < 7) throw std::invalid_argument("ResidualEvaluator: evaluation grid too coarse");
    eval_.nodes_per_axis = ne;
    eval_.h = M_PI / ne;
    eval_.axis_nodes.resize(static_cast<size_t>(ne));
    for (int i = 0; i < ne; ++i) eval_.axis_nodes[static_cast<size_t>(i)] = (i + 0.5) * eval_.h;
    eval_weight_ = std::pow(eval_.h, dim);

    const int Ne = dim == 1 ? ne : ne * ne;
    synth_e_.resize(Ne, J);
    Eigen::MatrixXd synth_e_dx(Ne, J), synth_e_dy(Ne, J);
    Eigen::VectorXd uex = Eigen::VectorXd::Zero(Ne), uey = Eigen::VectorXd::Zero(Ne);
    for (int n = 0; n < Ne; ++n) {
        const double x = eval_.axis_nodes[static_cast<size_t>(dim == 1 ? n : n / ne)];
        const double y = dim == 1 ? 0.0 : eval_.axis_nodes[static_cast<size_t>(n % ne)];
        for (int j = 0; j < J; ++j) {
            synth_e_(n, j) = basis_->eigenfunction(j, x, y);
            synth_e_dx(n, j) = basis_->eigenfunction_dx(j, x, y);
            synth_e_dy(n, j) = basis_->eigenfunction_dy(j, x, y);
        }
        if (advect) problem_.velocity.base_velocity(x, y, uex[n], uey[n]);
    }
    if (advect)
        adv_e_ = uex.asDiagonal() * synth_e_dx + uey.asDiagonal() * synth_e_dy;
    else
        adv_e_ = Eigen::MatrixXd::Zero(Ne, J);

    d1_ = first_derivative_stencil(ne, eval_.h);
    d2_ = second_derivative_stencil(ne, eval_.h);
}

std::vector<EvalPoint> ResidualEvaluator::quad_points_at(double t) const {
    std::vector<EvalPoint> pts(grid_->interior_nodes.size());
    for (size_t n = 0; n < pts.size(); ++n)
        pts[n] = {grid_->interior_nodes[n][0], grid_->interior_nodes[n][1], t};
    return pts;
}

std::vector<EvalPoint> ResidualEvaluator::eval_points_at(double t) const {
    const int dim = basis_->domain.dim;
    const int ne = eval_.nodes_per_axis;
    const int Ne = dim == 1 ? ne : ne * ne;
    std::vector<EvalPoint> pts(static_cast<size_t>(Ne));
    for (int n = 0; n < Ne; ++n) {
        const double x = eval_.axis_nodes[static_cast<size_t>(dim == 1 ? n : n / ne)];
        const double y = dim == 1 ? 0.0 : eval_.axis_nodes[static_cast<size_t>(n % ne)];
        pts[static_cast<size_t>(n)] = {x, y, t};
    }
    return pts;
}

std::vector<EvalPoint> ResidualEvaluator::boundary_points_at(double t) const {
    std::vector<EvalPoint> pts(grid_->boundary_nodes.size());
    for (size_t n = 0; n < pts.size(); ++n)
        pts[n] = {grid_->boundary_nodes[n][0], grid_->boundary_nodes[n][1], t};
    return pts;
}

Eigen::VectorXd ResidualEvaluator::apply_axis_op(const Eigen::MatrixXd& op,
                                                 const Eigen::VectorXd& f, int axis) const {
    if (basis_->domain.dim == 1) return op * f;
    const int ne = eval_.nodes_per_axis;
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> F(f.data(), ne, ne);
    RowMat G = axis == 0 ? RowMat(op * F) : RowMat(F * op.transpose());
    return Eigen::Map<const Eigen::VectorXd>(G.data(), ne * ne);
}

double ResidualEvaluator::local_operator_norm_sq(const Eigen::VectorXd& r, int ell,
                                                 Eigen::VectorXd* rbar) const {
    const int dim = basis_->domain.dim;
    const double w = eval_weight_;
    if (ell == 0) {
        if (rbar) *rbar += 2.0 * w * r;
        return w * r.squaredNorm();
    }
    if (ell == 1) {
        Eigen::VectorXd gx = apply_axis_op(d1_, r, 0);
        double sq = w * gx.squaredNorm();
        if (rbar) *rbar += 2.0 * w * apply_axis_op(d1_.transpose(), gx, 0);
        if (dim == 2) {
            Eigen::VectorXd gy = apply_axis_op(d1_, r, 1);
            sq += w * gy.squaredNorm();
            if (rbar) *rbar += 2.0 * w * apply_axis_op(d1_.transpose(), gy, 1);
        }
        return sq;
    }
    // ell == 2: negative Laplacian
    Eigen::VectorXd y = -apply_axis_op(d2_, r, 0);
    if (dim == 2) y -= apply_axis_op(d2_, r, 1);
    if (rbar) {
        Eigen::VectorXd back = -apply_axis_op(d2_.transpose(), y, 0);
        if (dim == 2) back -= apply_axis_op(d2_.transpose(), y, 1);
        *rbar += 2.0 * w * back;
    }
    return w * y.squaredNorm();
}

Eigen::VectorXd ResidualEvaluator::residual_on_eval(int j, double t, const Eigen::VectorXd& c0,
                                                    const Eigen::VectorXd& c1,
                                                    const Eigen::VectorXd& c2) const {
    const Eigen::VectorXd* cs[3] = {&c0, &c1, &c2};
    Eigen::VectorXd spec =
        mult_.cwiseProduct(*cs[j + 1]) + lam_alpha_.cwiseProduct(mult_.cwiseProduct(*cs[j]));
    Eigen::VectorXd r = synth_e_ * spec;
    if (!problem_.velocity.is_zero()) {
        for (int v = 0; v <= j; ++v)
            r += binom(j, v) * problem_.velocity.modulation.derivative(j - v, t) *
                 (adv_e_ * mult_.cwiseProduct(*cs[v]));
    }
    r -= synth_e_ * problem_.forcing.coeff_derivative_at(*basis_, j, t);
    return r;
}

GridField ResidualEvaluator::pde_residual(const ScalarFieldModel& model, int time_index) const {
    const double t = grid_->time_nodes[time_index];
    BatchJets jets = model.evaluate(quad_points_at(t), 1);
    Eigen::VectorXd c0 = proj_ * jets.value;
    Eigen::VectorXd c1 = proj_ * jets.dt;
    Eigen::VectorXd r =
        synth_q_ * (mult_.cwiseProduct(c1) + lam_alpha_.cwiseProduct(mult_.cwiseProduct(c0))) +
        problem_.velocity.modulation.eval(t) * (adv_q_ * mult_.cwiseProduct(c0)) -
        synth_q_ * problem_.forcing.coeff_at(*basis_, t);
    return GridField(*grid_, std::move(r));
}

InitialResidual ResidualEvaluator::initial_residual(const ScalarFieldModel& model, int k) const {
    if (k < 0 || k > 2) throw std::invalid_argument("initial_residual: k must be 0, 1 or 2");
    BatchJets jets = model.evaluate(quad_points_at(0.0), k);
    InitialResidual out;
    out.order0 = SpectralField(*basis_, proj_ * jets.value - problem_.initial_coeff);
    if (k >= 1) {
        std::vector<Eigen::VectorXd> exact = initial_time_derivatives(problem_, *grid_, k);
        out.per_order.emplace_back(*basis_,
                                   Eigen::VectorXd(proj_ * jets.dt - exact[0]));
        if (k >= 2)
            out.per_order.emplace_back(*basis_,
                                       Eigen::VectorXd(proj_ * jets.dtt - exact[1]));
    }
    return out;
}

Eigen::VectorXd ResidualEvaluator::boundary_residual(const ScalarFieldModel& model,
                                                     int time_index) const {
    const double t = grid_->time_nodes[time_index];
    return model.evaluate(boundary_points_at(t), 0).value;
}

ErrorReport ResidualEvaluator::generalization_error(const ScalarFieldModel& model,
                                                    ParamGradient* grad) const {
    const int k = config_.k;
    const int ell = config_.ell;
    if (k > 1)
        throw std::invalid_argument("generalization_error: k must be <= 1 "
                                    "(second time derivatives of the residual need third-order "
                                    "jets)");
    const MlpModel* mlp = nullptr;
    if (grad) {
        mlp = dynamic_cast<const MlpModel*>(&model);
        if (!mlp)
            throw std::invalid_argument("generalization_error: gradients need an MlpModel");
    }

    const int J = basis_->size();
    const int Q = grid_->time_intervals;
    ErrorReport rep;
    rep.eps = config_.eps;
    rep.ell = ell;
    rep.k = k;
    rep.policy = config_.policy;
    if (ell >= 1)
        rep.stencil_note =
            "one-sided second-order stencils within two nodes of the boundary; "
            "fourth-order centered elsewhere";
    rep.per_time_residual_norm.resize(static_cast<size_t>(Q + 1));
    const Eigen::VectorXd zero_c = Eigen::VectorXd::Zero(J);

    // Interior part: time derivatives of the mollified PDE residual.
    double interior_sq = 0.0;
    for (int q = 0; q <= Q; ++q) {
        const double t = grid_->time_nodes[q];
        const double wt = grid_->time_weights[q];
        std::vector<EvalPoint> pts = quad_points_at(t);
        BatchJets jets = model.evaluate(pts, k + 1);
        Eigen::VectorXd c0 = proj_ * jets.value;
        Eigen::VectorXd c1 = proj_ * jets.dt;
        Eigen::VectorXd c2 = k >= 1 ? Eigen::VectorXd(proj_ * jets.dtt) : zero_c;
        Eigen::VectorXd cbar0 = zero_c, cbar1 = zero_c, cbar2 = zero_c;
        Eigen::VectorXd* cbars[3] = {&cbar0, &cbar1, &cbar2};
        for (int j = 0; j <= k; ++j) {
            Eigen::VectorXd r = residual_on_eval(j, t, c0, c1, c2);
            if (j == 0)
                rep.per_time_residual_norm[static_cast<size_t>(q)] =
                    std::sqrt(eval_weight_ * r.squaredNorm());
            Eigen::VectorXd rbar = Eigen::VectorXd::Zero(r.size());
            interior_sq += wt * local_operator_norm_sq(r, ell, grad ? &rbar : nullptr);
            if (grad) {
                Eigen::VectorXd se_rbar = synth_e_.transpose() * rbar;
                *cbars[j + 1] += mult_.cwiseProduct(se_rbar);
                *cbars[j] += lam_alpha_.cwiseProduct(mult_.cwiseProduct(se_rbar));
                if (!problem_.velocity.is_zero()) {
                    Eigen::VectorXd ae_rbar = adv_e_.transpose() * rbar;
                    for (int v = 0; v <= j; ++v)
                        *cbars[v] += binom(j, v) *
                                     problem_.velocity.modulation.derivative(j - v, t) *
                                     mult_.cwiseProduct(ae_rbar);
                }
            }
        }
        if (grad) {
            Eigen::VectorXd vb = wt * (proj_.transpose() * cbar0);
            Eigen::VectorXd db = wt * (proj_.transpose() * cbar1);
            Eigen::VectorXd ddb =
                k >= 1 ? Eigen::VectorXd(wt * (proj_.transpose() * cbar2)) : Eigen::VectorXd();
            mlp->backward(pts, vb, db, ddb, *grad);
        }
    }
    rep.eg_interior = std::sqrt(interior_sq);

    // Initial part at t = 0 on the evaluation grid.
    {
        std::vector<EvalPoint> pts = eval_points_at(0.0);
        BatchJets jets = model.evaluate(pts, k);
        std::vector<Eigen::VectorXd> exact =
            k >= 1 ? initial_time_derivatives(problem_, *grid_, k) : std::vector<Eigen::VectorXd>{};
        std::vector<Eigen::VectorXd> mismatch;  // order 0..k on the eval grid
        mismatch.push_back(jets.value - synth_e_ * problem_.initial_coeff);
        if (k >= 1) mismatch.push_back(jets.dt - synth_e_ * exact[0]);
        for (const Eigen::VectorXd& m : mismatch)
            rep.initial_per_order.push_back(std::sqrt(local_operator_norm_sq(m, ell, nullptr)));
        const int i0 = config_.policy == 'A' ? 0 : 1;
        double initial_sq = 0.0;
        if (i0 <= k) {
            Eigen::VectorXd R = mismatch[static_cast<size_t>(i0)];
            for (int i = i0 + 1; i <= k; ++i) R += mismatch[static_cast<size_t>(i)];
            Eigen::VectorXd Rbar = Eigen::VectorXd::Zero(R.size());
            initial_sq = local_operator_norm_sq(R, ell, grad ? &Rbar : nullptr);
            if (grad) {
                Eigen::VectorXd vb = i0 == 0 ? Rbar : Eigen::VectorXd();
                Eigen::VectorXd db = k >= 1 ? Rbar : Eigen::VectorXd();
                mlp->backward(pts, vb, db, Eigen::VectorXd(), *grad);
            }
        }
        rep.eg_initial = std::sqrt(initial_sq);
    }

    // Boundary part: raw network trace (the mollified field vanishes there).
    double boundary_sq = 0.0;
    for (int q = 0; q <= Q; ++q) {
        const double t = grid_->time_nodes[q];
        const double wt = grid_->time_weights[q];
        std::vector<EvalPoint> pts = boundary_points_at(t);
        BatchJets jets = model.evaluate(pts, 0);
        boundary_sq += wt * grid_->boundary_weights.cwiseProduct(jets.value).dot(jets.value);
        if (grad) {
            Eigen::VectorXd vb =
                2.0 * wt * grid_->boundary_weights.cwiseProduct(jets.value);
            mlp->backward(pts, vb, Eigen::VectorXd(), Eigen::VectorXd(), *grad);
        }
    }
    rep.eg_boundary = std::sqrt(boundary_sq);

    rep.eg_total =
        std::sqrt(rep.eg_interior * rep.eg_interior + rep.eg_initial * rep.eg_initial +
                  rep.eg_boundary * rep.eg_boundary);
    return rep;
}

Eigen::VectorXd ResidualEvaluator::reference_coeff_deriv(const ReferenceSolution& ref, int q,
                                                         int order) const {
    if (order == 0) return ref.coeff_at(q);
    if (order == 1) return ref.coeff_derivative_at(q);
    // Second derivative by finite differences of the exact first derivative.
    const int Q = static_cast<int>(ref.times.size()) - 1;
    if (q == 0)
        return (ref.coeff_derivative_at(1) - ref.coeff_derivative_at(0)) /
               (ref.times[1] - ref.times[0]);
    if (q == Q)
        return (ref.coeff_derivative_at(Q) - ref.coeff_derivative_at(Q - 1)) /
               (ref.times[Q] - ref.times[Q - 1]);
    return (ref.coeff_derivative_at(q + 1) - ref.coeff_derivative_at(q - 1)) /
           (ref.times[q + 1] - ref.times[q - 1]);
}

double ResidualEvaluator::total_error(const ScalarFieldModel& model,
                                      const ReferenceSolution& ref) const {
    return total_error(model, ref, config_.ell, config_.k);
}

double ResidualEvaluator::total_error(const ScalarFieldModel& model, const ReferenceSolution& ref,
                                      int ell, int k) const {
    if (ell < 0 || k < 0 || k > 2)
        throw std::invalid_argument("total_error: invalid indices");
    const int Q = grid_->time_intervals;
    if (ref.times.size() != grid_->time_nodes.size())
        throw std::invalid_argument("total_error: reference/grid time nodes mismatch");
    Eigen::VectorXd lam_ell = lam_.array().pow(static_cast<double>(ell));
    double sq = 0.0;
    for (int q = 0; q <= Q; ++q) {
        const double t = grid_->time_nodes[q];
        BatchJets jets = model.evaluate(quad_points_at(t), std::min(k, 2));
        const Eigen::VectorXd* nets[3] = {&jets.value, &jets.dt, &jets.dtt};
        for (int i = 0; i <= k; ++i) {
            Eigen::VectorXd diff =
                reference_coeff_deriv(ref, q, i) - mult_.cwiseProduct(proj_ * (*nets[i]));
            sq += grid_->time_weights[q] * lam_ell.cwiseProduct(diff).dot(diff);
        }
    }
    return std::sqrt(sq);
}

HkReport ResidualEvaluator::hk_domination_check(const ScalarFieldModel& model,
                                                const ReferenceSolution& ref, int k) const {
    if (k < 0 || k > 2)
        throw std::invalid_argument("hk_domination_check: k must be 0, 1 or 2");
    const int Q = grid_->time_intervals;
    HkReport rep;
    rep.k = k;

    double hk_sq = 0.0;
    double total_sq = 0.0;
    Eigen::VectorXd lam_k = lam_.array().pow(static_cast<double>(k));
    for (int q = 0; q <= Q; ++q) {
        const double t = grid_->time_nodes[q];
        const double wt = grid_->time_weights[q];
        BatchJets jets = model.evaluate(quad_points_at(t), k);
        const Eigen::VectorXd* nets[3] = {&jets.value, &jets.dt, &jets.dtt};
        for (int i = 0; i <= k; ++i) {
            Eigen::VectorXd ec =
                reference_coeff_deriv(ref, q, i) - mult_.cwiseProduct(proj_ * (*nets[i]));
            total_sq += wt * lam_k.cwiseProduct(ec).dot(ec);
            Eigen::VectorXd ev = synth_e_ * ec;
            for (int j = 0; j <= k; ++j) {
                if (j == 0) {
                    hk_sq += wt * eval_weight_ * ev.squaredNorm();
                } else if (j == 1) {
                    hk_sq += wt * local_operator_norm_sq(ev, 1, nullptr);
                } else {
                    Eigen::VectorXd fxx = apply_axis_op(d2_, ev, 0);
                    hk_sq += wt * eval_weight_ * fxx.squaredNorm();
                    if (basis_->domain.dim == 2) {
                        Eigen::VectorXd fyy = apply_axis_op(d2_, ev, 1);
                        Eigen::VectorXd fxy = apply_axis_op(d1_, apply_axis_op(d1_, ev, 0), 1);
                        hk_sq += wt * eval_weight_ *
                                 (fyy.squaredNorm() + 2.0 * fxy.squaredNorm());
                    }
                }
            }
        }
    }
    rep.hk_norm = std::sqrt(hk_sq);
    rep.total_error = std::sqrt(total_sq);
    rep.ratio = rep.total_error > 0.0 ? rep.hk_norm / rep.total_error
                                      : std::numeric_limits<double>::infinity();
    return rep;
}

namespace {

double bump(double r) { return r > 0.0 ? std::exp(-1.0 / r) : 0.0; }
double bump_dr(double r) { return r > 0.0 ? std::exp(-1.0 / r) / (r * r) : 0.0; }

double smoothstep(double r) {
    if (r <= 0.0) return 0.0;
    if (r >= 1.0) return 1.0;
    const double a = bump(r), b = bump(1.0 - r);
    return a / (a + b);
}

double smoothstep_dr(double r) {
    if (r <= 0.0 || r >= 1.0) return 0.0;
    const double a = bump(r), b = bump(1.0 - r);
    const double ad = bump_dr(r), bd = -bump_dr(1.0 - r);
    const double s = a + b;
    return (ad * s - a * (ad + bd)) / (s * s);
}

}  // namespace

double cutoff_chi(double x, double eps) {
    if (eps <= 0.0) return 1.0;
    return smoothstep(x / eps) * smoothstep((M_PI - x) / eps);
}

double cutoff_chi_dx(double x, double eps) {
    if (eps <= 0.0) return 0.0;
    return smoothstep_dr(x / eps) / eps * smoothstep((M_PI - x) / eps) -
           smoothstep(x / eps) * smoothstep_dr((M_PI - x) / eps) / eps;
}

std::vector<CutoffRow> cutoff_comparison(const SpectralField& psi,
                                         const std::vector<double>& eps_list) {
    if (psi.basis == nullptr || psi.basis->domain.dim != 1)
        throw std::invalid_argument("cutoff_comparison: needs a 1D field");
    const SpectralBasis& basis = *psi.basis;
    const int J = basis.size();

    const int nf = 4096;
    const double h = M_PI / nf;
    Eigen::VectorXd xs(nf), vals(nf), dvals(nf);
    for (int n = 0; n < nf; ++n) {
        const double x = (n + 0.5) * h;
        xs[n] = x;
        double v = 0.0, dv = 0.0;
        for (int j = 0; j < J; ++j) {
            v += psi.coeff[j] * basis.eigenfunction(j, x);
            dv += psi.coeff[j] * basis.eigenfunction_dx(j, x);
        }
        vals[n] = v;
        dvals[n] = dv;
    }

    std::vector<CutoffRow> rows;
    for (double eps : eps_list) {
        CutoffRow row;
        row.eps = eps;
        if (eps > 0.0) {
            double msq = 0.0;
            for (int j = 0; j < J; ++j) {
                const double lam = basis.modes[static_cast<size_t>(j)].lambda;
                const double d = mollifier_multiplier(eps, lam) - 1.0;
                msq += lam * d * d * psi.coeff[j] * psi.coeff[j];
            }
            row.mollifier_norm = std::sqrt(msq);
        }
        double csq = 0.0;
        for (int n = 0; n < nf; ++n) {
            const double g = cutoff_chi_dx(xs[n], eps) * vals[n] +
                             (cutoff_chi(xs[n], eps) - 1.0) * dvals[n];
            csq += h * g * g;
        }
        row.cutoff_norm = std::sqrt(csq);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fracpinn
