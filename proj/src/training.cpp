#include "fracpinn/training.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace fracpinn {

namespace {

struct RatioEvaluators {
    // E_G denominators for the ratio columns: indices (ell+k, k).
    std::unique_ptr<ResidualEvaluator> eg00, eg10, eg11;
};

ResidualConfig with_indices(ResidualConfig c, int ell, int k) {
    c.ell = ell;
    c.k = k;
    return c;
}

TraceRow make_row(long step, const ErrorReport& rep, const ResidualEvaluator& evaluator,
                  const RatioEvaluators& ratios, const MlpModel& model,
                  const ReferenceSolution* ref) {
    TraceRow row;
    row.step = step;
    row.loss = rep.eg_total * rep.eg_total;
    row.eg_interior = rep.eg_interior;
    row.eg_initial = rep.eg_initial;
    row.eg_boundary = rep.eg_boundary;
    row.eg_total = rep.eg_total;
    if (ref) {
        row.e00 = evaluator.total_error(model, *ref, 0, 0);
        row.e10 = evaluator.total_error(model, *ref, 1, 0);
        row.e01 = evaluator.total_error(model, *ref, 0, 1);
        const double d00 = ratios.eg00->generalization_error(model).eg_total;
        const double d10 = ratios.eg10->generalization_error(model).eg_total;
        const double d11 = ratios.eg11->generalization_error(model).eg_total;
        row.ratio00 = (row.e00 * row.e00) / (d00 * d00);
        row.ratio10 = (row.e10 * row.e10) / (d10 * d10);
        row.ratio01 = (row.e01 * row.e01) / (d11 * d11);
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.e00 = row.e10 = row.e01 = nan;
        row.ratio00 = row.ratio10 = row.ratio01 = nan;
    }
    return row;
}

}  // namespace

TrainResult train_model(const ResidualEvaluator& evaluator, const TrainOptions& options,
                        const ReferenceSolution* ref, const SnapshotCallback& snapshot) {
    if (options.steps < 1) throw std::invalid_argument("train_model: steps must be >= 1");
    if (!(options.rate > 0.0)) throw std::invalid_argument("train_model: rate must be positive");
    if (options.optimizer != "adam" && options.optimizer != "sgd")
        throw std::invalid_argument("train_model: optimizer must be 'adam' or 'sgd'");

    const int dim = evaluator.problem().basis->domain.dim;
    std::vector<int> widths = options.widths;
    if (widths.empty()) widths = {dim + 1, 32, 32, 1};
    if (widths.front() != dim + 1)
        throw std::invalid_argument("train_model: network input width must be dim+1");

    RatioEvaluators ratios;
    if (ref) {
        const ResidualConfig& base = evaluator.config();
        ratios.eg00 = std::make_unique<ResidualEvaluator>(evaluator.problem(), evaluator.grid(),
                                                          with_indices(base, 0, 0));
        ratios.eg10 = std::make_unique<ResidualEvaluator>(evaluator.problem(), evaluator.grid(),
                                                          with_indices(base, 1, 0));
        ratios.eg11 = std::make_unique<ResidualEvaluator>(evaluator.problem(), evaluator.grid(),
                                                          with_indices(base, 1, 1));
    }

    TrainResult result;
    result.model = init_model(widths, options.seed);
    MlpModel& model = result.model;
    ParamGradient grad = model.zero_gradient();
    AdamState adam(model);

    long step = 0;
    long last_traced = -1;
    for (; step < options.steps; ++step) {
        grad.set_zero();
        ErrorReport rep = evaluator.generalization_error(model, &grad);
        if (!std::isfinite(rep.eg_total) || !grad.all_finite()) {
            result.diverged = true;
            break;
        }
        if (step == 0) result.initial_eg = rep.eg_total;
        if (options.trace_every > 0 && step % options.trace_every == 0) {
            result.trace.push_back(make_row(step, rep, evaluator, ratios, model, ref));
            last_traced = step;
        }
        if (snapshot && options.snapshot_every > 0 && step % options.snapshot_every == 0)
            snapshot(step, model);
        if (options.delta > 0.0 && rep.eg_total <= options.delta) {
            result.reached_delta = true;
            break;
        }
        if (options.optimizer == "adam")
            adam_step(model, grad, adam, options.rate);
        else
            sgd_step(model, grad, options.rate);
    }
    result.steps_done = step;

    ErrorReport final_rep = evaluator.generalization_error(model);
    result.final_eg = final_rep.eg_total;
    if (step == 0) result.initial_eg = final_rep.eg_total;
    if (last_traced != step)
        result.trace.push_back(make_row(step, final_rep, evaluator, ratios, model, ref));
    if (snapshot) snapshot(step, model);
    return result;
}

}  // namespace fracpinn
