#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracpinn/training.hpp"

using namespace fracpinn;

namespace {

struct Setup {
    SpectralBasis basis;
    QuadratureGrid grid;
    PdeProblem problem;
    ResidualConfig rc;

    Setup() : basis(build_basis({1, 1.0}, 4)), grid(build_grid(basis, 9, 5)) {
        problem.basis = &basis;
        problem.alpha = 1.0;
        problem.initial_coeff = Eigen::VectorXd::Zero(4);
        problem.initial_coeff[0] = 1.0;
        rc.eps = 0.1;
    }
};

TrainOptions short_options() {
    TrainOptions opt;
    opt.steps = 150;
    opt.trace_every = 50;
    opt.snapshot_every = 0;
    opt.widths = {2, 8, 8, 1};
    opt.seed = 3;
    return opt;
}

}  // namespace

TEST_CASE("a short run reduces the loss and records the trace") {
    Setup s;
    ResidualEvaluator eval(s.problem, s.grid, s.rc);
    TrainResult result = train_model(eval, short_options());
    CHECK(!result.diverged);
    CHECK(result.steps_done == 150);
    CHECK(result.final_eg < result.initial_eg);
    REQUIRE(result.trace.size() == 4);  // steps 0, 50, 100, final 150
    CHECK(result.trace.front().step == 0);
    CHECK(result.trace.back().step == 150);
    for (const TraceRow& row : result.trace) {
        CHECK(std::isfinite(row.loss));
        CHECK(row.loss == doctest::Approx(row.eg_total * row.eg_total).epsilon(1e-12));
        CHECK(std::isnan(row.e00));  // no reference supplied
    }
}

TEST_CASE("identical options give bit-identical runs") {
    Setup s;
    ResidualEvaluator eval(s.problem, s.grid, s.rc);
    TrainResult a = train_model(eval, short_options());
    TrainResult b = train_model(eval, short_options());
    CHECK((a.model.flatten() - b.model.flatten()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a.trace.size() == b.trace.size());
    for (size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].loss == b.trace[i].loss);
        CHECK(a.trace[i].eg_total == b.trace[i].eg_total);
    }
}

TEST_CASE("a loose delta target stops immediately") {
    Setup s;
    ResidualEvaluator eval(s.problem, s.grid, s.rc);
    TrainOptions opt = short_options();
    opt.delta = 1e6;
    TrainResult result = train_model(eval, opt);
    CHECK(result.reached_delta);
    CHECK(result.steps_done == 0);
}

TEST_CASE("reference enables total-error and ratio columns") {
    Setup s;
    ResidualEvaluator eval(s.problem, s.grid, s.rc);
    ReferenceSolution ref = solve_reference(s.problem, s.grid, 128);
    TrainOptions opt = short_options();
    opt.steps = 30;
    opt.trace_every = 30;
    TrainResult result = train_model(eval, opt, &ref);
    for (const TraceRow& row : result.trace) {
        CHECK(std::isfinite(row.e00));
        CHECK(std::isfinite(row.e10));
        CHECK(std::isfinite(row.e01));
        CHECK(row.ratio00 > 0.0);
        CHECK(row.ratio10 > 0.0);
        CHECK(row.ratio01 > 0.0);
    }
}

TEST_CASE("snapshot callback fires at the cadence plus start and end") {
    Setup s;
    ResidualEvaluator eval(s.problem, s.grid, s.rc);
    TrainOptions opt = short_options();
    opt.steps = 100;
    opt.snapshot_every = 40;
    std::vector<long> seen;
    train_model(eval, opt, nullptr, [&](long step, const MlpModel&) { seen.push_back(step); });
    CHECK(seen == std::vector<long>{0, 40, 80, 100});
}

TEST_CASE("invalid options rejected") {
    Setup s;
    ResidualEvaluator eval(s.problem, s.grid, s.rc);
    TrainOptions opt = short_options();
    opt.optimizer = "lbfgs";
    CHECK_THROWS(train_model(eval, opt));
    opt = short_options();
    opt.steps = 0;
    CHECK_THROWS(train_model(eval, opt));
    opt = short_options();
    opt.widths = {3, 8, 1};  // wrong input width for a 1D problem
    CHECK_THROWS(train_model(eval, opt));
}
