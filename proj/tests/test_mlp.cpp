#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "fracpinn/mlp.hpp"

using namespace fracpinn;

namespace {

std::vector<EvalPoint> sample_points(int dim, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    std::vector<EvalPoint> pts(static_cast<size_t>(n));
    for (auto& p : pts) {
        p.x = uni(0.1, 3.0);
        p.y = dim == 2 ? uni(0.1, 3.0) : 0.0;
        p.t = uni(0.0, 1.0);
    }
    return pts;
}

}  // namespace

TEST_CASE("parameter count for [2,16,16,1] is 337") {
    MlpModel model = init_model({2, 16, 16, 1}, 1);
    CHECK(model.parameter_count() == 337);
    CHECK(model.flatten().size() == 337);
}

TEST_CASE("initialization is deterministic in the seed") {
    MlpModel a = init_model({2, 8, 1}, 42);
    MlpModel b = init_model({2, 8, 1}, 42);
    MlpModel c = init_model({2, 8, 1}, 43);
    CHECK((a.flatten() - b.flatten()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.flatten() - c.flatten()).cwiseAbs().maxCoeff() > 0.0);
    CHECK(a.flatten().cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("widths validation") {
    CHECK_THROWS(init_model({4, 8, 1}, 1));  // input must be 2 or 3
    CHECK_THROWS(init_model({2, 8, 2}, 1));  // scalar output only
    CHECK_THROWS(init_model({2}, 1));
}

TEST_CASE("time jets match finite differences of the value") {
    for (int dim : {1, 2}) {
        MlpModel model = init_model({dim + 1, 12, 12, 1}, 7);
        std::vector<EvalPoint> pts = sample_points(dim, 20, 3);
        BatchJets jets = model.evaluate(pts, 2, true);
        const double h = 1e-5;
        for (size_t i = 0; i < pts.size(); ++i) {
            std::vector<EvalPoint> plus = {pts[i]}, minus = {pts[i]};
            plus[0].t += h;
            minus[0].t -= h;
            const double vp = model.evaluate(plus, 0).value[0];
            const double vm = model.evaluate(minus, 0).value[0];
            const double v0 = jets.value[static_cast<long>(i)];
            CHECK(jets.dt[static_cast<long>(i)] ==
                  doctest::Approx((vp - vm) / (2 * h)).epsilon(1e-7));
            CHECK(jets.dtt[static_cast<long>(i)] ==
                  doctest::Approx((vp - 2 * v0 + vm) / (h * h)).epsilon(1e-4));

            plus = {pts[i]}, minus = {pts[i]};
            plus[0].x += h;
            minus[0].x -= h;
            CHECK(jets.dx[static_cast<long>(i)] ==
                  doctest::Approx((model.evaluate(plus, 0).value[0] -
                                   model.evaluate(minus, 0).value[0]) /
                                  (2 * h))
                      .epsilon(1e-7));
            if (dim == 2) {
                plus = {pts[i]}, minus = {pts[i]};
                plus[0].y += h;
                minus[0].y -= h;
                CHECK(jets.dy[static_cast<long>(i)] ==
                      doctest::Approx((model.evaluate(plus, 0).value[0] -
                                       model.evaluate(minus, 0).value[0]) /
                                      (2 * h))
                          .epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("backward matches finite differences for a jet-weighted loss") {
    for (int dim : {1, 2}) {
        MlpModel model = init_model({dim + 1, 10, 10, 1}, 11);
        std::vector<EvalPoint> pts = sample_points(dim, 15, 5);
        const long n = static_cast<long>(pts.size());
        std::mt19937_64 rng(13);
        auto uni = [&] { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
        Eigen::VectorXd a(n), b(n), c(n);
        for (long i = 0; i < n; ++i) {
            a[i] = uni();
            b[i] = uni();
            c[i] = uni();
        }
        auto loss = [&](const MlpModel& m) {
            BatchJets jets = m.evaluate(pts, 2);
            return a.dot(jets.value) + b.dot(jets.dt) + c.dot(jets.dtt);
        };
        ParamGradient grad = model.zero_gradient();
        model.backward(pts, a, b, c, grad);

        Eigen::VectorXd flat = model.flatten();
        std::mt19937_64 pick(17);
        const double h = 1e-6;
        for (int trial = 0; trial < 25; ++trial) {
            const long idx = static_cast<long>(pick() % static_cast<std::uint64_t>(flat.size()));
            MlpModel pert = model;
            Eigen::VectorXd fp = flat, fm = flat;
            fp[idx] += h;
            fm[idx] -= h;
            pert.unflatten(fp);
            const double lp = loss(pert);
            pert.unflatten(fm);
            const double lm = loss(pert);
            const double fd = (lp - lm) / (2 * h);
            // locate idx inside the layered gradient via flatten of the gradient
            MlpModel gmodel = model;
            for (int l = 0; l < gmodel.layer_count(); ++l) {
                gmodel.weight[static_cast<size_t>(l)] = grad.weight[static_cast<size_t>(l)];
                gmodel.bias[static_cast<size_t>(l)] = grad.bias[static_cast<size_t>(l)];
            }
            const double analytic = gmodel.flatten()[idx];
            CHECK(analytic == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("sgd and adam reduce a simple squared loss") {
    MlpModel model = init_model({2, 8, 1}, 23);
    std::vector<EvalPoint> pts = sample_points(1, 30, 29);
    auto loss_and_grad = [&](const MlpModel& m, ParamGradient* g) {
        BatchJets jets = m.evaluate(pts, 0);
        Eigen::VectorXd target(jets.value.size());
        for (long i = 0; i < target.size(); ++i)
            target[i] = std::sin(pts[static_cast<size_t>(i)].x);
        Eigen::VectorXd r = jets.value - target;
        if (g) m.backward(pts, 2.0 * r, Eigen::VectorXd(), Eigen::VectorXd(), *g);
        return r.squaredNorm();
    };
    SUBCASE("sgd") {
        double before = loss_and_grad(model, nullptr);
        for (int it = 0; it < 50; ++it) {
            ParamGradient g = model.zero_gradient();
            loss_and_grad(model, &g);
            sgd_step(model, g, 1e-3);
        }
        CHECK(loss_and_grad(model, nullptr) < before);
    }
    SUBCASE("adam") {
        double before = loss_and_grad(model, nullptr);
        AdamState state(model);
        for (int it = 0; it < 50; ++it) {
            ParamGradient g = model.zero_gradient();
            loss_and_grad(model, &g);
            adam_step(model, g, state, 1e-2);
        }
        CHECK(loss_and_grad(model, nullptr) < before);
    }
}

TEST_CASE("checkpoint round trip preserves everything") {
    MlpModel model = init_model({3, 6, 5, 1}, 77);
    const std::string path = "test_checkpoint_roundtrip.bin";
    save_checkpoint(model, 1234, path);
    long step = -1;
    MlpModel loaded = load_checkpoint(path, &step);
    CHECK(step == 1234);
    CHECK(loaded.widths == model.widths);
    CHECK(loaded.seed == model.seed);
    CHECK((loaded.flatten() - model.flatten()).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
    CHECK_THROWS(load_checkpoint(path));
}
