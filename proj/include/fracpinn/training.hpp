#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracpinn/residuals.hpp"

namespace fracpinn {

struct TrainOptions {
    long steps = 20000;
    double rate = 1e-3;
    std::string optimizer = "adam";  // or "sgd"
    long trace_every = 100;
    long snapshot_every = 2000;  // 0 disables intermediate snapshots
    double delta = 0.0;          // stop once E_G <= delta; 0 = run the full budget
    std::vector<int> widths;     // empty = [d+1, 32, 32, 1]
    std::uint64_t seed = 1;
};

struct TraceRow {
    long step = 0;
    double loss = 0.0;  // E_G^2, the trained objective
    double eg_interior = 0.0;
    double eg_initial = 0.0;
    double eg_boundary = 0.0;
    double eg_total = 0.0;
    // Total-error columns and squared ratios E[l,k]^2 / E_G[l+k,k]^2,
    // NaN when no reference was supplied.
    double e00 = 0.0, e10 = 0.0, e01 = 0.0;
    double ratio00 = 0.0, ratio10 = 0.0, ratio01 = 0.0;
};

struct TrainResult {
    MlpModel model;
    std::vector<TraceRow> trace;
    long steps_done = 0;
    double initial_eg = 0.0;
    double final_eg = 0.0;
    bool reached_delta = false;
    bool diverged = false;
};

using SnapshotCallback = std::function<void(long step, const MlpModel& model)>;

/// Full-batch deterministic minimization of E_G^2 for the evaluator's
/// problem. If ref is non-null the trace carries total-error and ratio
/// columns; snapshot (if set) fires at the cadence, at step 0 and at the end.
TrainResult train_model(const ResidualEvaluator& evaluator, const TrainOptions& options,
                        const ReferenceSolution* ref = nullptr,
                        const SnapshotCallback& snapshot = nullptr);

}  // namespace fracpinn
