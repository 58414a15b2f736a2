#pragma once

#include <array>
#include <string>
#include <vector>

#include "fracpinn/residuals.hpp"
#include "fracpinn/training.hpp"

namespace fracpinn {

struct StudySettings {
    std::string checkpoint_dir;  // where train-pinn left its snapshots
    std::vector<std::array<int, 2>> pairs = {{0, 0}, {1, 0}, {0, 1}};  // (ell, k)
    int hk = 1;                        // H^k domination column order
    std::vector<double> cutoff_eps;    // empty disables the cutoff table
    std::vector<double> kappa_eps = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    double s = 1.0;                    // fractional order for operator sweeps
};

/// Parsed experiment configuration (schema 1). The basis/grid/problem
/// objects are built on demand from this plain record.
struct ExperimentConfig {
    DomainSpec domain;
    int modes = 8;          // J
    int quad_nodes = 0;     // M per axis; 0 = smallest exact choice
    int time_intervals = 16;  // Q

    double alpha = 1.0;
    std::vector<std::pair<int, double>> initial;  // (mode index, coefficient)
    ForcingSpec forcing;
    VelocitySpec velocity;
    int solver_steps = 256;

    ResidualConfig residual;
    TrainOptions train;
    StudySettings study;
};

ExperimentConfig load_config(const std::string& path);

SpectralBasis make_basis(const ExperimentConfig& config);
QuadratureGrid make_grid(const ExperimentConfig& config, const SpectralBasis& basis);
PdeProblem make_problem(const ExperimentConfig& config, const SpectralBasis& basis);

/// Index of the mode with axis indices (jx, jy) in the sorted basis.
int find_mode(const SpectralBasis& basis, int jx, int jy);

/// Fixed 17-significant-digit decimal form (round-trips the double exactly).
std::string format_sig(double v);

/// Write-to-temp-then-rename, so readers never observe partial files.
void atomic_write_text(const std::string& path, const std::string& content);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string error_report_json(const ErrorReport& report);

}  // namespace fracpinn
