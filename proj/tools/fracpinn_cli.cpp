#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracpinn/config.hpp"
#include "fracpinn/special.hpp"
#include "fracpinn/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fracpinn;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string policy;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON, schema 1)")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory")->required();
    cmd->add_option("--policy", args.policy, "initial-residual policy override (A or B)")
        ->check(CLI::IsMember({"A", "B"}));
    cmd->add_option("--seed", args.seed, "seed override")->each([&](const std::string&) {
        args.seed_set = true;
    });
}

ExperimentConfig load_with_overrides(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args.config_path);
    if (!args.policy.empty()) cfg.residual.policy = args.policy[0];
    if (args.seed_set) cfg.train.seed = args.seed;
    fs::create_directories(args.out_dir);
    return cfg;
}

void write_metadata(const std::string& out_dir, const std::string& command, double seconds) {
    json j;
    j["command"] = command;
    j["wall_seconds"] = seconds;
    j["written_at"] = static_cast<long>(std::chrono::duration_cast<std::chrono::seconds>(
                                            std::chrono::system_clock::now().time_since_epoch())
                                            .count());
    atomic_write_text(out_dir + "/metadata.json", j.dump(2) + "\n");
}

Eigen::VectorXd random_coeff(std::mt19937_64& rng, int n) {
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i)
        c[i] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    return c;
}

// ---------------------------------------------------------------- verify

int cmd_verify_operators(const CommonArgs& args, bool fault) {
    ExperimentConfig cfg = load_with_overrides(args);
    SpectralBasis basis = make_basis(cfg);
    QuadratureGrid grid = make_grid(cfg, basis);
    std::mt19937_64 rng(cfg.train.seed + 17);
    const double fault_scale = fault ? 1.01 : 1.0;

    std::vector<std::vector<std::string>> rows;
    bool all_pass = true;
    auto add_check = [&](const std::string& name, double lhs, double rhs, bool pass) {
        rows.push_back({name, format_sig(lhs), format_sig(rhs), pass ? "1" : "0"});
        all_pass = all_pass && pass;
    };

    {
        const double sum = grid.interior_weights.sum();
        add_check("quadrature_weight_sum", sum, basis.domain.volume(),
                  std::abs(sum - basis.domain.volume()) <= 1e-12);
    }
    {
        SpectralTransform tr(basis, grid);
        const double dev =
            (tr.proj * tr.synth - Eigen::MatrixXd::Identity(basis.size(), basis.size()))
                .cwiseAbs()
                .maxCoeff();
        add_check("gram_identity_deviation", dev, 1e-10, dev <= 1e-10);
    }
    {
        // Diagonal operators commute; sequential application agrees to rounding.
        SpectralField f(basis, random_coeff(rng, basis.size()));
        using Op = std::function<SpectralField(const SpectralField&)>;
        std::vector<Op> ops;
        for (double s : {0.5, 1.0, 1.5})
            ops.push_back([s](const SpectralField& g) { return frac_laplacian(g, s); });
        for (double eps : {0.1, 0.01})
            ops.push_back([eps, fault_scale](const SpectralField& g) {
                SpectralField h = apply_mollifier(g, eps);
                h.coeff *= fault_scale;
                return h;
            });
        ops.push_back([](const SpectralField& g) { return heat_semigroup(g, 0.3); });
        ops.push_back([](const SpectralField& g) { return frac_laplacian(g, 2.0); });
        double worst = 0.0;
        for (size_t a = 0; a < ops.size(); ++a)
            for (size_t b = a + 1; b < ops.size(); ++b) {
                Eigen::VectorXd ab = ops[a](ops[b](f)).coeff;
                Eigen::VectorXd ba = ops[b](ops[a](f)).coeff;
                const double scale = std::max(ab.cwiseAbs().maxCoeff(), 1e-300);
                worst = std::max(worst, (ab - ba).cwiseAbs().maxCoeff() / scale);
            }
        add_check("commutation_max_rel_dev", worst, 1e-15, worst <= 1e-15);
    }
    {
        double mmin = 1.0, mmax = 0.0;
        for (double eps : {0.1, 0.01, 0.001}) {
            for (int i = 0; i <= 160; ++i) {
                const double lam = std::pow(10.0, 8.0 * i / 160.0);
                if (eps * lam > 700.0) continue;  // exp(-eps*lam) underflows
                const double m = fault_scale * mollifier_multiplier(eps, lam);
                mmin = std::min(mmin, m);
                mmax = std::max(mmax, m);
            }
        }
        add_check("multiplier_positive_min", mmin, 0.0, mmin > 0.0);
        add_check("multiplier_upper_max", mmax, 1.0, mmax <= 1.0);
        // the multiplier approaches 2 from below at the spectral origin
        const double mlimit = fault_scale * mollifier_multiplier(0.1, 1e-12);
        add_check("multiplier_origin_limit", mlimit, 2.0, mlimit < 2.0);
    }
    {
        double worst = 0.0;
        SpectralField f(basis, random_coeff(rng, basis.size()));
        for (double s : {0.25, 0.5, 1.0, 1.5, 1.75}) {
            Eigen::VectorXd spectral = frac_laplacian(f, s).coeff;
            Eigen::VectorXd integral = frac_laplacian_integral(f, s).coeff;
            for (int j = 0; j < basis.size(); ++j)
                worst = std::max(worst,
                                 std::abs(integral[j] - spectral[j]) / std::abs(spectral[j]));
        }
        add_check("integral_representation_rel_dev", worst, 1e-8, worst <= 1e-8);
    }
    {
        double worst = 0.0;
        for (double s : {0.25, 0.5, 1.0, 1.5, 1.75})
            worst = std::max(worst, std::abs(c_s_constant(s) - c_s_closed_form(s)));
        add_check("c_s_closed_form_dev", worst, 1e-10, worst <= 1e-10);
    }
    {
        SpectralField f(basis, random_coeff(rng, basis.size()));
        Eigen::VectorXd a = heat_semigroup(heat_semigroup(f, 0.2), 0.3).coeff;
        Eigen::VectorXd b = heat_semigroup(f, 0.5).coeff;
        const double dev = (a - b).cwiseAbs().maxCoeff() /
                           std::max(b.cwiseAbs().maxCoeff(), 1e-300);
        add_check("semigroup_composition_rel_dev", dev, 1e-13, dev <= 1e-13);
    }

    // kappa sweep (also exported as its own table)
    {
        std::vector<std::vector<std::string>> kappa_rows;
        std::vector<double> values;
        for (double eps : cfg.study.kappa_eps) {
            KappaResult kr = kappa(eps, basis, 1000000);
            values.push_back(kr.value);
            kappa_rows.push_back({format_sig(eps), format_sig(kr.value),
                                  format_sig(kr.tail_bound)});
        }
        write_csv(args.out_dir + "/kappa.csv", {"eps", "kappa", "tail_bound"}, kappa_rows);
        bool decreasing = true;
        for (size_t i = 1; i < values.size(); ++i)
            decreasing = decreasing && values[i] < values[i - 1];
        add_check("kappa_strictly_decreasing", decreasing ? 1.0 : 0.0, 1.0, decreasing);
        if (values.size() >= 2)
            add_check("kappa_last_below_half_first", values.back(), values.front() / 2.0,
                      values.back() < values.front() / 2.0);
    }
    {
        long violations = 0;
        for (int trial = 0; trial < 20; ++trial) {
            SpectralField f(basis, random_coeff(rng, basis.size()));
            for (double s : {0.0, 0.5, 1.0})
                for (double eps : {0.1, 0.01})
                    if (!mollifier_convergence_bound_check(f, eps, s).holds) ++violations;
        }
        add_check("convergence_bound_violations", static_cast<double>(violations), 0.0,
                  violations == 0);
    }

    write_csv(args.out_dir + "/properties.csv", {"check", "lhs", "rhs", "pass"}, rows);
    std::cout << (all_pass ? "all checks passed" : "some checks FAILED") << "\n";
    return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------- solve

int cmd_solve_reference(const CommonArgs& args) {
    ExperimentConfig cfg = load_with_overrides(args);
    SpectralBasis basis = make_basis(cfg);
    QuadratureGrid grid = make_grid(cfg, basis);
    PdeProblem problem = make_problem(cfg, basis);
    ReferenceSolution sol = solve_reference(problem, grid, cfg.solver_steps);

    std::vector<std::string> header = {"time"};
    for (int j = 0; j < basis.size(); ++j) header.push_back("c" + std::to_string(j));
    std::vector<std::vector<std::string>> rows;
    for (int q = 0; q < sol.times.size(); ++q) {
        std::vector<std::string> row = {format_sig(sol.times[q])};
        for (int j = 0; j < basis.size(); ++j) row.push_back(format_sig(sol.coeffs(q, j)));
        rows.push_back(std::move(row));
    }
    write_csv(args.out_dir + "/snapshots.csv", header, rows);

    const std::vector<double> s_list = {0.0, 1.0, 2.0, 4.0};
    std::vector<std::vector<std::string>> norm_rows;
    for (int q = 0; q < sol.times.size(); ++q) {
        SpectralField f(basis, sol.coeff_at(q));
        std::vector<std::string> row = {format_sig(sol.times[q])};
        for (double s : s_list) row.push_back(format_sig(sobolev_norm(f, s)));
        norm_rows.push_back(std::move(row));
    }
    write_csv(args.out_dir + "/norms.csv", {"time", "s0", "s1", "s2", "s4"}, norm_rows);

    SpectralField final_field(basis, sol.coeff_at(static_cast<int>(sol.times.size()) - 1));
    std::cout << "final-time Sobolev norms:";
    for (double s : s_list) std::cout << " s=" << s << ": " << sobolev_norm(final_field, s);
    std::cout << "\n";

    json summary;
    summary["scheme"] = sol.scheme;
    summary["steps_taken"] = sol.steps_taken;
    summary["max_coeff"] = sol.max_coeff;
    atomic_write_text(args.out_dir + "/summary.json", summary.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- train

std::string checkpoint_name(long step) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "checkpoint_%06ld.bin", step);
    return buf;
}

int cmd_train_pinn(const CommonArgs& args) {
    ExperimentConfig cfg = load_with_overrides(args);
    SpectralBasis basis = make_basis(cfg);
    QuadratureGrid grid = make_grid(cfg, basis);
    PdeProblem problem = make_problem(cfg, basis);
    ReferenceSolution ref = solve_reference(problem, grid, cfg.solver_steps);
    ResidualEvaluator evaluator(problem, grid, cfg.residual);

    auto snapshot = [&](long step, const MlpModel& model) {
        save_checkpoint(model, step, args.out_dir + "/" + checkpoint_name(step));
    };
    TrainResult result = train_model(evaluator, cfg.train, &ref, snapshot);
    save_checkpoint(result.model, result.steps_done, args.out_dir + "/checkpoint_final.bin");

    std::vector<std::vector<std::string>> rows;
    for (const TraceRow& r : result.trace)
        rows.push_back({std::to_string(r.step), format_sig(r.loss), format_sig(r.eg_interior),
                        format_sig(r.eg_initial), format_sig(r.eg_boundary),
                        format_sig(r.eg_total), format_sig(r.e00), format_sig(r.e10),
                        format_sig(r.e01), format_sig(r.ratio00), format_sig(r.ratio10),
                        format_sig(r.ratio01)});
    write_csv(args.out_dir + "/trace.csv",
              {"step", "loss", "eg_interior", "eg_initial", "eg_boundary", "eg_total", "e00",
               "e10", "e01", "ratio00", "ratio10", "ratio01"},
              rows);

    json summary;
    summary["initial_eg"] = result.initial_eg;
    summary["final_eg"] = result.final_eg;
    summary["reduction_factor"] =
        result.final_eg > 0.0 ? result.initial_eg / result.final_eg : 0.0;
    summary["steps_done"] = result.steps_done;
    summary["reached_delta"] = result.reached_delta;
    summary["diverged"] = result.diverged;
    summary["final_e00"] = result.trace.back().e00;
    summary["policy"] = std::string(1, cfg.residual.policy);
    summary["seed"] = cfg.train.seed;
    atomic_write_text(args.out_dir + "/summary.json", summary.dump(2) + "\n");

    std::cout << "E_G " << result.initial_eg << " -> " << result.final_eg << " in "
              << result.steps_done << " steps\n";
    if (result.diverged) {
        std::cerr << "training diverged (non-finite loss); last good checkpoint retained\n";
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------- study

int cmd_error_study(const CommonArgs& args) {
    ExperimentConfig cfg = load_with_overrides(args);
    if (cfg.study.checkpoint_dir.empty()) {
        std::cerr << "error-study: config is missing study.checkpoint_dir\n";
        return 1;
    }
    if (!fs::is_directory(cfg.study.checkpoint_dir)) {
        std::cerr << "error-study: checkpoint directory " << cfg.study.checkpoint_dir
                  << " does not exist\n";
        return 1;
    }
    std::vector<std::pair<long, std::string>> checkpoints;
    const std::regex pattern("checkpoint_([0-9]+)\\.bin");
    for (const auto& entry : fs::directory_iterator(cfg.study.checkpoint_dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (std::regex_match(name, m, pattern))
            checkpoints.emplace_back(std::stol(m[1].str()), entry.path().string());
    }
    if (checkpoints.empty()) {
        std::cerr << "error-study: no checkpoint_*.bin files in " << cfg.study.checkpoint_dir
                  << "\n";
        return 1;
    }
    std::sort(checkpoints.begin(), checkpoints.end());

    SpectralBasis basis = make_basis(cfg);
    QuadratureGrid grid = make_grid(cfg, basis);
    PdeProblem problem = make_problem(cfg, basis);
    ReferenceSolution ref = solve_reference(problem, grid, cfg.solver_steps);

    std::vector<std::unique_ptr<ResidualEvaluator>> eg_evals;
    std::vector<std::string> header = {"step"};
    for (const auto& [ell, k] : cfg.study.pairs) {
        ResidualConfig rc = cfg.residual;
        rc.ell = ell + k;
        rc.k = k;
        eg_evals.push_back(std::make_unique<ResidualEvaluator>(problem, grid, rc));
        const std::string tag = "l" + std::to_string(ell) + "k" + std::to_string(k);
        header.push_back("eg_" + tag);
        header.push_back("e_" + tag);
        header.push_back("ratio_" + tag);
    }
    header.push_back("hk_norm");
    header.push_back("hk_total");
    header.push_back("hk_ratio");
    ResidualEvaluator base_eval(problem, grid, cfg.residual);

    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<double>> ratio_cols(cfg.study.pairs.size());
    for (const auto& [step, path] : checkpoints) {
        MlpModel model = load_checkpoint(path);
        if (model.space_dim() != basis.domain.dim) {
            std::cerr << "error-study: checkpoint " << path << " has input dimension "
                      << model.space_dim() << ", expected " << basis.domain.dim << "\n";
            return 1;
        }
        std::vector<std::string> row = {std::to_string(step)};
        for (size_t p = 0; p < cfg.study.pairs.size(); ++p) {
            const auto& [ell, k] = cfg.study.pairs[p];
            const double eg = eg_evals[p]->generalization_error(model).eg_total;
            const double e = base_eval.total_error(model, ref, ell, k);
            const double ratio = (e * e) / (eg * eg);
            ratio_cols[p].push_back(ratio);
            row.push_back(format_sig(eg));
            row.push_back(format_sig(e));
            row.push_back(format_sig(ratio));
        }
        HkReport hk = base_eval.hk_domination_check(model, ref, cfg.study.hk);
        row.push_back(format_sig(hk.hk_norm));
        row.push_back(format_sig(hk.total_error));
        row.push_back(format_sig(hk.ratio));
        rows.push_back(std::move(row));
    }
    write_csv(args.out_dir + "/ratios.csv", header, rows);

    if (!cfg.study.cutoff_eps.empty()) {
        if (basis.domain.dim != 1) {
            std::cerr << "error-study: the cutoff table needs a 1D configuration\n";
            return 1;
        }
        SpectralField psi(basis, Eigen::VectorXd::Zero(basis.size()));
        for (const auto& [mode, value] : cfg.initial) psi.coeff[mode] += value;
        std::vector<std::vector<std::string>> crows;
        for (const CutoffRow& r : cutoff_comparison(psi, cfg.study.cutoff_eps))
            crows.push_back({format_sig(r.eps), format_sig(r.mollifier_norm),
                             format_sig(r.cutoff_norm)});
        write_csv(args.out_dir + "/cutoff.csv", {"eps", "mollifier_norm", "cutoff_norm"}, crows);
    }

    json summary;
    for (size_t p = 0; p < cfg.study.pairs.size(); ++p) {
        std::vector<double> sorted = ratio_cols[p];
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[sorted.size() / 2];
        const double maxv = sorted.back();
        const std::string tag = "l" + std::to_string(cfg.study.pairs[p][0]) + "k" +
                                std::to_string(cfg.study.pairs[p][1]);
        summary["ratio_" + tag + "_median"] = median;
        summary["ratio_" + tag + "_max"] = maxv;
        summary["ratio_" + tag + "_bounded"] = maxv <= 10.0 * median;
    }
    atomic_write_text(args.out_dir + "/summary.json", summary.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral fractional-diffusion PINN experiment driver"};
    app.require_subcommand(1);

    CommonArgs verify_args, solve_args, train_args, study_args;
    bool fault = false;

    CLI::App* verify = app.add_subcommand("verify-operators", "operator property battery");
    add_common(verify, verify_args);
    verify->add_flag("--fault", fault, "fault-injection hook: scales the mollifier by 1.01");

    CLI::App* solve = app.add_subcommand("solve-reference", "spectral reference solve");
    add_common(solve, solve_args);

    CLI::App* train = app.add_subcommand("train-pinn", "train the residual-loss network");
    add_common(train, train_args);

    CLI::App* study = app.add_subcommand("error-study", "total-error vs loss study");
    add_common(study, study_args);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto start = std::chrono::steady_clock::now();
        int rc = 1;
        std::string name;
        CommonArgs* used = nullptr;
        if (verify->parsed()) {
            name = "verify-operators";
            used = &verify_args;
            rc = cmd_verify_operators(verify_args, fault);
        } else if (solve->parsed()) {
            name = "solve-reference";
            used = &solve_args;
            rc = cmd_solve_reference(solve_args);
        } else if (train->parsed()) {
            name = "train-pinn";
            used = &train_args;
            rc = cmd_train_pinn(train_args);
        } else if (study->parsed()) {
            name = "error-study";
            used = &study_args;
            rc = cmd_error_study(study_args);
        }
        if (used && fs::is_directory(used->out_dir)) {
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                              start)
                                    .count();
            write_metadata(used->out_dir, name, secs);
        }
        return rc;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
