#include "fracpinn/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fracpinn {

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& context) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) known = true;
        if (!known)
            throw std::invalid_argument("config: unknown key \"" + it.key() + "\" in " + context);
    }
}

TimeTag parse_tag(const json& obj, const std::string& context) {
    require_keys(obj, {"constant", "amplitude", "frequency", "phase"}, context);
    TimeTag tag;
    tag.constant = obj.value("constant", 0.0);
    tag.amplitude = obj.value("amplitude", 0.0);
    tag.frequency = obj.value("frequency", 0.0);
    tag.phase = obj.value("phase", 0.0);
    return tag;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object() || j.value("schema", 0) != 1)
        throw std::invalid_argument("config: expected a JSON object with \"schema\": 1");
    require_keys(j,
                 {"schema", "domain", "modes", "quad_nodes", "time_intervals", "alpha", "eps",
                  "ell", "k", "policy", "eval_nodes", "initial", "forcing", "velocity",
                  "solver_steps", "train", "study"},
                 "top level");

    ExperimentConfig c;
    if (j.contains("domain")) {
        const json& d = j["domain"];
        require_keys(d, {"dim", "final_time"}, "domain");
        c.domain.dim = d.value("dim", 1);
        c.domain.final_time = d.value("final_time", 1.0);
    }
    c.domain.validate();
    c.modes = j.value("modes", 8);
    if (c.modes < 1) throw std::invalid_argument("config: modes must be >= 1");
    c.quad_nodes = j.value("quad_nodes", 0);
    c.time_intervals = j.value("time_intervals", 16);
    if (c.time_intervals < 1) throw std::invalid_argument("config: time_intervals must be >= 1");
    c.alpha = j.value("alpha", 1.0);

    c.residual.eps = j.value("eps", 0.1);
    c.residual.ell = j.value("ell", 0);
    c.residual.k = j.value("k", 0);
    c.residual.eval_nodes = j.value("eval_nodes", 0);
    const std::string policy = j.value("policy", "A");
    if (policy != "A" && policy != "B")
        throw std::invalid_argument("config: policy must be \"A\" or \"B\"");
    c.residual.policy = policy[0];
    c.residual.validate();

    for (const json& term : j.value("initial", json::array())) {
        require_keys(term, {"mode", "value"}, "initial");
        c.initial.emplace_back(term.at("mode").get<int>(), term.at("value").get<double>());
    }
    for (const json& term : j.value("forcing", json::array())) {
        require_keys(term, {"mode", "constant", "amplitude", "frequency", "phase"}, "forcing");
        ForcingTerm f;
        f.mode = term.at("mode").get<int>();
        json tag = term;
        tag.erase("mode");
        f.tag = parse_tag(tag, "forcing");
        c.forcing.terms.push_back(f);
    }
    if (j.contains("velocity")) {
        const json& v = j["velocity"];
        require_keys(v, {"stream", "modulation"}, "velocity");
        for (const json& s : v.value("stream", json::array())) {
            require_keys(s, {"jx", "jy", "coeff"}, "velocity.stream");
            c.velocity.stream.push_back(
                {s.value("jx", 1), s.value("jy", 1), s.at("coeff").get<double>()});
        }
        c.velocity.modulation = v.contains("modulation")
                                    ? parse_tag(v["modulation"], "velocity.modulation")
                                    : TimeTag{1.0, 0.0, 0.0, 0.0};
    }
    c.solver_steps = j.value("solver_steps", 256);
    if (c.solver_steps < 1) throw std::invalid_argument("config: solver_steps must be >= 1");

    if (j.contains("train")) {
        const json& t = j["train"];
        require_keys(t,
                     {"steps", "rate", "optimizer", "trace_every", "snapshot_every", "delta",
                      "widths", "seed"},
                     "train");
        c.train.steps = t.value("steps", 20000L);
        c.train.rate = t.value("rate", 1e-3);
        c.train.optimizer = t.value("optimizer", std::string("adam"));
        c.train.trace_every = t.value("trace_every", 100L);
        c.train.snapshot_every = t.value("snapshot_every", 2000L);
        c.train.delta = t.value("delta", 0.0);
        c.train.widths = t.value("widths", std::vector<int>{});
        c.train.seed = t.value("seed", std::uint64_t{1});
    }
    if (j.contains("study")) {
        const json& s = j["study"];
        require_keys(s, {"checkpoint_dir", "pairs", "hk", "cutoff_eps", "kappa_eps", "s"},
                     "study");
        c.study.checkpoint_dir = s.value("checkpoint_dir", std::string());
        if (s.contains("pairs")) {
            c.study.pairs.clear();
            for (const json& p : s["pairs"]) {
                if (!p.is_array() || p.size() != 2)
                    throw std::invalid_argument("config: study.pairs entries must be [ell, k]");
                c.study.pairs.push_back({p[0].get<int>(), p[1].get<int>()});
            }
        }
        c.study.hk = s.value("hk", 1);
        c.study.cutoff_eps = s.value("cutoff_eps", std::vector<double>{});
        c.study.kappa_eps = s.value("kappa_eps", c.study.kappa_eps);
        c.study.s = s.value("s", 1.0);
        for (size_t i = 1; i < c.study.kappa_eps.size(); ++i)
            if (!(c.study.kappa_eps[i] < c.study.kappa_eps[i - 1]))
                throw std::invalid_argument("config: kappa_eps sweep must be strictly decreasing");
    }
    return c;
}

SpectralBasis make_basis(const ExperimentConfig& config) {
    return build_basis(config.domain, config.modes);
}

QuadratureGrid make_grid(const ExperimentConfig& config, const SpectralBasis& basis) {
    int m = config.quad_nodes;
    if (m == 0) {
        int jmax = 0;
        for (const Mode& mode : basis.modes) jmax = std::max({jmax, mode.jx, mode.jy});
        m = 2 * jmax + 1;
    }
    return build_grid(basis, m, config.time_intervals);
}

PdeProblem make_problem(const ExperimentConfig& config, const SpectralBasis& basis) {
    PdeProblem p;
    p.basis = &basis;
    p.alpha = config.alpha;
    p.initial_coeff = Eigen::VectorXd::Zero(basis.size());
    for (const auto& [mode, value] : config.initial) {
        if (mode < 0 || mode >= basis.size())
            throw std::invalid_argument("config: initial mode index out of range");
        p.initial_coeff[mode] += value;
    }
    for (const ForcingTerm& term : config.forcing.terms)
        if (term.mode < 0 || term.mode >= basis.size())
            throw std::invalid_argument("config: forcing mode index out of range");
    p.velocity = config.velocity;
    p.forcing = config.forcing;
    p.validate();
    return p;
}

int find_mode(const SpectralBasis& basis, int jx, int jy) {
    for (int m = 0; m < basis.size(); ++m)
        if (basis.modes[static_cast<size_t>(m)].jx == jx &&
            basis.modes[static_cast<size_t>(m)].jy == jy)
            return m;
    throw std::invalid_argument("find_mode: mode not in basis");
}

std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("write_csv: row width mismatch");
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    atomic_write_text(path, out.str());
}

std::string error_report_json(const ErrorReport& report) {
    json j;
    j["eg_interior"] = report.eg_interior;
    j["eg_initial"] = report.eg_initial;
    j["eg_boundary"] = report.eg_boundary;
    j["eg_total"] = report.eg_total;
    if (report.total_error) j["total_error"] = *report.total_error;
    j["per_time_residual_norm"] = report.per_time_residual_norm;
    j["initial_per_order"] = report.initial_per_order;
    j["eps"] = report.eps;
    j["ell"] = report.ell;
    j["k"] = report.k;
    j["policy"] = std::string(1, report.policy);
    if (report.step >= 0) j["step"] = report.step;
    if (!report.stencil_note.empty()) j["stencil_note"] = report.stencil_note;
    return j.dump(2) + "\n";
}

}  // namespace fracpinn
