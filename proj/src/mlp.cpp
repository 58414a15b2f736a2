#include "fracpinn/mlp.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace fracpinn {

namespace {

void check_widths(const std::vector<int>& widths) {
    if (widths.size() < 2) throw std::invalid_argument("MlpModel: need at least two layer widths");
    if (widths.front() != 2 && widths.front() != 3)
        throw std::invalid_argument("MlpModel: input width must be d+1 with d in {1,2}");
    if (widths.back() != 1) throw std::invalid_argument("MlpModel: output width must be 1");
    for (int w : widths)
        if (w < 1) throw std::invalid_argument("MlpModel: widths must be positive");
}

inline void input_jets(const EvalPoint& p, int in_dim, int tangent /*0=t,1=x,2=y*/,
                       Eigen::VectorXd& z, Eigen::VectorXd& zd) {
    z.resize(in_dim);
    zd = Eigen::VectorXd::Zero(in_dim);
    if (in_dim == 2) {
        z << p.x, p.t;
        zd[tangent == 0 ? 1 : 0] = 1.0;
    } else {
        z << p.x, p.y, p.t;
        if (tangent == 0) zd[2] = 1.0;
        else if (tangent == 1) zd[0] = 1.0;
        else zd[1] = 1.0;
    }
}

}  // namespace

void ParamGradient::set_zero() {
    for (auto& w : weight) w.setZero();
    for (auto& b : bias) b.setZero();
}

bool ParamGradient::all_finite() const {
    for (const auto& w : weight)
        if (!w.allFinite()) return false;
    for (const auto& b : bias)
        if (!b.allFinite()) return false;
    return true;
}

double ParamGradient::squared_norm() const {
    double acc = 0.0;
    for (const auto& w : weight) acc += w.squaredNorm();
    for (const auto& b : bias) acc += b.squaredNorm();
    return acc;
}

ParamGradient& ParamGradient::operator+=(const ParamGradient& other) {
    for (size_t l = 0; l < weight.size(); ++l) weight[l] += other.weight[l];
    for (size_t l = 0; l < bias.size(); ++l) bias[l] += other.bias[l];
    return *this;
}

ParamGradient& ParamGradient::operator*=(double s) {
    for (auto& w : weight) w *= s;
    for (auto& b : bias) b *= s;
    return *this;
}

long MlpModel::parameter_count() const {
    long n = 0;
    for (size_t l = 0; l < weight.size(); ++l)
        n += weight[l].rows() * weight[l].cols() + bias[l].size();
    return n;
}

BatchJets MlpModel::evaluate(const std::vector<EvalPoint>& pts, int order_t,
                             bool spatial_grad) const {
    if (order_t < 0 || order_t > 2)
        throw std::invalid_argument("MlpModel::evaluate: order_t must be in {0,1,2}");
    const int L = layer_count();
    const int in_dim = widths.front();
    const int n = static_cast<int>(pts.size());

    BatchJets out;
    out.value.resize(n);
    if (order_t >= 1) out.dt.resize(n);
    if (order_t >= 2) out.dtt.resize(n);
    if (spatial_grad) {
        out.dx.resize(n);
        if (in_dim == 3) out.dy.resize(n);
    }

    Eigen::VectorXd z, zd, zdd, a, ad, add;
    for (int i = 0; i < n; ++i) {
        const EvalPoint& p = pts[static_cast<size_t>(i)];
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.t))
            throw std::invalid_argument("MlpModel::evaluate: non-finite input point");

        // time jets
        input_jets(p, in_dim, 0, z, zd);
        zdd = Eigen::VectorXd::Zero(in_dim);
        for (int l = 0; l < L; ++l) {
            a = weight[static_cast<size_t>(l)] * z + bias[static_cast<size_t>(l)];
            ad = weight[static_cast<size_t>(l)] * zd;
            add = weight[static_cast<size_t>(l)] * zdd;
            if (l + 1 == L) {
                z = a; zd = ad; zdd = add;
            } else {
                const Eigen::ArrayXd th = a.array().tanh();
                const Eigen::ArrayXd s1 = 1.0 - th * th;
                const Eigen::ArrayXd s2 = -2.0 * th * s1;
                z = th.matrix();
                zdd = (s2 * ad.array() * ad.array() + s1 * add.array()).matrix();
                zd = (s1 * ad.array()).matrix();
            }
        }
        out.value[i] = z[0];
        if (order_t >= 1) out.dt[i] = zd[0];
        if (order_t >= 2) out.dtt[i] = zdd[0];

        if (spatial_grad) {
            for (int axis = 0; axis < in_dim - 1; ++axis) {
                input_jets(p, in_dim, 1 + axis, z, zd);
                for (int l = 0; l < L; ++l) {
                    a = weight[static_cast<size_t>(l)] * z + bias[static_cast<size_t>(l)];
                    ad = weight[static_cast<size_t>(l)] * zd;
                    if (l + 1 == L) {
                        z = a; zd = ad;
                    } else {
                        const Eigen::ArrayXd th = a.array().tanh();
                        zd = ((1.0 - th * th) * ad.array()).matrix();
                        z = th.matrix();
                    }
                }
                if (axis == 0) out.dx[i] = zd[0];
                else out.dy[i] = zd[0];
            }
        }
    }
    return out;
}

void MlpModel::backward(const std::vector<EvalPoint>& pts, const Eigen::VectorXd& value_bar,
                        const Eigen::VectorXd& dt_bar, const Eigen::VectorXd& dtt_bar,
                        ParamGradient& grad) const {
    const int L = layer_count();
    const int in_dim = widths.front();
    const int n = static_cast<int>(pts.size());
    const bool has_v = value_bar.size() > 0;
    const bool has_d = dt_bar.size() > 0;
    const bool has_dd = dtt_bar.size() > 0;

    std::vector<Eigen::VectorXd> z(static_cast<size_t>(L) + 1), zd(static_cast<size_t>(L) + 1),
        zdd(static_cast<size_t>(L) + 1), a(static_cast<size_t>(L)), ad(static_cast<size_t>(L)),
        add(static_cast<size_t>(L));

    for (int i = 0; i < n; ++i) {
        const EvalPoint& p = pts[static_cast<size_t>(i)];
        input_jets(p, in_dim, 0, z[0], zd[0]);
        zdd[0] = Eigen::VectorXd::Zero(in_dim);
        for (int l = 0; l < L; ++l) {
            const size_t sl = static_cast<size_t>(l);
            a[sl] = weight[sl] * z[sl] + bias[sl];
            ad[sl] = weight[sl] * zd[sl];
            add[sl] = weight[sl] * zdd[sl];
            if (l + 1 == L) {
                z[sl + 1] = a[sl]; zd[sl + 1] = ad[sl]; zdd[sl + 1] = add[sl];
            } else {
                const Eigen::ArrayXd th = a[sl].array().tanh();
                const Eigen::ArrayXd s1 = 1.0 - th * th;
                const Eigen::ArrayXd s2 = -2.0 * th * s1;
                z[sl + 1] = th.matrix();
                zd[sl + 1] = (s1 * ad[sl].array()).matrix();
                zdd[sl + 1] = (s2 * ad[sl].array().square() + s1 * add[sl].array()).matrix();
            }
        }

        // adjoints of (z, zd, zdd) entering each layer from above
        Eigen::VectorXd u, v, w;
        {
            const size_t sl = static_cast<size_t>(L - 1);
            const double pbar = has_v ? value_bar[i] : 0.0;
            const double qbar = has_d ? dt_bar[i] : 0.0;
            const double rbar = has_dd ? dtt_bar[i] : 0.0;
            grad.weight[sl].noalias() += pbar * z[sl].transpose();
            if (qbar != 0.0) grad.weight[sl].noalias() += qbar * zd[sl].transpose();
            if (rbar != 0.0) grad.weight[sl].noalias() += rbar * zdd[sl].transpose();
            grad.bias[sl][0] += pbar;
            u = weight[sl].transpose() * Eigen::VectorXd::Constant(1, pbar);
            v = weight[sl].transpose() * Eigen::VectorXd::Constant(1, qbar);
            w = weight[sl].transpose() * Eigen::VectorXd::Constant(1, rbar);
        }
        for (int l = L - 2; l >= 0; --l) {
            const size_t sl = static_cast<size_t>(l);
            const Eigen::ArrayXd th = z[sl + 1].array();  // tanh(a)
            const Eigen::ArrayXd s1 = 1.0 - th * th;
            const Eigen::ArrayXd s2 = -2.0 * th * s1;
            const Eigen::ArrayXd s3 = -2.0 * s1 * s1 + 4.0 * th * th * s1;
            const Eigen::ArrayXd adot = ad[sl].array();
            const Eigen::ArrayXd addot = add[sl].array();

            const Eigen::VectorXd pvec =
                (u.array() * s1 + v.array() * s2 * adot +
                 w.array() * (s3 * adot.square() + s2 * addot)).matrix();
            const Eigen::VectorXd qvec =
                (v.array() * s1 + w.array() * 2.0 * s2 * adot).matrix();
            const Eigen::VectorXd rvec = (w.array() * s1).matrix();

            grad.weight[sl].noalias() += pvec * z[sl].transpose();
            grad.weight[sl].noalias() += qvec * zd[sl].transpose();
            grad.weight[sl].noalias() += rvec * zdd[sl].transpose();
            grad.bias[sl] += pvec;
            u = weight[sl].transpose() * pvec;
            v = weight[sl].transpose() * qvec;
            w = weight[sl].transpose() * rvec;
        }
    }
}

ParamGradient MlpModel::zero_gradient() const {
    ParamGradient g;
    for (size_t l = 0; l < weight.size(); ++l) {
        g.weight.push_back(Eigen::MatrixXd::Zero(weight[l].rows(), weight[l].cols()));
        g.bias.push_back(Eigen::VectorXd::Zero(bias[l].size()));
    }
    return g;
}

Eigen::VectorXd MlpModel::flatten() const {
    Eigen::VectorXd flat(parameter_count());
    long k = 0;
    for (size_t l = 0; l < weight.size(); ++l) {
        for (long r = 0; r < weight[l].rows(); ++r)
            for (long c = 0; c < weight[l].cols(); ++c) flat[k++] = weight[l](r, c);
        for (long r = 0; r < bias[l].size(); ++r) flat[k++] = bias[l][r];
    }
    return flat;
}

void MlpModel::unflatten(const Eigen::VectorXd& flat) {
    if (flat.size() != parameter_count())
        throw std::invalid_argument("MlpModel::unflatten: parameter count mismatch");
    long k = 0;
    for (size_t l = 0; l < weight.size(); ++l) {
        for (long r = 0; r < weight[l].rows(); ++r)
            for (long c = 0; c < weight[l].cols(); ++c) weight[l](r, c) = flat[k++];
        for (long r = 0; r < bias[l].size(); ++r) bias[l][r] = flat[k++];
    }
}

MlpModel init_model(const std::vector<int>& widths, std::uint64_t seed) {
    check_widths(widths);
    MlpModel m;
    m.widths = widths;
    m.seed = seed;
    std::mt19937_64 rng(seed);
    // Implementation-defined distributions avoided: map the raw 64-bit
    // stream to [-1,1) directly so runs are bit-reproducible everywhere.
    auto uniform = [&rng]() {
        return 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0;
    };
    for (size_t l = 0; l + 1 < widths.size(); ++l) {
        const int fan_in = widths[l];
        const int fan_out = widths[l + 1];
        const double scale = 1.0 / std::sqrt(double(fan_in));
        Eigen::MatrixXd W(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) W(r, c) = scale * uniform();
        Eigen::VectorXd b(fan_out);
        for (int r = 0; r < fan_out; ++r) b[r] = scale * uniform();
        m.weight.push_back(std::move(W));
        m.bias.push_back(std::move(b));
    }
    return m;
}

AdamState::AdamState(const MlpModel& model) {
    for (size_t l = 0; l < model.weight.size(); ++l) {
        m_w.push_back(Eigen::MatrixXd::Zero(model.weight[l].rows(), model.weight[l].cols()));
        v_w.push_back(Eigen::MatrixXd::Zero(model.weight[l].rows(), model.weight[l].cols()));
        m_b.push_back(Eigen::VectorXd::Zero(model.bias[l].size()));
        v_b.push_back(Eigen::VectorXd::Zero(model.bias[l].size()));
    }
}

void sgd_step(MlpModel& model, const ParamGradient& grad, double rate) {
    if (!grad.all_finite()) throw std::invalid_argument("sgd_step: non-finite gradient");
    for (size_t l = 0; l < model.weight.size(); ++l) {
        model.weight[l] -= rate * grad.weight[l];
        model.bias[l] -= rate * grad.bias[l];
    }
}

void adam_step(MlpModel& model, const ParamGradient& grad, AdamState& st, double rate) {
    if (!grad.all_finite()) throw std::invalid_argument("adam_step: non-finite gradient");
    st.step += 1;
    const double bc1 = 1.0 - std::pow(st.beta1, double(st.step));
    const double bc2 = 1.0 - std::pow(st.beta2, double(st.step));
    for (size_t l = 0; l < model.weight.size(); ++l) {
        st.m_w[l] = st.beta1 * st.m_w[l] + (1.0 - st.beta1) * grad.weight[l];
        st.v_w[l] = st.beta2 * st.v_w[l].array().matrix() +
                    (1.0 - st.beta2) * grad.weight[l].array().square().matrix();
        st.m_b[l] = st.beta1 * st.m_b[l] + (1.0 - st.beta1) * grad.bias[l];
        st.v_b[l] = st.beta2 * st.v_b[l].array().matrix() +
                    (1.0 - st.beta2) * grad.bias[l].array().square().matrix();
        model.weight[l].array() -= rate * (st.m_w[l].array() / bc1) /
                                   ((st.v_w[l].array() / bc2).sqrt() + st.eps);
        model.bias[l].array() -= rate * (st.m_b[l].array() / bc1) /
                                 ((st.v_b[l].array() / bc2).sqrt() + st.eps);
    }
}

void save_checkpoint(const MlpModel& model, long step, const std::string& path) {
    nlohmann::json header;
    header["widths"] = model.widths;
    header["seed"] = model.seed;
    header["step"] = step;
    header["count"] = model.parameter_count();
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("save_checkpoint: cannot open " + tmp);
        out << header.dump() << "\n";
        const Eigen::VectorXd flat = model.flatten();
        out.write(reinterpret_cast<const char*>(flat.data()),
                  static_cast<std::streamsize>(sizeof(double)) * flat.size());
    }
    std::rename(tmp.c_str(), path.c_str());
}

MlpModel load_checkpoint(const std::string& path, long* step_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::string line;
    std::getline(in, line);
    const nlohmann::json header = nlohmann::json::parse(line);
    MlpModel m = init_model(header.at("widths").get<std::vector<int>>(),
                            header.at("seed").get<std::uint64_t>());
    const long count = header.at("count").get<long>();
    if (count != m.parameter_count())
        throw std::runtime_error("load_checkpoint: parameter count mismatch");
    Eigen::VectorXd flat(count);
    in.read(reinterpret_cast<char*>(flat.data()),
            static_cast<std::streamsize>(sizeof(double)) * count);
    if (!in) throw std::runtime_error("load_checkpoint: truncated parameter block");
    m.unflatten(flat);
    if (step_out) *step_out = header.at("step").get<long>();
    return m;
}

}  // namespace fracpinn
