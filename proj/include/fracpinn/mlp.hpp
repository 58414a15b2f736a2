#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace fracpinn {

struct EvalPoint {
    double x = 0.0;
    double y = 0.0;  // unused in 1D
    double t = 0.0;
};

/// Batched network outputs with time jets and spatial first derivatives.
struct BatchJets {
    Eigen::VectorXd value;
    Eigen::VectorXd dt;    // filled for order_t >= 1
    Eigen::VectorXd dtt;   // filled for order_t == 2
    Eigen::VectorXd dx;    // filled when spatial gradient requested
    Eigen::VectorXd dy;
};

struct ParamGradient {
    std::vector<Eigen::MatrixXd> weight;
    std::vector<Eigen::VectorXd> bias;

    void set_zero();
    bool all_finite() const;
    double squared_norm() const;
    ParamGradient& operator+=(const ParamGradient& other);
    ParamGradient& operator*=(double s);
};

/// Abstract scalar field over (x[,y],t); lets exact-solution oracles stand
/// in for a network inside the error functionals.
class ScalarFieldModel {
  public:
    virtual ~ScalarFieldModel() = default;
    virtual int space_dim() const = 0;
    /// order_t in {0,1,2}; spatial_grad requests dx (and dy in 2D).
    virtual BatchJets evaluate(const std::vector<EvalPoint>& pts, int order_t,
                               bool spatial_grad = false) const = 0;
};

/// Dense tanh network psi_theta(x[,y],t) with linear output layer.
class MlpModel : public ScalarFieldModel {
  public:
    std::vector<int> widths;  // [d+1, h_1, ..., h_L, 1]
    std::vector<Eigen::MatrixXd> weight;
    std::vector<Eigen::VectorXd> bias;
    std::uint64_t seed = 0;

    int space_dim() const override { return widths.front() - 1; }
    int layer_count() const { return static_cast<int>(weight.size()); }
    long parameter_count() const;

    BatchJets evaluate(const std::vector<EvalPoint>& pts, int order_t,
                       bool spatial_grad = false) const override;

    /// Reverse accumulation of a scalar loss through the batch, given
    /// cotangents of (value, dt, dtt). Empty cotangent vectors mean zero.
    void backward(const std::vector<EvalPoint>& pts, const Eigen::VectorXd& value_bar,
                  const Eigen::VectorXd& dt_bar, const Eigen::VectorXd& dtt_bar,
                  ParamGradient& grad) const;

    ParamGradient zero_gradient() const;

    // Flat parameter views in layer order (weights row-major, then bias).
    Eigen::VectorXd flatten() const;
    void unflatten(const Eigen::VectorXd& flat);
};

/// Deterministic scaled-uniform initialization (scale 1/sqrt(fan_in)).
MlpModel init_model(const std::vector<int>& widths, std::uint64_t seed);

struct AdamState {
    std::vector<Eigen::MatrixXd> m_w, v_w;
    std::vector<Eigen::VectorXd> m_b, v_b;
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(const MlpModel& model);
};

void sgd_step(MlpModel& model, const ParamGradient& grad, double rate);
void adam_step(MlpModel& model, const ParamGradient& grad, AdamState& state, double rate);

/// Checkpoint: JSON header line (widths, seed, step, count) followed by the
/// flat little-endian float64 parameter array.
void save_checkpoint(const MlpModel& model, long step, const std::string& path);
MlpModel load_checkpoint(const std::string& path, long* step_out = nullptr);

}  // namespace fracpinn
