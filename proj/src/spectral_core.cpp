#include "fracpinn/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace fracpinn {

namespace {
constexpr double kPi = std::numbers::pi;
const double kNorm1d = std::sqrt(2.0 / std::numbers::pi);
}  // namespace

void DomainSpec::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("DomainSpec: dim must be 1 or 2");
    if (!(final_time > 0.0)) throw std::invalid_argument("DomainSpec: final time must be positive");
}

double DomainSpec::volume() const { return dim == 1 ? kPi : kPi * kPi; }

double SpectralBasis::eigenfunction(int m, double x, double y) const {
    const Mode& mo = modes.at(static_cast<size_t>(m));
    if (domain.dim == 1) return kNorm1d * std::sin(mo.jx * x);
    return kNorm1d * kNorm1d * std::sin(mo.jx * x) * std::sin(mo.jy * y);
}

double SpectralBasis::eigenfunction_dx(int m, double x, double y) const {
    const Mode& mo = modes.at(static_cast<size_t>(m));
    if (domain.dim == 1) return kNorm1d * mo.jx * std::cos(mo.jx * x);
    return kNorm1d * kNorm1d * mo.jx * std::cos(mo.jx * x) * std::sin(mo.jy * y);
}

double SpectralBasis::eigenfunction_dy(int m, double x, double y) const {
    const Mode& mo = modes.at(static_cast<size_t>(m));
    if (domain.dim == 1) return 0.0;
    return kNorm1d * kNorm1d * mo.jy * std::sin(mo.jx * x) * std::cos(mo.jy * y);
}

SpectralBasis build_basis(const DomainSpec& domain, int J) {
    domain.validate();
    if (J < 1) throw std::invalid_argument("build_basis: J must be >= 1");

    SpectralBasis basis;
    basis.domain = domain;
    if (domain.dim == 1) {
        basis.modes.reserve(static_cast<size_t>(J));
        for (int j = 1; j <= J; ++j) basis.modes.push_back({j, 0, double(j) * j});
    } else {
        // Any pair with max index > J has lambda > 1+J^2 >= lambda of (1,J),
        // so candidates with jx,jy <= J contain the J smallest modes.
        std::vector<Mode> cand;
        cand.reserve(static_cast<size_t>(J) * J);
        for (int j = 1; j <= J; ++j)
            for (int k = 1; k <= J; ++k) cand.push_back({j, k, double(j) * j + double(k) * k});
        std::sort(cand.begin(), cand.end(), [](const Mode& a, const Mode& b) {
            return std::tie(a.lambda, a.jx, a.jy) < std::tie(b.lambda, b.jx, b.jy);
        });
        cand.resize(static_cast<size_t>(J));
        basis.modes = std::move(cand);
    }
    return basis;
}

QuadratureGrid build_grid(const SpectralBasis& basis, int M, int Q) {
    const int J_max_axis = [&] {
        int m = 1;
        for (const Mode& mo : basis.modes) m = std::max({m, mo.jx, mo.jy});
        return m;
    }();
    if (M < 2 * J_max_axis + 1)
        throw std::invalid_argument("build_grid: M must be >= 2J+1 for the retained modes");
    if (Q < 1) throw std::invalid_argument("build_grid: Q must be >= 1");

    QuadratureGrid g;
    g.domain = basis.domain;
    g.nodes_per_axis = M;
    g.time_intervals = Q;
    g.axis_weight = kPi / M;
    g.axis_nodes.resize(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m) g.axis_nodes[static_cast<size_t>(m)] = (m + 0.5) * kPi / M;

    const int d = basis.domain.dim;
    if (d == 1) {
        g.interior_nodes.resize(static_cast<size_t>(M));
        g.interior_weights.resize(M);
        for (int m = 0; m < M; ++m) {
            g.interior_nodes[static_cast<size_t>(m)] = {g.axis_nodes[static_cast<size_t>(m)], 0.0};
            g.interior_weights[m] = g.axis_weight;
        }
        g.boundary_nodes = {{0.0, 0.0}, {kPi, 0.0}};
        g.boundary_weights = Eigen::VectorXd::Ones(2);  // counting measure on {0,pi}
    } else {
        g.interior_nodes.resize(static_cast<size_t>(M) * M);
        g.interior_weights.resize(M * M);
        for (int ix = 0; ix < M; ++ix)
            for (int iy = 0; iy < M; ++iy) {
                const int n = ix * M + iy;
                g.interior_nodes[static_cast<size_t>(n)] = {g.axis_nodes[static_cast<size_t>(ix)],
                                                            g.axis_nodes[static_cast<size_t>(iy)]};
                g.interior_weights[n] = g.axis_weight * g.axis_weight;
            }
        // Four edges, each carrying the 1D midpoint rule.
        g.boundary_nodes.reserve(static_cast<size_t>(4 * M));
        g.boundary_weights.resize(4 * M);
        int b = 0;
        for (int m = 0; m < M; ++m, ++b) {  // y = 0
            g.boundary_nodes.push_back({g.axis_nodes[static_cast<size_t>(m)], 0.0});
            g.boundary_weights[b] = g.axis_weight;
        }
        for (int m = 0; m < M; ++m, ++b) {  // y = pi
            g.boundary_nodes.push_back({g.axis_nodes[static_cast<size_t>(m)], kPi});
            g.boundary_weights[b] = g.axis_weight;
        }
        for (int m = 0; m < M; ++m, ++b) {  // x = 0
            g.boundary_nodes.push_back({0.0, g.axis_nodes[static_cast<size_t>(m)]});
            g.boundary_weights[b] = g.axis_weight;
        }
        for (int m = 0; m < M; ++m, ++b) {  // x = pi
            g.boundary_nodes.push_back({kPi, g.axis_nodes[static_cast<size_t>(m)]});
            g.boundary_weights[b] = g.axis_weight;
        }
    }

    const double T = basis.domain.final_time;
    g.time_nodes.resize(Q + 1);
    g.time_weights.resize(Q + 1);
    const double ht = T / Q;
    for (int q = 0; q <= Q; ++q) {
        g.time_nodes[q] = q * ht;
        g.time_weights[q] = (q == 0 || q == Q) ? 0.5 * ht : ht;
    }
    return g;
}

SpectralField::SpectralField(const SpectralBasis& b, Eigen::VectorXd c)
    : basis(&b), coeff(std::move(c)) {
    if (coeff.size() != b.size())
        throw std::invalid_argument("SpectralField: coefficient length does not match basis");
    if (!coeff.allFinite()) throw std::invalid_argument("SpectralField: non-finite coefficients");
}

SpectralField::SpectralField(const SpectralBasis& b)
    : basis(&b), coeff(Eigen::VectorXd::Zero(b.size())) {}

GridField::GridField(const QuadratureGrid& g, Eigen::VectorXd v) : grid(&g), values(std::move(v)) {
    if (values.size() != g.interior_count())
        throw std::invalid_argument("GridField: value length does not match grid");
    if (!values.allFinite()) throw std::invalid_argument("GridField: non-finite values");
}

GridField::GridField(const QuadratureGrid& g)
    : grid(&g), values(Eigen::VectorXd::Zero(g.interior_count())) {}

SpectralTransform::SpectralTransform(const SpectralBasis& b, const QuadratureGrid& g)
    : basis(&b), grid(&g) {
    const int N = g.interior_count();
    const int J = b.size();
    synth.resize(N, J);
    synth_dx.resize(N, J);
    synth_dy.resize(N, J);
    for (int n = 0; n < N; ++n) {
        const auto& p = g.interior_nodes[static_cast<size_t>(n)];
        for (int j = 0; j < J; ++j) {
            synth(n, j) = b.eigenfunction(j, p[0], p[1]);
            synth_dx(n, j) = b.eigenfunction_dx(j, p[0], p[1]);
            synth_dy(n, j) = b.eigenfunction_dy(j, p[0], p[1]);
        }
    }
    proj = synth.transpose() * g.interior_weights.asDiagonal();
}

Eigen::VectorXd SpectralTransform::to_spectral(const Eigen::VectorXd& values) const {
    if (values.size() != synth.rows())
        throw std::invalid_argument("to_spectral: value length does not match grid");
    return proj * values;
}

Eigen::VectorXd SpectralTransform::to_grid(const Eigen::VectorXd& coeff) const {
    if (coeff.size() != synth.cols())
        throw std::invalid_argument("to_grid: coefficient length does not match basis");
    return synth * coeff;
}

SpectralField to_spectral(const GridField& gf, const SpectralBasis& basis) {
    SpectralTransform tr(basis, *gf.grid);
    return SpectralField(basis, tr.to_spectral(gf.values));
}

GridField to_grid(const SpectralField& sf, const QuadratureGrid& grid) {
    SpectralTransform tr(*sf.basis, grid);
    return GridField(grid, tr.to_grid(sf.coeff));
}

}  // namespace fracpinn
