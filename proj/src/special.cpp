#include "fracpinn/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fracpinn {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<size_t>(n), 0.0);
    w.assign(static_cast<size_t>(n), 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        double p1 = 1.0, p2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        x[static_cast<size_t>(i)] = -z;
        x[static_cast<size_t>(n - 1 - i)] = z;
        w[static_cast<size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<size_t>(n - 1 - i)] = w[static_cast<size_t>(i)];
    }
}

// Tail of the exponential series: sum_{n>K} (-1)^{n+1} u^n / n!,
// i.e. 1-e^{-u} with its first K Taylor terms removed, computed without
// cancellation.
double exp_series_tail(double u, int K) {
    double term = -1.0;
    for (int n = 1; n <= K + 1; ++n) term *= -u / n;  // (-1)^{K+2} u^{K+1}/(K+1)!
    double sum = 0.0;
    for (int n = K + 1; n < K + 60; ++n) {
        sum += term;
        term *= -u / (n + 1);
        if (std::abs(term) < 1e-300) break;
    }
    return sum;
}

}  // namespace

double exp_integral_e1(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("exp_integral_e1: x must be positive");
    if (x <= 1.0) {
        // E1(x) = -gamma - ln x + sum (-1)^{n+1} x^n/(n n!)
        double sum = 0.0, term = 1.0;
        for (int n = 1; n <= 40; ++n) {
            term *= -x / n;
            const double add = -term / n;
            sum += add;
            if (std::abs(add) < 1e-18 * std::max(1.0, std::abs(sum))) break;
        }
        return -kEulerGamma - std::log(x) + sum;
    }
    if (x > 700.0) return 0.0;  // below double underflow of e^{-x}
    // Modified Lentz continued fraction: E1(x) = e^{-x}/(x+1- 1/(x+3- 4/(x+5- ...))).
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 200; ++i) {
        const double a = -double(i) * i;
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

double frac_power_u_integral(double s) {
    if (!(s > 0.0 && s < 2.0))
        throw std::invalid_argument("frac_power_u_integral: s must be in (0,2)");
    const double a = s / 2.0;

    // [0,1]: Taylor head of 1-e^{-u} integrated analytically, smooth tail by GL.
    const int K = 20;
    double head = 0.0, fact = 1.0;
    for (int n = 1; n <= K; ++n) {
        fact *= n;
        const double sign = (n % 2 == 1) ? 1.0 : -1.0;
        head += sign / (fact * (n - a));
    }
    std::vector<double> gx, gw;
    gauss_legendre(32, gx, gw);
    double rem = 0.0;
    for (size_t i = 0; i < gx.size(); ++i) {
        const double u = 0.5 * (gx[i] + 1.0);
        rem += 0.5 * gw[i] * std::pow(u, -1.0 - a) * exp_series_tail(u, K);
    }

    // [1,inf): exact power integral minus the decaying correction on [1,U].
    const double U = 40.0;
    double tail = 1.0 / a;
    const int panels = 8, nodes = 16;
    std::vector<double> px, pw;
    gauss_legendre(nodes, px, pw);
    const double hw = (U - 1.0) / panels;
    double corr = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = 1.0 + p * hw;
        for (int i = 0; i < nodes; ++i) {
            const double u = lo + 0.5 * hw * (px[static_cast<size_t>(i)] + 1.0);
            corr += 0.5 * hw * pw[static_cast<size_t>(i)] * std::pow(u, -1.0 - a) * std::exp(-u);
        }
    }
    return head + rem + tail - corr;
}

double c_s_constant(double s) {
    if (!(s > 0.0 && s < 2.0)) throw std::invalid_argument("c_s_constant: s must be in (0,2)");
    return 1.0 / frac_power_u_integral(s);
}

double c_s_closed_form(double s) {
    if (!(s > 0.0 && s < 2.0)) throw std::invalid_argument("c_s_closed_form: s must be in (0,2)");
    return (s / 2.0) / std::tgamma(1.0 - s / 2.0);
}

}  // namespace fracpinn
