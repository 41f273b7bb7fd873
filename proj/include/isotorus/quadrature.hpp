#pragma once

#include "common.hpp"

#include <span>

namespace isotorus {

struct quad_rule {
    std::vector<double> nodes;    // ascending in [-1, 1]
    std::vector<double> weights;
};

// Gauss-Chebyshev of the first kind: integrates f(x)/sqrt(1-x^2) with
// constant weights pi/P.  Nodes returned ascending.
inline quad_rule chebyshev1_rule(int P) {
    if (P < 1) throw validation_error("chebyshev1_rule: P >= 1 required");
    quad_rule r;
    r.nodes.resize(P);
    r.weights.assign(P, pi / P);
    for (int p = 0; p < P; ++p) {
        const double theta = pi * (2.0 * (P - p) - 1.0) / (2.0 * P);
        r.nodes[p] = std::cos(theta);
    }
    return r;
}

// Gauss-Chebyshev of the second kind: integrates f(x)*sqrt(1-x^2).
inline quad_rule chebyshev2_rule(int P) {
    if (P < 1) throw validation_error("chebyshev2_rule: P >= 1 required");
    quad_rule r;
    r.nodes.resize(P);
    r.weights.resize(P);
    for (int p = 0; p < P; ++p) {
        const double theta = pi * double(P - p) / (P + 1.0);
        r.nodes[p] = std::cos(theta);
        r.weights[p] = pi / (P + 1.0) * sq(std::sin(theta));
    }
    return r;
}

// Gauss-Legendre on [-1, 1] by Newton iteration on the recurrence; the
// usual asymptotic seed converges in a handful of steps.  Only the upper
// half is computed, the rest follows by symmetry.
inline quad_rule legendre_rule(int Q) {
    if (Q < 1) throw validation_error("legendre_rule: Q >= 1 required");
    quad_rule r;
    r.nodes.resize(Q);
    r.weights.resize(Q);
    const int half = (Q + 1) / 2;
    for (int k = 0; k < half; ++k) {
        double x = std::cos(pi * (k + 0.75) / (Q + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 64; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= Q; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = Q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[Q - 1 - k] = x;
        r.weights[Q - 1 - k] = w;
        r.nodes[k] = -x;
        r.weights[k] = w;
    }
    if (Q % 2 == 1) r.nodes[Q / 2] = 0.0;
    return r;
}

// Chebyshev interpolation coefficients from samples taken at the ascending
// first-kind nodes of chebyshev1_rule(P): f(x) ~= sum_k c_k T_k(x), k < P.
// Plain O(P^2) cosine transform; P stays small enough here that an FFT
// would be noise.
inline std::vector<double> chebyshev_coeffs(std::span<const double> samples) {
    const int P = int(samples.size());
    if (P < 1) throw validation_error("chebyshev_coeffs: empty sample set");
    std::vector<double> c(P, 0.0);
    for (int k = 0; k < P; ++k) {
        kahan_sum s;
        for (int p = 0; p < P; ++p) {
            // node p has theta = pi*(2(P-p)-1)/(2P); T_k(cos theta) = cos(k theta)
            const double theta = pi * (2.0 * (P - p) - 1.0) / (2.0 * P);
            s.add(samples[p] * std::cos(k * theta));
        }
        c[k] = s.value() * ((k == 0 ? 1.0 : 2.0) / P);
    }
    return c;
}

inline double clenshaw(std::span<const double> c, double x) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        const double b0 = 2.0 * x * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + (c.empty() ? 0.0 : c[0]);
}

} // namespace isotorus
