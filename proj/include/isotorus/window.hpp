#pragma once

#include "common.hpp"

#include <string>
#include <vector>

namespace isotorus {

// Dolph-Chebyshev taper: among all windows of a given length it has the
// narrowest main lobe for a prescribed equiripple sidelobe level.  The
// sidelobes do not decay away from the main lobe, so the level itself is
// the uniform leakage bound used by the kernel truncation downstream.
struct dolph_window {
    int length = 0;              // odd, >= 3
    double sidelobe_db = 0.0;
    double ripple = 0.0;         // 10^{-sidelobe_db/20}, the sidelobe bound
    double x0 = 0.0;             // Chebyshev argument scale
    std::vector<double> weights; // t = 0..length-1, centered at (length-1)/2, sum 1

    [[nodiscard]] int half() const { return (length - 1) / 2; }

    // DTFT of the centered window; real, even, 2pi-periodic, value 1 at 0.
    // Closed form T_{length-1}(x0 cos(omega/2)) / T_{length-1}(x0); the
    // order is even, so the |.| does not change the value.
    [[nodiscard]] double transform(double omega) const {
        const int n = length - 1;
        const double x = std::abs(x0 * std::cos(0.5 * omega));
        const double t = x <= 1.0 ? std::cos(n * std::acos(x)) : std::cosh(n * std::acosh(x));
        return t * ripple;
    }

    // |transform| <= ripple for |omega| >= this edge
    [[nodiscard]] double mainlobe_edge() const { return 2.0 * std::acos(1.0 / x0); }
};

inline dolph_window make_dolph_window(int length, double sidelobe_db) {
    if (length < 3 || length % 2 == 0)
        throw validation_error("dolph window: length must be odd and >= 3");
    if (!(sidelobe_db > 0.0))
        throw validation_error("dolph window: sidelobe_db must be positive");
    dolph_window w;
    w.length = length;
    w.sidelobe_db = sidelobe_db;
    const double r = std::pow(10.0, sidelobe_db / 20.0);
    const int n = length - 1;
    w.x0 = std::cosh(std::acosh(r) / n);
    // self-normalize by the computed peak rather than r so transform(0)
    // is exactly 1; the acosh/cosh round trip is only ~1e-11 accurate
    const double peak = std::cosh(n * std::acosh(w.x0));
    w.ripple = 1.0 / peak;
    const int M = n / 2;

    // The transform is a cosine polynomial of degree M, so sampling it at
    // the length roots of unity and inverting the DFT is exact.
    std::vector<double> spec(M + 1);
    for (int k = 0; k <= M; ++k) {
        const double x = std::abs(w.x0 * std::cos(pi * k / length));
        spec[k] = x <= 1.0 ? std::cos(n * std::acos(x)) : std::cosh(n * std::acosh(x));
    }
    w.weights.resize(length);
    for (int t = 0; t <= M; ++t) {
        const int m = t - M;
        const double c = std::cos(2.0 * pi * m / length);
        kahan_sum acc;
        acc.add(spec[0]);
        double u_prev = 1.0, u = c;
        for (int k = 1; k <= M; ++k) {
            acc.add(2.0 * spec[k] * u);
            const double nxt = 2.0 * c * u - u_prev;
            u_prev = u;
            u = nxt;
        }
        const double v = acc.value() / (double(length) * peak);
        w.weights[t] = v;
        w.weights[length - 1 - t] = v;
    }
    kahan_sum total;
    for (double v : w.weights) total.add(v);
    const double inv = 1.0 / total.value();
    for (double& v : w.weights) v *= inv;
    return w;
}

// Default length rule: long enough that the main lobe resolves the
// smallest lattice spacing, capped by what the sequence can host, odd.
inline int default_window_length(std::size_t available, double min_spacing) {
    const double want =
        std::max(4001.0, std::ceil(16.0 / std::max(min_spacing, 1e-12)));
    long long len = static_cast<long long>(std::min(want, double(available)));
    if (len % 2 == 0) len = (std::size_t(len) + 1 <= available) ? len + 1 : len - 1;
    if (len < 3)
        throw validation_error("default_window_length: sequence too short for any window");
    return static_cast<int>(len);
}

} // namespace isotorus
