#pragma once

#include "common.hpp"

#include <algorithm>
#include <cstdint>
#include <span>

namespace isotorus {

// Dense n-by-n solve, row-major A, partial pivoting with implicit row
// equilibration.  A and b are clobbered; the solution lands in b.
// Sizes here are tiny (Newton systems, X-polynomial systems), so no
// attempt at blocking.
inline void lu_solve_inplace(std::vector<double>& A, std::vector<double>& b) {
    const std::size_t n = b.size();
    if (A.size() != n * n) throw validation_error("lu_solve: shape mismatch");
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) {
        double m = 0.0;
        for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(A[i * n + j]));
        if (m == 0.0) throw numerical_error("lu_solve: zero row " + std::to_string(i));
        scale[i] = 1.0 / m;
    }
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(A[perm[k] * n + k]) * scale[perm[k]];
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(A[perm[i] * n + k]) * scale[perm[i]];
            if (v > best) { best = v; p = i; }
        }
        if (best == 0.0) throw numerical_error("lu_solve: singular at column " + std::to_string(k));
        std::swap(perm[k], perm[p]);
        const std::size_t rk = perm[k];
        const double piv = A[rk * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const std::size_t ri = perm[i];
            const double f = A[ri * n + k] / piv;
            if (f == 0.0) continue;
            A[ri * n + k] = f;
            for (std::size_t j = k + 1; j < n; ++j) A[ri * n + j] -= f * A[rk * n + j];
            b[ri] -= f * b[rk];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ik = n; ik-- > 0;) {
        const std::size_t rk = perm[ik];
        double s = b[rk];
        for (std::size_t j = ik + 1; j < n; ++j) s -= A[rk * n + j] * x[j];
        x[ik] = s / A[rk * n + ik];
    }
    b = std::move(x);
}

inline std::vector<double> lu_solve(std::vector<double> A, std::vector<double> b) {
    lu_solve_inplace(A, b);
    return b;
}

// Banded matrix in LAPACK-style storage: logical entry (i,j) with
// |i-j| within band lives at store[(kl+ku) + i - j][j].  Partial pivoting
// can fill the upper band up to kl+ku, hence the extra kl rows.
class band_matrix {
public:
    band_matrix(std::size_t n, std::size_t kl, std::size_t ku)
        : n_(n), kl_(kl), ku_(ku), rows_(2 * kl + ku + 1), store_(rows_ * n, 0.0) {}

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] std::size_t lower() const { return kl_; }
    [[nodiscard]] std::size_t upper() const { return ku_; }

    double& at(std::size_t i, std::size_t j) {
        return store_[idx(i, j)];
    }
    [[nodiscard]] double get(std::size_t i, std::size_t j) const {
        if (j > i + ku_ + kl_ || i > j + kl_) return 0.0;
        return store_[idx(i, j)];
    }

    // Gaussian elimination with partial pivoting confined to the band.
    // Returns a cheap condition estimate norm_inf(A) / min pivot; callers
    // compare it against a cap.  b is overwritten with the solution.
    double solve(std::vector<double>& b) {
        if (b.size() != n_) throw validation_error("band_matrix::solve: rhs size");
        double norm = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double r = 0.0;
            const std::size_t j0 = i > kl_ ? i - kl_ : 0;
            const std::size_t j1 = std::min(n_ - 1, i + ku_);
            for (std::size_t j = j0; j <= j1; ++j) r += std::abs(get(i, j));
            norm = std::max(norm, r);
        }
        double min_piv = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t last = std::min(n_ - 1, k + kl_);
            std::size_t p = k;
            for (std::size_t i = k + 1; i <= last; ++i)
                if (std::abs(store_[idx(i, k)]) > std::abs(store_[idx(p, k)])) p = i;
            const double piv = store_[idx(p, k)];
            if (piv == 0.0) throw numerical_error("band solve: zero pivot at " + std::to_string(k));
            min_piv = std::min(min_piv, std::abs(piv));
            const std::size_t jmax = std::min(n_ - 1, k + ku_ + kl_);
            if (p != k) {
                for (std::size_t j = k; j <= jmax; ++j)
                    std::swap(store_[idx(k, j)], store_[idx(p, j)]);
                std::swap(b[k], b[p]);
            }
            for (std::size_t i = k + 1; i <= last; ++i) {
                const double f = store_[idx(i, k)] / store_[idx(k, k)];
                if (f == 0.0) continue;
                for (std::size_t j = k + 1; j <= jmax; ++j)
                    store_[idx(i, j)] -= f * store_[idx(k, j)];
                b[i] -= f * b[k];
            }
        }
        for (std::size_t ik = n_; ik-- > 0;) {
            const std::size_t jmax = std::min(n_ - 1, ik + ku_ + kl_);
            double s = b[ik];
            for (std::size_t j = ik + 1; j <= jmax; ++j) s -= store_[idx(ik, j)] * b[j];
            b[ik] = s / store_[idx(ik, ik)];
        }
        return min_piv > 0.0 ? norm / min_piv : std::numeric_limits<double>::infinity();
    }

private:
    [[nodiscard]] std::size_t idx(std::size_t i, std::size_t j) const {
        return (kl_ + ku_ + i - j) * n_ + j;
    }
    std::size_t n_, kl_, ku_, rows_;
    std::vector<double> store_;
};

struct line_fit {
    double slope = 0.0, intercept = 0.0, rms_residual = 0.0;
};

// Ordinary least squares y ~= slope*x + intercept.
inline line_fit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw validation_error("fit_line: need >= 2 matching points");
    const double n = double(x.size());
    kahan_sum sx, sy;
    for (double v : x) sx.add(v);
    for (double v : y) sy.add(v);
    const double mx = sx.value() / n, my = sy.value() / n;
    kahan_sum sxx, sxy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx.add(sq(x[i] - mx));
        sxy.add((x[i] - mx) * (y[i] - my));
    }
    if (sxx.value() == 0.0) throw validation_error("fit_line: degenerate abscissae");
    line_fit f;
    f.slope = sxy.value() / sxx.value();
    f.intercept = my - f.slope * mx;
    kahan_sum r2;
    for (std::size_t i = 0; i < x.size(); ++i)
        r2.add(sq(y[i] - f.slope * x[i] - f.intercept));
    f.rms_residual = std::sqrt(r2.value() / n);
    return f;
}

// Slope of the best line through the origin.
inline double fit_through_origin(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty())
        throw validation_error("fit_through_origin: need matching points");
    kahan_sum num, den;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num.add(x[i] * y[i]);
        den.add(sq(x[i]));
    }
    if (den.value() == 0.0) throw validation_error("fit_through_origin: all-zero abscissae");
    return num.value() / den.value();
}

inline double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw validation_error("pearson_correlation: need >= 2 matching points");
    const double n = double(x.size());
    kahan_sum sx, sy;
    for (double v : x) sx.add(v);
    for (double v : y) sy.add(v);
    const double mx = sx.value() / n, my = sy.value() / n;
    kahan_sum sxx, syy, sxy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx.add(sq(x[i] - mx));
        syy.add(sq(y[i] - my));
        sxy.add((x[i] - mx) * (y[i] - my));
    }
    const double d = std::sqrt(sxx.value() * syy.value());
    if (d == 0.0) throw validation_error("pearson_correlation: zero variance");
    return sxy.value() / d;
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw validation_error("median_of: empty");
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    double hi = v[m];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + m - 1, v.begin() + m);
    return 0.5 * (v[m - 1] + hi);
}

} // namespace isotorus
