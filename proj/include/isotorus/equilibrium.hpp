#pragma once

#include "ifs.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"

#include <complex>

namespace isotorus {

// Monic polynomial data for a band set: Y collects the 2N band endpoints,
// Z the gap roots zeta.  Everything downstream evaluates these in product
// form through logs; expanded coefficients never appear.
struct poly_pair {
    std::vector<double> y_roots;   // alpha_0, beta_0, alpha_1, beta_1, ...
    std::vector<double> z_roots;   // one per gap, ascending

    [[nodiscard]] double log_abs_y(double s) const {
        kahan_sum a;
        for (double r : y_roots) a.add(std::log(std::abs(s - r)));
        return a.value();
    }
    // |Z(s)| through logs plus the sign as +-1.
    [[nodiscard]] std::pair<double, int> log_abs_z(double s) const {
        kahan_sum a;
        int sign = 1;
        for (double r : z_roots) {
            const double d = s - r;
            a.add(std::log(std::abs(d)));
            if (d < 0.0) sign = -sign;
        }
        return {a.value(), sign};
    }
};

struct equilibrium_options {
    double tol = 1e-12;
    int quad_points = 256;
    int max_iter = 200;
};

// Equilibrium (harmonic) measure data of a finite union of bands: gap
// roots of the density numerator, per-band masses, cumulative masses at
// the gaps ("fundamental frequencies"), Robin energy and capacity.
// Immutable once solved; carries its quadrature tables so density,
// potential and Green evaluations reuse them.
struct equilibrium_solution {
    interval_union bands;
    poly_pair polys;
    std::vector<double> band_masses;    // N entries, sum 1
    std::vector<double> frequencies;    // N-1 entries, cumulative masses, in (0,1)
    double energy = 0.0;                // Robin constant
    double capacity = 0.0;              // exp(-energy)
    equilibrium_options options;

    // per band: quadrature abscissae, smooth density factor h = |Z|/sqrt(G)
    // at those abscissae, and Chebyshev coefficients of h on the band
    std::vector<std::vector<double>> band_nodes;
    std::vector<std::vector<double>> band_h;
    std::vector<std::vector<double>> band_hcoef;

    [[nodiscard]] const std::vector<double>& zeta() const { return polys.z_roots; }
};

namespace detail {

// Product of |s - root| over all Y roots except the two indicated, as a log.
inline double log_g(const std::vector<double>& roots, double s,
                    std::size_t skip1, std::size_t skip2) {
    kahan_sum a;
    for (std::size_t m = 0; m < roots.size(); ++m) {
        if (m == skip1 || m == skip2) continue;
        a.add(std::log(std::abs(s - roots[m])));
    }
    return a.value();
}

struct gap_tables {
    // for each gap: abscissae and precomputed -0.5*log G at them
    std::vector<std::vector<double>> nodes;
    std::vector<std::vector<double>> half_log_g;   // 0.5 * log G
};

inline gap_tables make_gap_tables(const interval_union& bands, int P) {
    const auto rule = chebyshev1_rule(P);
    std::vector<double> roots;
    roots.reserve(2 * bands.size());
    for (const auto& b : bands.bands) {
        roots.push_back(b.a);
        roots.push_back(b.b);
    }
    gap_tables t;
    const std::size_t ngap = bands.size() - 1;
    t.nodes.resize(ngap);
    t.half_log_g.resize(ngap);
    for (std::size_t i = 0; i < ngap; ++i) {
        const double left = bands.bands[i].b, right = bands.bands[i + 1].a;
        const double c = 0.5 * (left + right), r = 0.5 * (right - left);
        t.nodes[i].resize(P);
        t.half_log_g[i].resize(P);
        for (int p = 0; p < P; ++p) {
            const double s = c + r * rule.nodes[p];
            t.nodes[i][p] = s;
            t.half_log_g[i][p] = 0.5 * log_g(roots, s, 2 * i + 1, 2 * i + 2);
        }
    }
    return t;
}

} // namespace detail

// Residuals of the gap balance conditions int_gap Z/sqrt|Y| ds at the
// given roots, together with the positive-integrand scales used for the
// relative convergence test.
inline std::pair<std::vector<double>, std::vector<double>>
equilibrium_residuals(const interval_union& bands, const std::vector<double>& zeta, int P) {
    const std::size_t ngap = bands.size() - 1;
    if (zeta.size() != ngap) throw validation_error("equilibrium_residuals: zeta size");
    const auto tab = detail::make_gap_tables(bands, P);
    std::vector<double> F(ngap, 0.0), S(ngap, 0.0);
    for (std::size_t i = 0; i < ngap; ++i) {
        kahan_sum f, s;
        for (int p = 0; p < P; ++p) {
            const double x = tab.nodes[i][p];
            kahan_sum lz;
            int sign = 1;
            for (double z : zeta) {
                const double d = x - z;
                lz.add(std::log(std::abs(d)));
                if (d < 0.0) sign = -sign;
            }
            const double mag = std::exp(lz.value() - tab.half_log_g[i][p]);
            f.add(sign * mag);
            s.add(mag);
        }
        F[i] = pi / P * f.value();
        S[i] = pi / P * s.value();
    }
    return {F, S};
}

// Solves the balance system for the gap roots by damped Newton with the
// analytic Jacobian, then fills in masses, frequencies, energy, capacity.
// The endpoint square-root singularities are absorbed into the Chebyshev
// substitution, so every quadrature below sees an analytic integrand.
inline equilibrium_solution solve_equilibrium(const interval_union& bands,
                                              const equilibrium_options& opt = {}) {
    bands.validate();
    const std::size_t N = bands.size();
    const std::size_t ngap = N - 1;
    const int P = opt.quad_points;
    if (P < 8) throw validation_error("solve_equilibrium: quad_points >= 8 required");

    equilibrium_solution sol;
    sol.bands = bands;
    sol.options = opt;
    for (const auto& b : bands.bands) {
        sol.polys.y_roots.push_back(b.a);
        sol.polys.y_roots.push_back(b.b);
    }

    std::vector<double> zeta(ngap);
    for (std::size_t i = 0; i < ngap; ++i)
        zeta[i] = 0.5 * (bands.bands[i].b + bands.bands[i + 1].a);

    if (ngap > 0) {
        const auto tab = detail::make_gap_tables(bands, P);

        auto eval_F = [&](const std::vector<double>& zt, std::vector<double>& F,
                          std::vector<double>& S) {
            for (std::size_t i = 0; i < ngap; ++i) {
                kahan_sum f, s;
                for (int p = 0; p < P; ++p) {
                    const double x = tab.nodes[i][p];
                    kahan_sum lz;
                    int sign = 1;
                    for (double z : zt) {
                        const double d = x - z;
                        lz.add(std::log(std::abs(d)));
                        if (d < 0.0) sign = -sign;
                    }
                    const double mag = std::exp(lz.value() - tab.half_log_g[i][p]);
                    f.add(sign * mag);
                    s.add(mag);
                }
                F[i] = pi / P * f.value();
                S[i] = pi / P * s.value();
            }
        };
        auto scaled_norm = [&](const std::vector<double>& F, const std::vector<double>& S) {
            double m = 0.0;
            for (std::size_t i = 0; i < ngap; ++i)
                m = std::max(m, std::abs(F[i]) / std::max(S[i], 1e-300));
            return m;
        };
        auto abs_norm = [&](const std::vector<double>& F) {
            double m = 0.0;
            for (double v : F) m = std::max(m, std::abs(v));
            return m;
        };

        std::vector<double> F(ngap), S(ngap), Ft(ngap), St(ngap);
        eval_F(zeta, F, S);
        double R = scaled_norm(F, S);
        int iter = 0;
        while (R > opt.tol || abs_norm(F) > opt.tol) {
            if (++iter > opt.max_iter)
                throw convergence_error("solve_equilibrium: Newton did not converge", R);

            // Jacobian: d F_i / d zeta_l = -int_gap_i prod_{m != l}(s - zeta_m)/sqrt|Y|
            std::vector<double> J(ngap * ngap, 0.0);
            std::vector<double> lg(ngap), dg(ngap);
            for (std::size_t i = 0; i < ngap; ++i) {
                std::vector<kahan_sum> row(ngap);
                for (int p = 0; p < P; ++p) {
                    const double x = tab.nodes[i][p];
                    kahan_sum lzs;
                    int sign = 1;
                    bool tiny = false;
                    for (std::size_t m = 0; m < ngap; ++m) {
                        const double d = x - zeta[m];
                        dg[m] = d;
                        lg[m] = std::log(std::abs(d));
                        if (d < 0.0) sign = -sign;
                        if (std::abs(d) < 1e-300) tiny = true;
                        lzs.add(lg[m]);
                    }
                    const double lz = lzs.value();
                    for (std::size_t l = 0; l < ngap; ++l) {
                        double v;
                        if (!tiny) {
                            v = sign * (dg[l] < 0.0 ? -1.0 : 1.0) *
                                std::exp(lz - lg[l] - tab.half_log_g[i][p]);
                        } else {
                            double prod = std::exp(-tab.half_log_g[i][p]);
                            for (std::size_t m = 0; m < ngap; ++m)
                                if (m != l) prod *= dg[m];
                            v = prod;
                        }
                        row[l].add(v);
                    }
                }
                for (std::size_t l = 0; l < ngap; ++l)
                    J[i * ngap + l] = -pi / P * row[l].value();
            }

            std::vector<double> step = lu_solve(std::move(J), F);
            double t = 1.0;
            std::vector<double> trial(ngap);
            for (int halving = 0;; ++halving) {
                for (std::size_t i = 0; i < ngap; ++i) {
                    double z = zeta[i] - t * step[i];
                    const double left = bands.bands[i].b, right = bands.bands[i + 1].a;
                    if (!(z > left)) z = 0.5 * (zeta[i] + left);
                    if (!(z < right)) z = 0.5 * (zeta[i] + right);
                    trial[i] = z;
                }
                eval_F(trial, Ft, St);
                const double Rt = scaled_norm(Ft, St);
                if (Rt <= R * (1.0 + 1e-12) || halving >= 30) {
                    zeta = trial;
                    F = Ft;
                    S = St;
                    R = Rt;
                    break;
                }
                t *= 0.5;
            }
        }
    }
    sol.polys.z_roots = zeta;

    // Band masses and the quadrature cache.  On band i the density is
    // (1/pi)|Z|/sqrt|Y|; pulling out the band's own endpoint factors
    // leaves h = |Z|/sqrt(G), and the first-kind rule gives the mass as
    // the plain average of h.
    const auto rule = chebyshev1_rule(P);
    sol.band_nodes.resize(N);
    sol.band_h.resize(N);
    sol.band_hcoef.resize(N);
    sol.band_masses.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double c = bands.bands[i].center(), r = bands.bands[i].halfwidth();
        sol.band_nodes[i].resize(P);
        sol.band_h[i].resize(P);
        kahan_sum mass;
        for (int p = 0; p < P; ++p) {
            const double s = c + r * rule.nodes[p];
            sol.band_nodes[i][p] = s;
            const double lg = detail::log_g(sol.polys.y_roots, s, 2 * i, 2 * i + 1);
            const auto [lz, sign] = sol.polys.log_abs_z(s);
            (void)sign;
            const double h = std::exp(lz - 0.5 * lg);
            sol.band_h[i][p] = h;
            mass.add(h);
        }
        sol.band_masses[i] = mass.value() / P;
        sol.band_hcoef[i] = chebyshev_coeffs(sol.band_h[i]);
    }
    sol.frequencies.resize(ngap);
    kahan_sum cum;
    for (std::size_t i = 0; i < ngap; ++i) {
        cum.add(sol.band_masses[i]);
        sol.frequencies[i] = cum.value();
    }

    // Robin energy E = -int int log|u-s| dv dv = -int Q dv with
    // Q(u) = int log|u-s| dv(s).  The own-band part of Q uses the closed
    // logarithmic Chebyshev moments; cross-band parts are regular.
    kahan_sum energy;
    for (std::size_t i = 0; i < N; ++i) {
        const double c = bands.bands[i].center(), r = bands.bands[i].halfwidth();
        for (int p = 0; p < P; ++p) {
            const double u = sol.band_nodes[i][p];
            kahan_sum q;
            for (std::size_t j = 0; j < N; ++j) {
                if (j == i) {
                    const auto& co = sol.band_hcoef[i];
                    const double x = (u - c) / r;
                    kahan_sum series;
                    for (std::size_t k = co.size(); k-- > 1;)
                        series.add(co[k] / double(k) * std::cos(k * std::acos(std::clamp(x, -1.0, 1.0))));
                    q.add(sol.band_masses[i] * (std::log(r) - std::log(2.0)) - series.value());
                } else {
                    kahan_sum cross;
                    for (int pp = 0; pp < P; ++pp)
                        cross.add(std::log(std::abs(u - sol.band_nodes[j][pp])) * sol.band_h[j][pp]);
                    q.add(cross.value() / P);
                }
            }
            energy.add(-q.value() * sol.band_h[i][p] / P);
        }
    }
    sol.energy = energy.value();
    sol.capacity = std::exp(-sol.energy);
    return sol;
}

// Density of the equilibrium measure at a point of the support; diverges
// as the inverse square root toward band endpoints.
inline double equilibrium_density(const equilibrium_solution& sol, double s) {
    const auto bi = sol.bands.band_of(s);
    if (!bi) throw validation_error("equilibrium_density: point not on the band set");
    const auto [lz, sign] = sol.polys.log_abs_z(s);
    (void)sign;
    return std::exp(lz - 0.5 * sol.polys.log_abs_y(s)) / pi;
}

// log-potential integral Q(z) = int log|z-s| dv(s).
inline double log_potential_integral(const equilibrium_solution& sol, std::complex<double> z) {
    const std::size_t N = sol.bands.size();
    const int P = sol.options.quad_points;
    std::optional<std::size_t> own;
    if (z.imag() == 0.0) own = sol.bands.band_of(z.real());
    kahan_sum q;
    for (std::size_t j = 0; j < N; ++j) {
        if (own && *own == j) {
            const double c = sol.bands.bands[j].center(), r = sol.bands.bands[j].halfwidth();
            const double x = std::clamp((z.real() - c) / r, -1.0, 1.0);
            const double theta = std::acos(x);
            const auto& co = sol.band_hcoef[j];
            kahan_sum series;
            for (std::size_t k = co.size(); k-- > 1;)
                series.add(co[k] / double(k) * std::cos(k * theta));
            q.add(sol.band_masses[j] * (std::log(r) - std::log(2.0)) - series.value());
        } else {
            kahan_sum cross;
            for (int p = 0; p < P; ++p)
                cross.add(std::log(std::abs(z - sol.band_nodes[j][p])) * sol.band_h[j][p]);
            q.add(cross.value() / P);
        }
    }
    return q.value();
}

// Green's function of the complement domain with pole at infinity;
// vanishes on the bands, behaves as log|z| - log(capacity) at infinity.
inline double green_function(const equilibrium_solution& sol, std::complex<double> z) {
    return log_potential_integral(sol, z) + sol.energy;
}

// Angular frequency 2*pi*omega folded into [0, pi]; i indexes gaps in
// ascending position order.
inline double angular_frequency(const equilibrium_solution& sol, std::size_t i) {
    const double w = 2.0 * pi * sol.frequencies.at(i);
    const double m = std::fmod(w, 2.0 * pi);
    return m <= pi ? m : 2.0 * pi - m;
}

} // namespace isotorus
