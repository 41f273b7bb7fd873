#pragma once

#include "jacobi.hpp"
#include "linalg.hpp"
#include "window.hpp"

#include <complex>
#include <functional>
#include <optional>

namespace isotorus {

// A coefficient sequence with its true starting index: offdiagonals
// begin at j = 1, diagonals at j = 0.  All transforms phase against the
// absolute index.
struct real_sequence {
    std::vector<double> values;
    long long first = 1;

    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] long long last() const {
        return first + static_cast<long long>(values.size()) - 1;
    }
    [[nodiscard]] double at_abs(long long j) const {
        if (j < first || j > last()) throw validation_error("real_sequence: index out of range");
        return values[std::size_t(j - first)];
    }
};

inline real_sequence offdiagonal_sequence(const jacobi_matrix& J) {
    return {J.b, 1};
}
inline real_sequence diagonal_sequence(const jacobi_matrix& J) {
    return {J.a, 0};
}

// One retained representative of a +-k pair of integer combinations of
// the fundamental frequencies, reduced into [0, pi].
struct lattice_entry {
    std::vector<int> k;
    double omega = 0.0;          // 2pi k.w folded into [0, pi], ends snapped
    bool conjugated = false;     // reduction came from the (pi, 2pi) image
    std::size_t multiplicity = 1; // >1 when near-coincident lines were merged
};

struct frequency_lattice {
    std::vector<double> fundamental;  // d entries in (0,1)
    int L = 0;
    std::vector<lattice_entry> entries;   // ascending omega
    double min_spacing = pi;              // between distinct retained omegas
    std::size_t raw_size = 0;             // all k with |k|_1 <= L, both signs

    [[nodiscard]] std::size_t size() const { return entries.size(); }
};

namespace detail {

inline void enumerate_l1_ball(int d, int L, std::vector<int>& k,
                              const std::function<void(const std::vector<int>&)>& emit,
                              int pos = 0, int budget = 0) {
    if (pos == 0) budget = L;
    if (pos == d) {
        emit(k);
        return;
    }
    for (int v = -budget; v <= budget; ++v) {
        k[pos] = v;
        enumerate_l1_ball(d, L, k, emit, pos + 1, budget - std::abs(v));
    }
}

inline bool canonical_rep(const std::vector<int>& k) {
    for (int v : k) {
        if (v > 0) return true;
        if (v < 0) return false;
    }
    return true;   // k = 0
}

inline int l1_norm(const std::vector<int>& k) {
    int s = 0;
    for (int v : k) s += std::abs(v);
    return s;
}

} // namespace detail

// All integer combinations k.w of the fundamentals with |k|_1 <= L, one
// representative per +-k pair, frequencies folded into [0, pi].  Entries
// landing within the collision tolerance of each other are merged into a
// single unknown (greedy chain on the sorted list) with a multiplicity.
inline frequency_lattice build_lattice(const std::vector<double>& fundamental, int L,
                                       double collision_tol = 1e-9) {
    if (fundamental.empty()) throw validation_error("build_lattice: no fundamentals");
    for (double w : fundamental)
        if (!(w > 0.0 && w < 1.0))
            throw validation_error("build_lattice: fundamentals must lie in (0,1)");
    if (L < 1) throw validation_error("build_lattice: L >= 1 required");

    frequency_lattice lat;
    lat.fundamental = fundamental;
    lat.L = L;
    const int d = int(fundamental.size());
    std::vector<int> k(d, 0);
    const double snap_tol = 1e-9;
    detail::enumerate_l1_ball(d, L, k, [&](const std::vector<int>& kk) {
        ++lat.raw_size;
        if (!detail::canonical_rep(kk)) return;
        kahan_sum dot;
        for (int i = 0; i < d; ++i) dot.add(kk[i] * fundamental[i]);
        double t = std::fmod(2.0 * pi * dot.value(), 2.0 * pi);
        if (t < 0.0) t += 2.0 * pi;
        bool conj = false;
        if (t > pi) {
            t = 2.0 * pi - t;
            conj = true;
        }
        if (t < snap_tol) t = 0.0;
        if (pi - t < snap_tol) t = pi;
        lat.entries.push_back({kk, t, conj, 1});
    });

    std::sort(lat.entries.begin(), lat.entries.end(),
              [](const lattice_entry& a, const lattice_entry& b) {
                  if (a.omega != b.omega) return a.omega < b.omega;
                  const int na = detail::l1_norm(a.k), nb = detail::l1_norm(b.k);
                  if (na != nb) return na < nb;
                  return a.k < b.k;
              });

    std::vector<lattice_entry> merged;
    for (auto& e : lat.entries) {
        if (!merged.empty() && e.omega - merged.back().omega <= collision_tol)
            ++merged.back().multiplicity;
        else
            merged.push_back(std::move(e));
    }
    lat.entries = std::move(merged);

    lat.min_spacing = pi;
    for (std::size_t i = 1; i < lat.entries.size(); ++i)
        lat.min_spacing =
            std::min(lat.min_spacing, lat.entries[i].omega - lat.entries[i - 1].omega);
    return lat;
}

inline std::size_t nearest_entry(const frequency_lattice& lat, double omega) {
    if (lat.entries.empty()) throw validation_error("nearest_entry: empty lattice");
    std::size_t best = 0;
    for (std::size_t i = 1; i < lat.entries.size(); ++i)
        if (std::abs(lat.entries[i].omega - omega) < std::abs(lat.entries[best].omega - omega))
            best = i;
    return best;
}

// Index of the entry whose representative is k or -k.
inline std::optional<std::size_t> find_entry(const frequency_lattice& lat,
                                             const std::vector<int>& k) {
    std::vector<int> neg(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) neg[i] = -k[i];
    for (std::size_t i = 0; i < lat.entries.size(); ++i)
        if (lat.entries[i].k == k || lat.entries[i].k == neg) return i;
    return std::nullopt;
}

namespace detail {

// Centered windowed transform sum_m w_{M+m} b_{j0+m} e^{-i omega m} with
// j0 = lag + M; the phase reference at the window center is what makes
// the amplitude/phase kernels below real.
inline std::complex<double> windowed_dft_centered(const real_sequence& b,
                                                  const dolph_window& win, long long lag,
                                                  double omega) {
    if (lag < b.first || lag + win.length - 1 > b.last())
        throw validation_error("windowed_dft: window support [" + std::to_string(lag) + ", " +
                               std::to_string(lag + win.length - 1) +
                               "] leaves the available sequence range");
    const int M = win.half();
    kahan_sum re, im;
    double cr = 1.0, ci = 0.0;   // e^{-i omega m}, re-anchored periodically
    const double sc = std::cos(omega), ss = std::sin(omega);
    for (int t = 0; t < win.length; ++t) {
        const int m = t - M;
        if ((t & 255) == 0) {
            cr = std::cos(omega * m);
            ci = -std::sin(omega * m);
        }
        const double f = win.weights[t] * b.values[std::size_t(lag - b.first) + t];
        re.add(f * cr);
        im.add(f * ci);
        const double nr = cr * sc + ci * ss;   // multiply by e^{-i omega}
        const double ni = ci * sc - cr * ss;
        cr = nr;
        ci = ni;
    }
    return {re.value(), im.value()};
}

} // namespace detail

// F(omega) = sum_t w_t b_{lag+t} e^{-i omega (lag+t)} over the window
// support; phases reference the absolute sequence index.
inline std::complex<double> windowed_dft(const real_sequence& b, const dolph_window& win,
                                         long long lag, double omega) {
    const std::complex<double> centered = detail::windowed_dft_centered(b, win, lag, omega);
    const double j0 = double(lag + win.half());
    return centered * std::polar(1.0, -omega * j0);
}

struct harmonic_spectrum {
    frequency_lattice lattice;
    std::vector<double> amplitude;    // |C_k| per entry; DC holds |mean|
    std::vector<double> phase;        // psi_k in (-pi, pi]; DC and pi entries 0 or pi
    std::vector<double> fit_residual; // lag extrapolation only
    std::vector<char> reliable;       // likewise
    std::vector<std::string> warnings;
    long long lag = 0;

    [[nodiscard]] std::size_t size() const { return amplitude.size(); }
};

struct extract_options {
    // full-bandwidth (exact) kernel up to this many entries; larger
    // systems drop kernel entries guaranteed below the threshold
    std::size_t dense_limit = 600;
    double tau = 0.0;        // kernel threshold; 0 means the window ripple
    double cond_cap = 1e12;
    double mainlobe_warn_factor = 4.0;
};

namespace detail {

// Frequency distance within which |W| can exceed tau; at tau = ripple
// this is exactly the main lobe edge, larger tau narrows it.
inline double edge_for_threshold(const dolph_window& win, double tau) {
    if (tau <= win.ripple) return win.mainlobe_edge();
    if (tau >= 1.0) throw validation_error("extract: kernel threshold must be < 1");
    const double x = std::cosh(std::acosh(tau / win.ripple) / (win.length - 1));
    return 2.0 * std::acos(std::min(1.0, x / win.x0));
}

} // namespace detail

// Known-frequency least-error amplitude/phase recovery.  Writing the
// signal around the window center j0 as P_e cos(omega_e m) + Q_e
// sin(omega_e m) decouples the transform values into two real systems:
//   Re F(omega_k) =  sum_e (W(d)+W(s))/2 P_e
//   Im F(omega_k) = -sum_e (W(d)-W(s))/2 Q_e,  d = omega_k - omega_e,
// s = omega_k + omega_e; both matrices are banded in the sorted
// frequencies once entries below the threshold are dropped.
inline harmonic_spectrum extract_spectrum(const real_sequence& b, const frequency_lattice& lat,
                                          const dolph_window& win, long long lag,
                                          const extract_options& opt = {}) {
    const std::size_t E = lat.entries.size();
    if (E == 0) throw validation_error("extract_spectrum: empty lattice");

    harmonic_spectrum spec;
    spec.lattice = lat;
    spec.lag = lag;
    if (win.mainlobe_edge() > opt.mainlobe_warn_factor * lat.min_spacing)
        spec.warnings.push_back(
            "window main lobe spans several lattice spacings; couplings are strong "
            "(edge " + std::to_string(win.mainlobe_edge()) + ", spacing " +
            std::to_string(lat.min_spacing) + ")");

    const long long j0 = lag + win.half();
    std::vector<std::complex<double>> F(E);
    for (std::size_t e = 0; e < E; ++e)
        F[e] = detail::windowed_dft_centered(b, win, lag, lat.entries[e].omega);

    const double tau = opt.tau > 0.0 ? opt.tau : win.ripple;
    const double edge = detail::edge_for_threshold(win, tau);

    std::size_t hb = E - 1;
    if (E > opt.dense_limit) {
        hb = 0;
        std::size_t lo = 0;
        for (std::size_t kk = 0; kk < E; ++kk) {
            while (lat.entries[kk].omega - lat.entries[lo].omega > edge) ++lo;
            hb = std::max(hb, kk - lo);
        }
        // entries whose frequencies sum below the edge (or above 2pi-edge)
        // also couple; they form prefix/suffix clusters of the sorted list
        std::size_t p = 0;
        while (p < E && lat.entries[p].omega <= edge) ++p;
        if (p > 0) hb = std::max(hb, p - 1);
        std::size_t q = E;
        while (q > 0 && lat.entries[q - 1].omega >= pi - edge) --q;
        if (q < E) hb = std::max(hb, E - q - 1);
    }

    auto wplus = [&](double wk, double we) {
        return 0.5 * (win.transform(wk - we) + win.transform(wk + we));
    };
    auto wminus = [&](double wk, double we) {
        return 0.5 * (win.transform(wk - we) - win.transform(wk + we));
    };

    std::vector<double> P(E, 0.0);
    {
        band_matrix A(E, hb, hb);
        std::vector<double> rhs(E);
        for (std::size_t kk = 0; kk < E; ++kk) {
            const double wk = lat.entries[kk].omega;
            const std::size_t e0 = kk > hb ? kk - hb : 0;
            const std::size_t e1 = std::min(E - 1, kk + hb);
            for (std::size_t e = e0; e <= e1; ++e)
                A.at(kk, e) = wplus(wk, lat.entries[e].omega);
            rhs[kk] = F[kk].real();
        }
        const double cond = A.solve(rhs);
        if (cond > opt.cond_cap)
            throw numerical_error(
                "extract_spectrum: cosine system condition " + std::to_string(cond) +
                " beyond cap; use a longer window or a smaller lattice radius");
        P = std::move(rhs);
    }

    // sine block: entries at exactly 0 or pi have no sine component
    std::vector<std::size_t> sub;
    for (std::size_t e = 0; e < E; ++e)
        if (lat.entries[e].omega != 0.0 && lat.entries[e].omega != pi) sub.push_back(e);
    std::vector<double> Q(E, 0.0);
    if (!sub.empty()) {
        const std::size_t Es = sub.size();
        const std::size_t hbs = std::min(hb, Es - 1);
        band_matrix A(Es, hbs, hbs);
        std::vector<double> rhs(Es);
        for (std::size_t ks = 0; ks < Es; ++ks) {
            const double wk = lat.entries[sub[ks]].omega;
            const std::size_t e0 = ks > hbs ? ks - hbs : 0;
            const std::size_t e1 = std::min(Es - 1, ks + hbs);
            for (std::size_t es = e0; es <= e1; ++es)
                A.at(ks, es) = wminus(wk, lat.entries[sub[es]].omega);
            rhs[ks] = -F[sub[ks]].imag();
        }
        const double cond = A.solve(rhs);
        if (cond > opt.cond_cap)
            throw numerical_error(
                "extract_spectrum: sine system condition " + std::to_string(cond) +
                " beyond cap; use a longer window or a smaller lattice radius");
        for (std::size_t ks = 0; ks < Es; ++ks) Q[sub[ks]] = rhs[ks];
    }

    spec.amplitude.resize(E);
    spec.phase.resize(E);
    for (std::size_t e = 0; e < E; ++e) {
        const double w = lat.entries[e].omega;
        const double phi = w * double(j0);
        const double cphi = std::cos(phi), sphi = std::sin(phi);
        const double c = P[e] * cphi - Q[e] * sphi;
        const double s = P[e] * sphi + Q[e] * cphi;
        if (w == 0.0) {
            spec.amplitude[e] = std::abs(c);
            spec.phase[e] = c >= 0.0 ? 0.0 : pi;
        } else {
            spec.amplitude[e] = 0.5 * std::hypot(c, s);
            double psi = std::atan2(-s, c);
            if (psi <= -pi) psi += 2.0 * pi;
            spec.phase[e] = psi;
        }
    }
    return spec;
}

// b-hat_j = (DC term) + sum over the other entries of
// 2 |C_k| cos(omega_k j + psi_k), evaluated at absolute indices.
inline real_sequence synthesize(const harmonic_spectrum& spec, long long first,
                                std::size_t count) {
    real_sequence out;
    out.first = first;
    out.values.resize(count);
    for (std::size_t t = 0; t < count; ++t) {
        const double j = double(first + static_cast<long long>(t));
        kahan_sum acc;
        for (std::size_t e = 0; e < spec.size(); ++e) {
            const double w = spec.lattice.entries[e].omega;
            if (w == 0.0)
                acc.add(spec.amplitude[e] * std::cos(spec.phase[e]));
            else
                acc.add(2.0 * spec.amplitude[e] * std::cos(w * j + spec.phase[e]));
        }
        out.values[t] = acc.value();
    }
    return out;
}

struct lag_fit_options {
    extract_options extract;
    double residual_abs = 1e-9;   // fit rms below max(abs, rel*|D|) is reliable
    double residual_rel = 0.1;
};

// Geometric default lag ladder between one sixteenth and one half of the
// sequence, leaving room for the window at the top.
inline std::vector<long long> default_lag_schedule(const real_sequence& b, int window_len,
                                                   int count = 8) {
    const long long lo = std::max(b.first, b.first + static_cast<long long>(b.size()) / 16);
    const long long hi = b.first + static_cast<long long>(b.size()) / 2 - window_len;
    if (hi <= lo) throw validation_error("lag schedule: sequence too short for this window");
    std::vector<long long> lags;
    for (int i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : double(i) / (count - 1);
        const long long l =
            llround(double(lo) * std::pow(double(hi) / double(lo), f));
        if (lags.empty() || l > lags.back()) lags.push_back(l);
    }
    if (lags.size() < 3) throw validation_error("lag schedule: fewer than 3 distinct lags");
    return lags;
}

// Extraction repeated over a lag ladder, with the per-entry complex
// coefficients fit against D(l) = D_inf + c/l; the O(1/j) approach of the
// coefficients to their almost-periodic limit makes this the natural
// extrapolant.  Entries whose fit residual is large are flagged.
inline harmonic_spectrum lag_extrapolate(const real_sequence& b, const frequency_lattice& lat,
                                         const dolph_window& win,
                                         const std::vector<long long>& lags,
                                         const lag_fit_options& opt = {}) {
    if (lags.size() < 3) throw validation_error("lag_extrapolate: need at least 3 lags");
    for (std::size_t i = 1; i < lags.size(); ++i)
        if (lags[i] <= lags[i - 1])
            throw validation_error("lag_extrapolate: lags must be strictly increasing");

    std::vector<harmonic_spectrum> per_lag;
    per_lag.reserve(lags.size());
    for (long long l : lags) per_lag.push_back(extract_spectrum(b, lat, win, l, opt.extract));

    const std::size_t E = lat.entries.size();
    harmonic_spectrum out;
    out.lattice = lat;
    out.lag = lags.back();
    out.warnings = per_lag.front().warnings;
    out.amplitude.resize(E);
    out.phase.resize(E);
    out.fit_residual.resize(E);
    out.reliable.resize(E);

    std::vector<double> x(lags.size()), yre(lags.size()), yim(lags.size());
    for (std::size_t i = 0; i < lags.size(); ++i) x[i] = 1.0 / double(lags[i]);
    for (std::size_t e = 0; e < E; ++e) {
        for (std::size_t i = 0; i < lags.size(); ++i) {
            const std::complex<double> D =
                std::polar(per_lag[i].amplitude[e], per_lag[i].phase[e]);
            yre[i] = D.real();
            yim[i] = D.imag();
        }
        const auto fre = fit_line(x, yre);
        const auto fim = fit_line(x, yim);
        const std::complex<double> Dinf(fre.intercept, fim.intercept);
        out.fit_residual[e] = std::hypot(fre.rms_residual, fim.rms_residual);
        out.reliable[e] =
            out.fit_residual[e] <=
            std::max(opt.residual_abs, opt.residual_rel * std::abs(Dinf));
        if (lat.entries[e].omega == 0.0) {
            out.amplitude[e] = std::abs(Dinf.real());
            out.phase[e] = Dinf.real() >= 0.0 ? 0.0 : pi;
        } else {
            out.amplitude[e] = std::abs(Dinf);
            double psi = std::arg(Dinf);
            if (psi <= -pi) psi += 2.0 * pi;
            out.phase[e] = psi;
        }
    }
    return out;
}

} // namespace isotorus
