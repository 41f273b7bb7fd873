// End-to-end acceptance runs.  Each numbered check prints exactly one
// PASS/FAIL line with its measured quantities and wall time; the binary
// exits with the number of failures.  Tolerances are pinned here, next to
// the quantity they bound.

#include <isotorus/equilibrium.hpp>
#include <isotorus/harmonic.hpp>
#include <isotorus/ifs.hpp>
#include <isotorus/jacobi.hpp>
#include <isotorus/linalg.hpp>
#include <isotorus/torus.hpp>
#include <isotorus/window.hpp>

#include <array>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

using namespace isotorus;

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

struct outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

void run_check(int id, const char* title, const std::function<outcome()>& fn) {
    stopwatch sw;
    outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, fmt("exception: %s", e.what())};
    }
    std::printf("%s %2d  %-40s %s  [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title,
                o.detail.c_str(), sw.seconds());
    if (!o.pass) ++g_failures;
}

affine_ifs example_one() { return affine_ifs({{0.34, -1.0}, {0.52, 1.0}}); }
affine_ifs example_weighted() {
    return affine_ifs({{0.34, -1.0}, {0.52, 1.0}}, {0.6, 0.4});
}

torus_point midpoint_of(const interval_union& bands) {
    return make_torus_point(bands, point_rule_from_name("midpoint-plus"));
}

// Atoms of the computed equilibrium measure: the solver's own first-kind
// nodes carrying h/P, the same discretization its band masses use.
discrete_measure equilibrium_atoms(const equilibrium_solution& sol) {
    discrete_measure m;
    const int P = sol.options.quad_points;
    for (std::size_t i = 0; i < sol.bands.size(); ++i)
        for (int p = 0; p < P; ++p)
            m.atoms.push_back({sol.band_nodes[i][p], sol.band_h[i][p] / double(P)});
    m.normalize();
    return m;
}

double percentile95(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t idx =
        std::min(v.size() - 1, std::size_t(std::ceil(0.95 * double(v.size()))) - 1);
    return v[idx];
}

// ---- checks 3 and 6 share the long tracking runs -------------------------

struct tracking_run {
    double angular = 0.0;            // second ordered gap, from the gap masses
    double line_amp = 0.0;           // cosine amplitude 2|C| at that fundamental
    std::vector<double> fund_amp;    // 2|C| per ascending gap
    std::vector<double> gap_len;
};

std::optional<tracking_run> g_tracking[2];   // n = 2, 3

tracking_run track_level(const affine_ifs& ifs, int n) {
    const auto bands = iterate_bands(ifs, n);
    const auto sol = solve_equilibrium(bands);
    const auto og = ordered_gaps(ifs, n);
    const std::size_t ai = og.ascending_index[1];

    tracking_run r;
    r.angular = angular_frequency(sol, ai);

    // fixed resolution chosen so the sampled prefix (below) stays well
    // inside the reproducible head of a K-atom discretization: about
    // 0.47 K rows at 4 bands, 0.32 K at 8
    torus_jacobi_options topt;
    topt.nodes_per_band = 32768;   // K = 131072 at n = 2, 262144 at n = 3
    const auto th = torus_jacobi(bands, midpoint_of(bands), 100001, topt);

    const auto b = offdiagonal_sequence(th.jac);    // 1e5 offdiagonals
    const auto lat = build_lattice(sol.frequencies, 6);
    const auto win = make_dolph_window(n == 2 ? 8421 : 30001, 120.0);
    const std::vector<long long> lags =
        n == 2 ? std::vector<long long>{3000, 5200, 9000, 15600, 27000, 37500}
               : std::vector<long long>{3000, 5200, 9000, 15600, 27000};
    const auto spec = lag_extrapolate(b, lat, win, lags);

    const auto gaps = gaps_of(bands);
    for (std::size_t i = 0; i < sol.frequencies.size(); ++i) {
        std::vector<int> k(sol.frequencies.size(), 0);
        k[i] = 1;
        const auto e = find_entry(lat, k);
        const std::size_t idx = e ? *e : nearest_entry(lat, angular_frequency(sol, i));
        r.fund_amp.push_back(2.0 * spec.amplitude[idx]);
        r.gap_len.push_back(gaps[i].length());
        if (i == ai) r.line_amp = r.fund_amp.back();
    }
    return r;
}

// ---- checks 7 and 8 share the synthesis pipeline -------------------------

// Difference between b_j of the transfer iterate and the torus sequence
// synthesized from the iterate's own extrapolated phases plus the
// amplitude invariants taken from a midpoint torus run.
std::vector<double> synthesis_profile(const affine_ifs& ifs, initial_measure kind, int n,
                                      std::size_t rows, int L, int win_len,
                                      const std::vector<long long>& lags,
                                      std::size_t theta_nodes, std::size_t mu_base) {
    const auto bands = iterate_bands(ifs, n);
    const auto sol = solve_equilibrium(bands);

    torus_jacobi_options topt;
    topt.nodes_per_band = theta_nodes;
    const auto theta = torus_jacobi(bands, midpoint_of(bands), rows, topt).jac;

    mu_n_options mo;
    mo.base_nodes = mu_base;
    mo.verify_doubling = false;
    const auto mu = jacobi_mu_n(ifs, kind, n, rows, mo).jac;

    const auto btheta = offdiagonal_sequence(theta);
    const auto bmu = offdiagonal_sequence(mu);
    const auto lat = build_lattice(sol.frequencies, L);
    const auto win = make_dolph_window(win_len, 120.0);

    const auto spec_theta = lag_extrapolate(btheta, lat, win, lags);
    auto spec_mu = lag_extrapolate(bmu, lat, win, lags);
    spec_mu.amplitude = spec_theta.amplitude;
    const auto synth = synthesize(spec_mu, bmu.first, bmu.size());

    std::vector<double> diff(bmu.size());
    for (std::size_t i = 0; i < bmu.size(); ++i)
        diff[i] = std::abs(bmu.values[i] - synth.values[i]);
    return diff;
}

struct decay_fit {
    double d = std::numeric_limits<double>::quiet_NaN();
    std::size_t points = 0;
    double floor = 0.0;
};

// same windowing as the command-line tool: fit log diff against j from
// j = 5 to where a 50-index lookahead maximum falls under 10x the plateau
// floor.  Fitting through the beat dips instead of stopping at the first
// one keeps the slope honest for oscillating profiles.
decay_fit fit_decay(const std::vector<double>& diff) {
    decay_fit f;
    if (diff.size() < 70) return f;
    std::vector<double> tail(diff.begin() + 3 * diff.size() / 4, diff.end());
    f.floor = median_of(tail);
    // the fit window ends where the running median of the profile settles
    // onto the tail floor: past that point the transient no longer dominates
    // the reconstruction noise.  a median tracks the typical magnitude of the
    // oscillating profile, so isolated dips and spikes do not move the cut.
    const double thresh = 1.5 * f.floor;
    std::size_t j_end = diff.size();
    const std::size_t h = 10;
    for (std::size_t i = h; i + h < diff.size(); ++i) {
        std::vector<double> win(diff.begin() + (i - h), diff.begin() + (i + h + 1));
        if (median_of(std::move(win)) < thresh) {
            j_end = i;
            break;
        }
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 4; i < j_end; ++i)
        if (diff[i] > 0.0) {
            xs.push_back(double(i + 1));
            ys.push_back(std::log(diff[i]));
        }
    f.points = xs.size();
    if (f.points < 8) return f;
    f.d = -fit_line(xs, ys).slope;
    return f;
}

// ---- check 10: long double Hankel determinants ---------------------------

long double det_ld(std::vector<long double> m, int n) {
    long double d = 1.0L;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs((double)m[r * n + c]) > std::fabs((double)m[piv * n + c])) piv = r;
        if (m[piv * n + c] == 0.0L) return 0.0L;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(m[c * n + k], m[piv * n + k]);
            d = -d;
        }
        d *= m[c * n + c];
        for (int r = c + 1; r < n; ++r) {
            const long double f = m[r * n + c] / m[c * n + c];
            for (int k = c; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
        }
    }
    return d;
}

long double hankel_det(const std::vector<long double>& mom, int n, bool shifted) {
    if (n == 0) return 1.0L;
    std::vector<long double> m(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m[i * n + j] = (shifted && j == n - 1) ? mom[i + n] : mom[i + j];
    return det_ld(m, n);
}

// --------------------------------------------------------------------------

outcome check_single_interval() {
    stopwatch sw;
    const auto sol = solve_equilibrium(interval_union({{-1.0, 1.0}}, 0));
    const double cap_err = std::abs(sol.capacity - 0.5);
    const auto J = jacobi_from_discrete(equilibrium_atoms(sol), 65);
    double amax = 0.0, bmax = 0.0;
    for (double a : J.a) amax = std::max(amax, std::abs(a));
    const double b1_err = std::abs(J.b[0] - 1.0 / std::sqrt(2.0));
    for (std::size_t j = 1; j < J.b.size(); ++j) bmax = std::max(bmax, std::abs(J.b[j] - 0.5));
    const double el = sw.seconds();
    const bool pass = cap_err < 1e-10 && amax < 1e-10 && b1_err < 1e-9 && bmax < 1e-9 && el < 1.0;
    return {pass, fmt("cap err %.1e, max|a| %.1e, b1 err %.1e, b err %.1e", cap_err, amax,
                      b1_err, bmax)};
}

outcome check_symmetric_bands() {
    stopwatch sw;
    const auto sol = solve_equilibrium(interval_union({{-1.0, -0.3}, {0.3, 1.0}}, 0));
    const double z_err = std::abs(sol.zeta()[0]);
    const double w_err = std::abs(sol.frequencies[0] - 0.5);
    const double el = sw.seconds();
    const bool pass = z_err < 1e-10 && w_err < 1e-10 && el < 1.0;
    return {pass, fmt("|zeta| %.1e, |omega-1/2| %.1e", z_err, w_err)};
}

outcome check_line_tracking() {
    stopwatch sw;
    const auto ifs = example_one();
    std::string detail;
    bool pass = true;
    for (int n : {2, 3}) {
        const auto r = track_level(ifs, n);
        g_tracking[n - 2] = r;
        const double target = n == 2 ? 2.43e-2 : 2.44e-2;
        const bool ok = std::abs(r.angular - 1.5543) <= 0.002 &&
                        std::abs(r.line_amp - target) <= 0.05 * target;
        pass = pass && ok;
        detail += fmt("n=%d: ang %.5f amp %.4e (want %.2e+-5%%)%s", n, r.angular, r.line_amp,
                      target, n == 2 ? "; " : "");
    }
    pass = pass && sw.seconds() < 1200.0;
    return {pass, detail};
}

outcome check_round_trip() {
    stopwatch sw;
    std::mt19937_64 rng(20260825);
    std::uniform_real_distribution<double> Uf(0.06, 0.44), Up(-pi, pi), Ue(-4.0, 0.0);

    frequency_lattice lat;
    for (int attempt = 0;; ++attempt) {
        if (attempt > 100) throw numerical_error("round trip: no usable random module");
        lat = build_lattice({Uf(rng), Uf(rng), Uf(rng)}, 2);
        bool clean = lat.min_spacing > 0.02;
        for (std::size_t e = 1; e < lat.entries.size(); ++e)
            clean = clean && lat.entries[e].omega != 0.0 && lat.entries[e].omega != pi;
        if (clean) break;
    }

    harmonic_spectrum truth;
    truth.lattice = lat;
    for (std::size_t e = 0; e < lat.entries.size(); ++e) {
        truth.amplitude.push_back(std::pow(10.0, Ue(rng)));   // [1e-4, 1]
        truth.phase.push_back(lat.entries[e].omega == 0.0 ? 0.0 : Up(rng));
    }
    const auto seq = synthesize(truth, 1, 30000);
    const auto win = make_dolph_window(default_window_length(seq.size(), lat.min_spacing), 120.0);
    const auto ex = extract_spectrum(seq, lat, win, 5000);

    double amp_err = 0.0, ph_err = 0.0;
    for (std::size_t e = 0; e < lat.entries.size(); ++e) {
        amp_err = std::max(amp_err, std::abs(ex.amplitude[e] - truth.amplitude[e]));
        ph_err = std::max(ph_err,
                          std::abs(std::remainder(ex.phase[e] - truth.phase[e], 2.0 * pi)));
    }
    const double el = sw.seconds();
    const bool pass = lat.raw_size == 25 && amp_err < 1e-8 && ph_err < 1e-8 && el < 30.0;
    return {pass, fmt("25 lines (%zu entries), amp err %.1e, phase err %.1e, window %d",
                      lat.entries.size(), amp_err, ph_err, win.length)};
}

outcome check_point_invariance() {
    stopwatch sw;
    const auto ifs = example_one();
    const auto bands = iterate_bands(ifs, 2);
    const auto sol = solve_equilibrium(bands);
    const auto lat = build_lattice(sol.frequencies, 4);
    const auto win = make_dolph_window(8421, 120.0);
    const std::vector<long long> lags{3000, 5500, 10000, 18000};

    torus_jacobi_options topt;
    topt.nodes_per_band = 16384;
    auto spectrum_at = [&](const char* rule) {
        const auto pt = make_torus_point(bands, point_rule_from_name(rule));
        const auto jac = torus_jacobi(bands, pt, 32769, topt).jac;
        return lag_extrapolate(offdiagonal_sequence(jac), lat, win, lags);
    };
    const auto sm = spectrum_at("midpoint-plus");
    const auto st = spectrum_at("third-mixed");

    double worst = 0.0;
    std::size_t checked = 0;
    for (std::size_t e = 0; e < lat.entries.size(); ++e) {
        const double big = std::max(sm.amplitude[e], st.amplitude[e]);
        if (big <= 1e-5) continue;
        ++checked;
        worst = std::max(worst, std::abs(sm.amplitude[e] - st.amplitude[e]) / big);
    }
    const bool pass = checked > 0 && worst <= 1e-3 && sw.seconds() < 1200.0;
    return {pass, fmt("%zu of %zu entries above 1e-5, worst rel diff %.2e", checked,
                      lat.entries.size(), worst)};
}

outcome check_gap_amplitude() {
    if (!g_tracking[0] || !g_tracking[1])
        return {false, "tracking runs unavailable (check 3 failed early)"};
    std::vector<double> G, C;
    for (const auto& r : g_tracking) {
        G.insert(G.end(), r->gap_len.begin(), r->gap_len.end());
        C.insert(C.end(), r->fund_amp.begin(), r->fund_amp.end());
    }
    const double corr = pearson_correlation(G, C);
    const double slope = fit_through_origin(G, C);
    const bool pass = corr >= 0.99;
    return {pass, fmt("%zu gaps, correlation %.5f, slope through origin %.4f", G.size(), corr,
                      slope)};
}

outcome check_case_shapes() {
    stopwatch sw;
    const auto ifs = example_one();
    const std::vector<long long> lags{2000, 3600, 6600, 11580};
    const auto diff_a =
        synthesis_profile(ifs, initial_measure::lebesgue, 2, 20001, 6, 8421, lags, 16384, 16384);
    const auto diff_b =
        synthesis_profile(ifs, initial_measure::chebyshev2, 2, 20001, 6, 8421, lags, 16384, 16384);

    // case a: |b_j(mu) - b_j(theta)| under A/j across j in [10, 1000],
    // with A set from the first decade and at most 5% of points above
    std::vector<double> jd;
    for (std::size_t j = 10; j <= 100; ++j) jd.push_back(double(j) * diff_a[j - 1]);
    const double A = percentile95(jd);
    std::size_t viol = 0, total = 0;
    for (std::size_t j = 10; j <= 1000; ++j) {
        ++total;
        if (diff_a[j - 1] > A / double(j)) ++viol;
    }
    const bool bound_ok = viol <= total / 20;

    // case a follows a power law: its log-log slope over the same decades
    // as the A/j bound, spread per index, gives an equivalent linear rate.
    // A genuine exponential on the case-b side must beat five times that.
    std::vector<double> lx, ly;
    for (std::size_t j = 10; j <= 1000; ++j)
        if (diff_a[j - 1] > 0.0) {
            lx.push_back(std::log(double(j)));
            ly.push_back(std::log(diff_a[j - 1]));
        }
    const double slope_a = fit_line(lx, ly).slope;
    const double rate_a = std::abs(slope_a) * std::log(100.0) / 990.0;
    const auto fb = fit_decay(diff_b);
    const bool slope_ok = lx.size() >= 100 && fb.points >= 8 && fb.d >= 5.0 * rate_a;

    const bool pass = bound_ok && slope_ok && sw.seconds() < 1200.0;
    return {pass, fmt("A %.3f, %zu/%zu above A/j; a slope %.2f -> rate %.5f, b rate %.4f "
                      "(%zu pts), ratio %.1f", A, viol, total, slope_a, rate_a, fb.d, fb.points,
                      rate_a > 0.0 ? fb.d / rate_a : 0.0)};
}

outcome check_weighted_decay() {
    stopwatch sw;
    const auto ifs = example_weighted();
    const std::vector<long long> lags{2000, 3400, 5800, 9300};
    // deeper levels carry denser lattices: the window grows to keep lines
    // resolvable while the truncation order comes down only as far as the
    // profile's own floor allows (the first excluded shell must sit below
    // the decaying transient, or the rate fit has nothing to see)
    struct level_cfg { int L, win; std::size_t rows; };
    const std::array<level_cfg, 4> lv{{{6, 6001, 16385},
                                       {6, 6001, 16385},
                                       {4, 16385, 25857},
                                       {3, 30001, 39424}}};
    std::array<double, 4> d{};
    std::string detail;
    for (int n = 1; n <= 4; ++n) {
        const auto& c = lv[n - 1];
        const auto diff = synthesis_profile(ifs, initial_measure::chebyshev2, n, c.rows, c.L,
                                            c.win, lags, 16384, 16384);
        const auto f = fit_decay(diff);
        d[n - 1] = f.d;
        detail += fmt("d%d %.4f (%zu pts)%s", n, f.d, f.points, n < 4 ? ", " : "");
    }
    std::vector<double> xs, ys;
    for (int n = 1; n <= 4; ++n) {
        if (!(d[n - 1] > 0.0)) return {false, detail + " -- rate fit failed"};
        xs.push_back(double(n));
        ys.push_back(std::log(d[n - 1]));
    }
    const double delta = -fit_line(xs, ys).slope;
    const bool pass = std::abs(d[0] - 0.300994) <= 0.15 * 0.300994 &&
                      std::abs(d[1] - 0.164903) <= 0.15 * 0.164903 &&
                      std::abs(delta - 0.644) <= 0.1;
    return {pass, detail + fmt(", delta %.3f", delta)};
}

outcome check_stable_prefixes() {
    // level 5 is the deepest the gap-polynomial solve supports; it stands
    // in for the limit each shallower level is measured against
    const auto lim =
        torus_limit_sequence(example_one(), point_rule_from_name("midpoint-plus"), 5, 4097, 1e-3);
    const auto& t = lim.table;   // rows n = 1..4 against level 5
    const std::size_t N2 = t[1].stable_len, N3 = t[2].stable_len, N4 = t[3].stable_len;
    const bool pass = N3 >= N2 && N4 >= N3 && N4 >= 2 * N2;
    return {pass, fmt("N(1e-3) = %zu, %zu, %zu for n = 2, 3, 4 vs level 5", N2, N3, N4)};
}

outcome check_hankel() {
    const auto ifs = example_one();
    const auto bands = iterate_bands(ifs, 1);
    const auto m = build_torus_measure(bands, midpoint_of(bands));
    const auto pipe = torus_jacobi(m, 8).jac;

    // moments of the same measure by direct first-kind quadrature; the
    // substitution absorbs both endpoint square roots
    const int Q = 4000;
    std::vector<long double> mom(17, 0.0L);
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const double c = bands.bands[i].center(), hw = bands.bands[i].halfwidth();
        for (int p = 0; p < Q; ++p) {
            const double th = (p + 0.5) * pi / Q;
            const double x = c + hw * std::cos(th);
            const long double base = (long double)(m.ac_density(x) * hw * std::sin(th) * pi / Q);
            long double xp = 1.0L;
            for (int k = 0; k <= 16; ++k) {
                mom[k] += base * xp;
                xp *= (long double)x;
            }
        }
    }
    for (std::size_t i = 0; i < m.atom_mass.size(); ++i) {
        if (m.atom_mass[i] <= 0.0) continue;
        long double xp = 1.0L;
        for (int k = 0; k <= 16; ++k) {
            mom[k] += (long double)m.atom_mass[i] * xp;
            xp *= (long double)m.point.xi[i];
        }
    }

    std::vector<long double> D(10), E(10);
    for (int n = 0; n <= 9; ++n) {
        D[n] = hankel_det(mom, n, false);
        E[n] = hankel_det(mom, n, true);
    }
    double err = 0.0;
    for (int j = 0; j <= 7; ++j) {
        const double a_ref = double(E[j + 1] / D[j + 1] - (j ? E[j] / D[j] : 0.0L));
        err = std::max(err, std::abs(pipe.a[j] - a_ref));
        if (j >= 1) {
            const double b_ref = double(sqrtl(D[j + 1] * D[j - 1] / (D[j] * D[j])));
            err = std::max(err, std::abs(pipe.b[j - 1] - b_ref));
        }
    }
    return {err < 1e-8, fmt("max |coefficient difference| %.2e over 8 rows", err)};
}

outcome check_refinement_slope() {
    stopwatch sw;
    const auto ifs = example_one();
    const auto bands = iterate_bands(ifs, 2);
    const auto m = build_torus_measure(bands, midpoint_of(bands));
    // the comparison window must sit deep inside the coarse run's
    // reproducible prefix: once the window approaches the prefix boundary
    // the difference stops being rounding accumulation and starts picking
    // up the prefix breakdown, which is superlinear by construction
    torus_jacobi_options topt;
    topt.nodes_per_band = 32768;
    const auto coarse = torus_jacobi(m, 10001, topt).jac;
    topt.nodes_per_band = 131072;
    const auto fine = torus_jacobi(m, 10001, topt).jac;
    const auto prof = compare_sequences(coarse, fine);

    // the error profile is the running max of the coefficient differences
    std::vector<double> xs, ys;
    for (std::size_t j = 100; j <= 10000; ++j) {
        const double ej = prof.running_max[j - 1];
        if (ej > 0.0) {
            xs.push_back(std::log(double(j)));
            ys.push_back(std::log(ej));
        }
    }
    const double slope = fit_line(xs, ys).slope;
    const bool pass = xs.size() > 1000 && slope < 1.0;
    return {pass, fmt("log-log slope %.3f over %zu points, max eps %.1e", slope, xs.size(),
                      prof.running_max[9999])};
}

} // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    run_check(1, "single-interval equilibrium pipeline", check_single_interval);
    run_check(2, "symmetric two-band equilibrium", check_symmetric_bands);
    run_check(3, "torus line tracking at n = 2, 3", check_line_tracking);
    run_check(4, "synthetic spectrum round trip", check_round_trip);
    run_check(5, "torus point invariance of amplitudes", check_point_invariance);
    run_check(6, "gap length / amplitude proportionality", check_gap_amplitude);
    run_check(7, "case a vs case b convergence shape", check_case_shapes);
    run_check(8, "weighted case b decay rates", check_weighted_decay);
    run_check(9, "stable prefix growth toward the limit", check_stable_prefixes);
    run_check(10, "two-band Hankel cross-check", check_hankel);
    run_check(11, "discretization refinement slope", check_refinement_slope);
    std::printf("acceptance: %d of 11 passed\n", 11 - g_failures);
    return g_failures;
}
