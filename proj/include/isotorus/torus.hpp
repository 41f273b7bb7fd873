#pragma once

#include "equilibrium.hpp"
#include "jacobi.hpp"

#include <bit>

namespace isotorus {

// One point of the (N-1)-dimensional torus attached to an N-band set:
// a position xi_i strictly inside each interior gap plus a sheet sign.
struct torus_point {
    std::vector<double> xi;
    std::vector<int> sigma;
};

enum class point_rule { midpoint_plus, third_mixed };

inline point_rule point_rule_from_name(const std::string& name) {
    if (name == "midpoint-plus") return point_rule::midpoint_plus;
    if (name == "third-mixed") return point_rule::third_mixed;
    throw validation_error("unknown point rule '" + name + "'");
}

// Sign of the real branch of sqrt(Y) on interior gap i (1-based,
// ascending), continued from +infinity where sqrt(Y) ~ z^N > 0; the
// branch flips across every band cut crossed on the way down.
inline int branch_sign(std::size_t n_bands, std::size_t gap_index) {
    if (gap_index < 1 || gap_index >= n_bands)
        throw validation_error("branch_sign: gap index out of range");
    return (n_bands - gap_index) % 2 ? -1 : 1;
}

inline torus_point make_torus_point(const interval_union& bands, point_rule rule) {
    torus_point pt;
    const std::size_t ngap = bands.size() - 1;
    pt.xi.resize(ngap);
    pt.sigma.resize(ngap);
    for (std::size_t i = 0; i < ngap; ++i) {
        const double l = bands.bands[i].b, r = bands.bands[i + 1].a;
        switch (rule) {
        case point_rule::midpoint_plus:
            pt.xi[i] = 0.5 * (l + r);
            pt.sigma[i] = 1;
            break;
        case point_rule::third_mixed:
            pt.xi[i] = l + (r - l) / 3.0;
            pt.sigma[i] = (i % 2 == 0) ? 1 : -1;
            break;
        }
    }
    return pt;
}

inline void validate_torus_point(const interval_union& bands, const torus_point& pt) {
    const std::size_t ngap = bands.size() - 1;
    if (pt.xi.size() != ngap || pt.sigma.size() != ngap)
        throw validation_error("torus point: expected " + std::to_string(ngap) +
                              " gap positions and signs");
    for (std::size_t i = 0; i < ngap; ++i) {
        if (!(pt.xi[i] > bands.bands[i].b && pt.xi[i] < bands.bands[i + 1].a))
            throw validation_error("torus point: xi[" + std::to_string(i) +
                                  "] not strictly inside its gap");
        if (pt.sigma[i] != 1 && pt.sigma[i] != -1)
            throw validation_error("torus point: sigma entries must be +1 or -1");
    }
}

// Measure theta(xi, sigma) whose Stieltjes transform is (X - sqrt Y)/Z:
// an absolutely continuous part (A/pi) sqrt|Y|/|Z| on the bands plus one
// point mass in each gap whose sign parameter leaves the pole of 1/Z
// uncancelled.  Normalized to a probability measure.
struct torus_measure {
    interval_union bands;
    torus_point point;
    poly_pair polys;             // y_roots: endpoints; z_roots: xi
    std::vector<double> x_cheb;  // X in the Chebyshev basis of the hull
    double ac_weight = 1.0;      // A after normalization
    std::vector<double> atom_mass;       // B_i (normalized), one per gap, zeros kept
    double raw_mass = 0.0;               // lim z M(z) before normalization

    [[nodiscard]] double X(double z) const {
        const auto h = bands.hull();
        return clenshaw(x_cheb, (z - h.center()) / h.halfwidth());
    }
    [[nodiscard]] double sqrt_abs_y(double s) const {
        return std::exp(0.5 * polys.log_abs_y(s));
    }
    [[nodiscard]] double ac_density(double s) const {
        if (!bands.band_of(s)) return 0.0;
        const auto [lz, sign] = polys.log_abs_z(s);
        (void)sign;
        return ac_weight / pi * std::exp(0.5 * polys.log_abs_y(s) - lz);
    }
    [[nodiscard]] std::size_t n_bands() const { return bands.size(); }
};

namespace detail {

// sqrt(Y)(z) = z^N + y1 z^{N-1} + y2 z^{N-2} + ... at infinity, from the
// Newton power sums of the 2N roots: y1 = -p1/2, y2 = p1^2/8 - p2/4.
inline std::pair<double, double> sqrt_y_asymptotics(const std::vector<double>& roots) {
    kahan_sum p1s, p2s;
    for (double r : roots) {
        p1s.add(r);
        p2s.add(r * r);
    }
    const double p1 = p1s.value(), p2 = p2s.value();
    return {-0.5 * p1, p1 * p1 / 8.0 - p2 / 4.0};
}

// z M(z) in extended precision; used to confirm the computed mass against
// the asymptotic limit.  The subtraction X - sqrt(Y) loses the leading
// 2N digits of headroom, hence the long doubles.
inline long double stieltjes_zm(const torus_measure& m, long double z) {
    const auto h = m.bands.hull();
    const long double u = (z - (long double)h.center()) / (long double)h.halfwidth();
    long double b1 = 0.0L, b2 = 0.0L;
    for (std::size_t k = m.x_cheb.size(); k-- > 1;) {
        const long double t = 2.0L * u * b1 - b2 + (long double)m.x_cheb[k];
        b2 = b1;
        b1 = t;
    }
    const long double X = u * b1 - b2 + (long double)m.x_cheb[0];
    long double Y = 1.0L;
    for (double r : m.polys.y_roots) Y *= z - (long double)r;
    long double Z = 1.0L;
    for (double r : m.polys.z_roots) Z *= z - (long double)r;
    return z * (X - sqrtl(Y)) / Z;
}

} // namespace detail

// The unique degree-N polynomial X with the two leading Chebyshev-basis
// coefficients pinned by the sqrt(Y) expansion (so (X - sqrt Y)/Z decays
// like 1/z) and X(xi_i) = sigma_i sqrt|Y(xi_i)| at the gap points.
inline std::vector<double> build_x(const interval_union& bands, const torus_point& pt) {
    bands.validate();
    validate_torus_point(bands, pt);
    const std::size_t N = bands.size();
    const auto h = bands.hull();
    const double mid = h.center(), r = h.halfwidth();

    poly_pair polys;
    for (const auto& b : bands.bands) {
        polys.y_roots.push_back(b.a);
        polys.y_roots.push_back(b.b);
    }
    const auto [y1, y2] = detail::sqrt_y_asymptotics(polys.y_roots);
    (void)y2;

    std::vector<double> c(N + 1, 0.0);
    // T_N on the hull has z^N coefficient 2^{N-1}/r^N and, by parity, its
    // z^{N-1} coefficient is -N mid times that; matching z^N and z^{N-1}
    // of sqrt(Y) fixes the top two Chebyshev coefficients outright.
    c[N] = std::pow(r, double(N)) * std::exp2(1.0 - double(N));
    if (N >= 2) c[N - 1] = (y1 + double(N) * mid) * std::pow(r, double(N) - 1.0) * std::exp2(2.0 - double(N));
    if (N == 1) {
        c[0] = y1 + mid;
        return c;
    }

    const std::size_t m = N - 1;   // remaining unknowns c_0..c_{N-2}
    std::vector<double> A(m * m), rhs(m);
    std::vector<double> T(N + 1);
    for (std::size_t i = 0; i < m; ++i) {
        const double u = (pt.xi[i] - mid) / r;
        T[0] = 1.0;
        T[1] = u;
        for (std::size_t k = 2; k <= N; ++k) T[k] = 2.0 * u * T[k - 1] - T[k - 2];
        for (std::size_t k = 0; k < m; ++k) A[i * m + k] = T[k];
        kahan_sum sy;
        for (double root : polys.y_roots) sy.add(std::log(std::abs(pt.xi[i] - root)));
        rhs[i] = pt.sigma[i] * std::exp(0.5 * sy.value()) - c[N] * T[N] - c[N - 1] * T[N - 1];
    }
    auto sol = lu_solve(std::move(A), std::move(rhs));
    for (std::size_t k = 0; k < m; ++k) c[k] = sol[k];
    return c;
}

// Assembles the full measure: solves for X, takes residues at the gap
// points, integrates the a.c. density, and normalizes everything by the
// total mass lim z M(z).
inline torus_measure build_torus_measure(const interval_union& bands, const torus_point& pt,
                                         int mass_quad_points = 512) {
    torus_measure m;
    m.bands = bands;
    m.point = pt;
    m.x_cheb = build_x(bands, pt);
    for (const auto& b : bands.bands) {
        m.polys.y_roots.push_back(b.a);
        m.polys.y_roots.push_back(b.b);
    }
    m.polys.z_roots = pt.xi;
    const std::size_t N = bands.size();
    const std::size_t ngap = N - 1;

    // Residue of M at xi_i: (X - sighat sqrt|Y|)/Z'; zero when sigma
    // matches the branch, 2 sqrt|Y|/|Z'| when it does not.
    m.atom_mass.assign(ngap, 0.0);
    double scale = 1.0;
    std::vector<double> raw(ngap, 0.0), local(ngap, 0.0);
    for (std::size_t i = 0; i < ngap; ++i) {
        const double xi = pt.xi[i];
        double zp = 1.0;
        for (std::size_t k = 0; k < ngap; ++k)
            if (k != i) zp *= xi - pt.xi[k];
        const double sy = m.sqrt_abs_y(xi);
        const int shat = branch_sign(N, i + 1);
        const double X = m.X(xi);
        raw[i] = (X - shat * sy) / zp;
        // raw/local is exactly 1 for a genuine atom and pure cancellation
        // noise on the matching branch, so the two populations sit orders
        // of magnitude apart until the X interpolation itself breaks down
        local[i] = (std::abs(X) + sy) / std::abs(zp);
        scale = std::max(scale, std::abs(sy / zp));
    }
    kahan_sum mass;
    for (std::size_t i = 0; i < ngap; ++i) {
        if (std::abs(raw[i]) < std::max(1e-13 * scale, 1e-2 * local[i])) raw[i] = 0.0;
        if (raw[i] < 0.0)
            throw numerical_error("torus measure: negative point mass at gap " +
                                  std::to_string(i + 1) + " (branch bookkeeping)");
        mass.add(raw[i]);
    }

    // a.c. mass with A = 1: per band the second-kind rule absorbs the
    // square-root vanishing at the endpoints.
    const auto rule = chebyshev2_rule(mass_quad_points);
    for (std::size_t i = 0; i < N; ++i) {
        const double c = bands.bands[i].center(), hw = bands.bands[i].halfwidth();
        kahan_sum part;
        for (int p = 0; p < mass_quad_points; ++p) {
            const double s = c + hw * rule.nodes[p];
            const double lg = detail::log_g(m.polys.y_roots, s, 2 * i, 2 * i + 1);
            const auto [lz, sign] = m.polys.log_abs_z(s);
            (void)sign;
            part.add(rule.weights[p] * std::exp(0.5 * lg - lz));
        }
        mass.add(hw * hw / pi * part.value());
    }
    m.raw_mass = mass.value();
    if (!(m.raw_mass > 0.0) || !std::isfinite(m.raw_mass))
        throw numerical_error("torus measure: nonpositive total mass");
    m.ac_weight = 1.0 / m.raw_mass;
    for (std::size_t i = 0; i < ngap; ++i) m.atom_mass[i] = raw[i] / m.raw_mass;
    return m;
}

inline torus_measure build_torus_measure(const interval_union& bands, point_rule rule,
                                         int mass_quad_points = 512) {
    return build_torus_measure(bands, make_torus_point(bands, rule), mass_quad_points);
}

// Atomic approximation: P second-kind Chebyshev nodes per band carrying
// the density times the Jacobian-absorbed weights, plus the gap atoms,
// renormalized to unit mass.
inline discrete_measure discretize(const torus_measure& m, std::size_t nodes_per_band) {
    if (nodes_per_band < 2) throw validation_error("discretize: need at least 2 nodes per band");
    const int P = int(nodes_per_band);
    const auto rule = chebyshev2_rule(P);
    discrete_measure out;
    out.atoms.reserve(m.bands.size() * nodes_per_band + m.atom_mass.size());
    for (std::size_t i = 0; i < m.bands.size(); ++i) {
        const double c = m.bands.bands[i].center(), hw = m.bands.bands[i].halfwidth();
        for (int p = 0; p < P; ++p) {
            const double s = c + hw * rule.nodes[p];
            const double lg = detail::log_g(m.polys.y_roots, s, 2 * i, 2 * i + 1);
            const auto [lz, sign] = m.polys.log_abs_z(s);
            (void)sign;
            const double w = m.ac_weight / pi * hw * hw * rule.weights[p] *
                             std::exp(0.5 * lg - lz);
            out.atoms.push_back({s, w});
        }
    }
    for (std::size_t i = 0; i < m.atom_mass.size(); ++i)
        if (m.atom_mass[i] > 0.0) out.atoms.push_back({m.point.xi[i], m.atom_mass[i]});
    std::sort(out.atoms.begin(), out.atoms.end(),
              [](const weighted_atom& a, const weighted_atom& b) { return a.x < b.x; });
    out.normalize();
    return out;
}

struct torus_jacobi_options {
    std::size_t nodes_per_band = 0;        // fixed P; 0 selects the adaptive ladder
    // rotation-merge roundoff leaves doubling agreement near 1e-11 at
    // 1e4-row scale, so demanding 1e-12 would double forever
    double stab_eps = 1e-10;
    std::size_t min_nodes = 64;
    std::size_t max_nodes = std::size_t(1) << 15;
    int mass_quad_points = 512;
    tridiag_options tridiag;
};

struct torus_jacobi_result {
    jacobi_matrix jac;
    std::size_t nodes_per_band = 0;
    // movement of the requested coefficients over the last doubling;
    // NaN when only one resolution was computed
    double delta = std::numeric_limits<double>::quiet_NaN();
};

// Jacobi rows of a torus measure.  Adaptive mode doubles the per-band
// node count until the requested rows stop moving or the cap is reached.
inline torus_jacobi_result torus_jacobi(const torus_measure& m, std::size_t rows,
                                        const torus_jacobi_options& opt = {}) {
    const std::size_t N = m.bands.size();
    auto run = [&](std::size_t P) {
        return jacobi_from_discrete(discretize(m, P), rows, opt.tridiag);
    };
    if (opt.nodes_per_band) {
        torus_jacobi_result res;
        res.nodes_per_band = opt.nodes_per_band;
        res.jac = run(opt.nodes_per_band);
        return res;
    }
    // a K-atom discretization reproduces roughly the first 0.47 K rows;
    // start near K = 2.2 rows so the confirming doubling usually suffices
    std::size_t P = std::max(opt.min_nodes, std::bit_ceil(11 * rows / (5 * N) + 1));
    P = std::min(P, opt.max_nodes);
    torus_jacobi_result res;
    res.nodes_per_band = P;
    res.jac = run(P);
    while (2 * P <= opt.max_nodes) {
        P *= 2;
        auto next = run(P);
        res.delta = compare_sequences(res.jac, next).running_max.back();
        res.jac = std::move(next);
        res.nodes_per_band = P;
        if (res.delta <= opt.stab_eps) break;
    }
    return res;
}

inline torus_jacobi_result torus_jacobi(const interval_union& bands, const torus_point& pt,
                                        std::size_t rows, const torus_jacobi_options& opt = {}) {
    return torus_jacobi(build_torus_measure(bands, pt, opt.mass_quad_points), rows, opt);
}

struct torus_limit_row {
    int n = 0;                 // level compared against the deepest computed one
    double max_diff = 0.0;     // max_j |b_j(theta_{n_max}) - b_j(theta_n)|
    std::size_t stable_len = 0; // largest l with every difference <= eps up to b_l
};

struct torus_limit_result {
    std::vector<jacobi_matrix> per_n;      // per_n[k] holds level k+1
    std::vector<torus_limit_row> table;
    double eps = 0.0;
};

// Convergence of theta_n toward the infinite-gap limit: Jacobi prefixes per
// level plus the stabilization table N(eps, n), each shallow level measured
// against the deepest computed one standing in for the limit.
inline torus_limit_result torus_limit_sequence(const affine_ifs& ifs, point_rule rule,
                                               int n_max, std::size_t rows, double eps,
                                               const torus_jacobi_options& opt = {}) {
    if (n_max < 1) throw validation_error("torus_limit_sequence: n_max >= 1 required");
    if (!(eps > 0.0)) throw validation_error("torus_limit_sequence: eps must be positive");
    torus_limit_result out;
    out.eps = eps;
    for (int n = 1; n <= n_max; ++n) {
        const auto bands = iterate_bands(ifs, n);
        const auto m = build_torus_measure(bands, make_torus_point(bands, rule),
                                           opt.mass_quad_points);
        out.per_n.push_back(torus_jacobi(m, rows, opt).jac);
    }
    for (int n = 1; n < n_max; ++n) {
        const auto prof = compare_sequences(out.per_n[n - 1], out.per_n.back());
        out.table.push_back({n, prof.running_max.back(), prof.largest_within(eps)});
    }
    return out;
}

} // namespace isotorus
