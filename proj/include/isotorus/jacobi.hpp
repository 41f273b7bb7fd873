#pragma once

#include "ifs.hpp"
#include "quadrature.hpp"

#include <cstdint>

namespace isotorus {

// Leading rows of a Jacobi (symmetric tridiagonal) matrix: diagonal
// a_0..a_{R-1} and off-diagonal b_1..b_{R-1}, all b positive.
struct jacobi_matrix {
    std::vector<double> a;
    std::vector<double> b;   // b[k] holds b_{k+1}

    [[nodiscard]] std::size_t rows() const { return a.size(); }
    [[nodiscard]] double diag(std::size_t j) const { return a.at(j); }
    [[nodiscard]] double off(std::size_t j) const {
        if (j < 1 || j > b.size()) throw validation_error("jacobi_matrix::off: index");
        return b[j - 1];
    }
};

enum class tridiag_algorithm { automatic, lanczos, rotation };

struct tridiag_options {
    tridiag_algorithm algorithm = tridiag_algorithm::automatic;
    // auto picks Lanczos only while the K-by-R vector store and the
    // O(K R^2) reorthogonalization stay cheap
    std::size_t lanczos_max_rows = 1024;
    std::size_t lanczos_max_store = std::size_t(1) << 24;   // doubles
};

namespace detail {

// Lanczos tridiagonalization of diag(x) with starting vector sqrt(w),
// fully reorthogonalized (two Gram-Schmidt passes against every stored
// vector) and with compensated dot products throughout.
inline jacobi_matrix lanczos_tridiag(const std::vector<weighted_atom>& atoms, std::size_t rows) {
    const std::size_t K = atoms.size();
    std::vector<double> V(K * rows);
    std::vector<double> x(K);
    double scale = 1.0;
    {
        kahan_sum mass;
        for (const auto& a : atoms) mass.add(a.w);
        const double inv = 1.0 / std::sqrt(mass.value());
        for (std::size_t i = 0; i < K; ++i) {
            x[i] = atoms[i].x;
            V[i] = std::sqrt(atoms[i].w) * inv;
            scale = std::max(scale, std::abs(x[i]));
        }
    }
    auto dot = [K](const double* u, const double* v) {
        kahan_sum s;
        for (std::size_t i = 0; i < K; ++i) s.add(u[i] * v[i]);
        return s.value();
    };

    jacobi_matrix J;
    J.a.resize(rows);
    J.b.resize(rows - 1);
    std::vector<double> u(K);
    for (std::size_t j = 0; j < rows; ++j) {
        const double* vj = &V[j * K];
        {
            kahan_sum s;
            for (std::size_t i = 0; i < K; ++i) s.add(x[i] * vj[i] * vj[i]);
            J.a[j] = s.value();
        }
        if (j + 1 == rows) break;
        const double* vjm = j > 0 ? &V[(j - 1) * K] : nullptr;
        const double bj = j > 0 ? J.b[j - 1] : 0.0;
        for (std::size_t i = 0; i < K; ++i)
            u[i] = x[i] * vj[i] - J.a[j] * vj[i] - (vjm ? bj * vjm[i] : 0.0);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t l = 0; l <= j; ++l) {
                const double* vl = &V[l * K];
                const double c = dot(vl, u.data());
                for (std::size_t i = 0; i < K; ++i) u[i] -= c * vl[i];
            }
        kahan_sum nsq;
        for (std::size_t i = 0; i < K; ++i) nsq.add(u[i] * u[i]);
        const double bnext = std::sqrt(nsq.value());
        if (!(bnext > scale * 1e-13))
            throw numerical_error("lanczos_tridiag: loss of positivity at offdiagonal " +
                                  std::to_string(j + 1) +
                                  "; the measure cannot support this many rows");
        J.b[j] = bnext;
        double* vn = &V[(j + 1) * K];
        const double inv = 1.0 / bnext;
        for (std::size_t i = 0; i < K; ++i) vn[i] = u[i] * inv;
    }
    return J;
}

// Incremental Givens tridiagonalization (Gragg-Harrod style): atoms are
// merged one at a time into a working tridiagonal that is truncated to
// rows+1 dimensions.  Rotations act downward only, so the kept leading
// block equals the untruncated result exactly; memory is O(rows) and no
// reorthogonalization is needed because orthogonality is maintained by
// construction.  The working arrays keep slack in front so that both the
// front insertion and the tail truncation are O(1).
class rotation_tridiag {
public:
    explicit rotation_tridiag(std::size_t rows)
        : cap_(rows + 1),
          dbuf_(slack_ + cap_ + 1, 0.0),
          ebuf_(slack_ + cap_ + 1, 0.0),
          head_(slack_) {}

    void insert(double x, double w) {
        if (!(w > 0.0)) throw validation_error("rotation_tridiag: weights must be positive");
        if (dim_ == 0) {
            dbuf_[head_] = x;
            dim_ = 1;
            mass_ = w;
            return;
        }
        if (head_ == 0) refill_slack();
        const std::size_t q = dim_;
        --head_;
        double* d = dbuf_.data() + head_;
        double* e = ebuf_.data() + head_;
        d[0] = x;
        e[0] = 0.0;
        ++dim_;
        // merge rotation in the (0,1) plane sends (sqrt w, sqrt mass) to e_0
        const double tot = w + mass_;
        {
            const double c2 = w / tot, s2 = mass_ / tot;
            const double cs = std::sqrt(c2 * s2);
            const double a00 = d[0], a11 = d[1];
            d[0] = c2 * a00 + s2 * a11;
            d[1] = s2 * a00 + c2 * a11;
            e[0] = cs * (a11 - a00);
            mass_ = tot;
        }
        double bulge = 0.0;
        if (q >= 2) {
            const double c0 = std::sqrt(w / tot), s0 = std::sqrt((tot - w) / tot);
            bulge = s0 * e[1];
            e[1] = c0 * e[1];
        }
        std::size_t k = 1;
        while (k + 1 <= q && bulge != 0.0) {
            const double ekm = e[k - 1];
            const double rho = std::sqrt(ekm * ekm + bulge * bulge);
            if (rho == 0.0) break;
            const double inv = 1.0 / rho;
            const double c = ekm * inv, s = bulge * inv;
            e[k - 1] = rho;
            const double akk = d[k], a11 = d[k + 1], akk1 = e[k];
            const double c2 = c * c, s2 = s * s, cs = c * s;
            d[k] = c2 * akk + 2.0 * cs * akk1 + s2 * a11;
            d[k + 1] = s2 * akk - 2.0 * cs * akk1 + c2 * a11;
            e[k] = cs * (a11 - akk) + (c2 - s2) * akk1;
            if (k + 2 <= q) {
                bulge = s * e[k + 1];
                e[k + 1] = c * e[k + 1];
                ++k;
            } else {
                break;
            }
        }
        if (dim_ > cap_) --dim_;   // drop the last row/column; entries go stale in place
    }

    [[nodiscard]] jacobi_matrix take(std::size_t rows) const {
        if (dim_ < rows)
            throw numerical_error("rotation_tridiag: fewer atoms than requested rows");
        const double* d = dbuf_.data() + head_;
        const double* e = ebuf_.data() + head_;
        jacobi_matrix J;
        J.a.assign(d, d + rows);
        J.b.resize(rows - 1);
        double scale = 1.0;
        for (double v : J.a) scale = std::max(scale, std::abs(v));
        for (std::size_t j = 0; j + 1 < rows; ++j) {
            const double b = std::abs(e[j]);
            if (!(b > scale * 1e-13))
                throw numerical_error("rotation_tridiag: loss of positivity at offdiagonal " +
                                      std::to_string(j + 1));
            J.b[j] = b;
        }
        return J;
    }

private:
    void refill_slack() {
        std::copy_backward(dbuf_.begin(), dbuf_.begin() + dim_, dbuf_.begin() + slack_ + dim_);
        std::copy_backward(ebuf_.begin(), ebuf_.begin() + dim_, ebuf_.begin() + slack_ + dim_);
        head_ = slack_;
    }

    static constexpr std::size_t slack_ = 4096;
    std::size_t cap_;
    std::vector<double> dbuf_, ebuf_;
    std::size_t head_ = 0;
    std::size_t dim_ = 0;
    double mass_ = 0.0;
};

} // namespace detail

// First `rows` rows of the Jacobi matrix of a finitely supported measure.
inline jacobi_matrix jacobi_from_discrete(const discrete_measure& mu, std::size_t rows,
                                          const tridiag_options& opt = {}) {
    const std::size_t K = mu.atoms.size();
    if (rows < 1) throw validation_error("jacobi_from_discrete: rows >= 1 required");
    if (K < rows + 1)
        throw validation_error("jacobi_from_discrete: need at least rows+1 atoms (" +
                               std::to_string(K) + " < " + std::to_string(rows + 1) + ")");
    for (const auto& a : mu.atoms)
        if (!(a.w > 0.0) || !std::isfinite(a.x))
            throw validation_error("jacobi_from_discrete: atoms need positive weight, finite position");

    tridiag_algorithm alg = opt.algorithm;
    if (alg == tridiag_algorithm::automatic)
        alg = (rows <= opt.lanczos_max_rows && K * rows <= opt.lanczos_max_store)
                  ? tridiag_algorithm::lanczos
                  : tridiag_algorithm::rotation;
    if (alg == tridiag_algorithm::lanczos) return detail::lanczos_tridiag(mu.atoms, rows);
    detail::rotation_tridiag rt(rows);
    for (const auto& a : mu.atoms) rt.insert(a.x, a.w);
    return rt.take(rows);
}

// Pointwise |b_j| comparison of two coefficient sequences over their
// common range, with the running maximum ("error profile").
struct error_profile {
    std::vector<double> diff;          // index j-1 holds |b_j(x) - b_j(y)|
    std::vector<double> running_max;

    [[nodiscard]] std::size_t count() const { return diff.size(); }
    // N(eps): largest l such that every difference up to b_l stays within eps.
    [[nodiscard]] std::size_t largest_within(double eps) const {
        std::size_t l = 0;
        while (l < diff.size() && diff[l] <= eps) ++l;
        return l;
    }
};

inline error_profile compare_sequences(const jacobi_matrix& x, const jacobi_matrix& y) {
    const std::size_t n = std::min(x.b.size(), y.b.size());
    if (n == 0) throw validation_error("compare_sequences: no overlapping offdiagonals");
    error_profile p;
    p.diff.resize(n);
    p.running_max.resize(n);
    double run = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        p.diff[j] = std::abs(x.b[j] - y.b[j]);
        run = std::max(run, p.diff[j]);
        p.running_max[j] = run;
    }
    return p;
}

enum class initial_measure { lebesgue, chebyshev2 };

struct mu_n_options {
    std::size_t base_nodes = 0;          // 0: rows + 2 (moment-exact, see below)
    bool verify_doubling = true;         // ignored above verify_rows_limit
    std::size_t verify_rows_limit = 4096;
    double stab_eps = 1e-12;
    std::uint64_t atom_budget = std::uint64_t(1) << 22;
    tridiag_options tridiag;
};

struct mu_n_result {
    jacobi_matrix jac;
    std::size_t base_nodes = 0;
    std::size_t atoms = 0;
    double verify_delta = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline discrete_measure base_rule_on(const interval& hull, initial_measure kind, std::size_t Q) {
    const auto rule = kind == initial_measure::lebesgue ? legendre_rule(int(Q))
                                                        : chebyshev2_rule(int(Q));
    const double norm = kind == initial_measure::lebesgue ? 0.5 : 2.0 / pi;
    const double c = hull.center(), r = hull.halfwidth();
    discrete_measure mu;
    mu.atoms.resize(Q);
    for (std::size_t i = 0; i < Q; ++i)
        mu.atoms[i] = {c + r * rule.nodes[i], norm * rule.weights[i]};
    return mu;
}

} // namespace detail

// Jacobi rows of the n-th transfer iterate mu_n started from Lebesgue
// (case a) or Chebyshev-second-kind (case b) measure on the hull.  The
// pushforward of a Q-point Gauss rule is a per-branch Gauss rule of mu_n,
// so Q = rows + 2 reproduces every moment the requested rows depend on
// exactly; the optional doubling pass confirms this numerically.
inline mu_n_result jacobi_mu_n(const affine_ifs& ifs, initial_measure kind, int n,
                               std::size_t rows, const mu_n_options& opt = {}) {
    mu_n_result res;
    res.base_nodes = opt.base_nodes ? opt.base_nodes : rows + 2;
    const auto run = [&](std::size_t Q) {
        const auto base = detail::base_rule_on(ifs.hull(), kind, Q);
        const auto mu = pushforward_measure(ifs, base, n, opt.atom_budget);
        return std::pair{jacobi_from_discrete(mu, rows, opt.tridiag), mu.atoms.size()};
    };
    auto [J, atoms] = run(res.base_nodes);
    res.atoms = atoms;
    if (opt.verify_doubling && rows <= opt.verify_rows_limit) {
        const auto [J2, atoms2] = run(2 * res.base_nodes);
        (void)atoms2;
        res.verify_delta = compare_sequences(J, J2).running_max.back();
        if (res.verify_delta > opt.stab_eps)
            throw numerical_error("jacobi_mu_n: node doubling moved coefficients by " +
                                  std::to_string(res.verify_delta));
    }
    res.jac = std::move(J);
    return res;
}

struct balanced_options {
    initial_measure init = initial_measure::chebyshev2;
    int n_max = 24;
    std::uint64_t atom_budget = std::uint64_t(1) << 22;
    tridiag_options tridiag;
};

struct balanced_result {
    jacobi_matrix jac;
    int n = 0;
    double delta = 0.0;
};

// Iteration stopped by the atom budget before coefficient movement fell
// under eps; carries what was reached.
struct stabilization_error : numerical_error {
    jacobi_matrix partial;
    int n_reached;
    double delta;
    stabilization_error(jacobi_matrix j, int n, double d)
        : numerical_error("jacobi_balanced: budget exhausted at n = " + std::to_string(n) +
                          " with coefficient movement " + std::to_string(d)),
          partial(std::move(j)), n_reached(n), delta(d) {}
};

// Balanced-measure Jacobi rows: transfer iterates are pushed until the
// requested rows stop moving by more than eps between consecutive n.
inline balanced_result jacobi_balanced(const affine_ifs& ifs, std::size_t rows, double eps,
                                       const balanced_options& opt = {}) {
    mu_n_options mopt;
    mopt.verify_doubling = false;
    mopt.atom_budget = opt.atom_budget;
    mopt.tridiag = opt.tridiag;
    jacobi_matrix prev;
    double delta = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= opt.n_max; ++n) {
        const double atoms = double(rows + 2) * std::pow(double(ifs.size()), n);
        if (atoms > double(opt.atom_budget)) {
            if (prev.rows() == 0)
                throw validation_error("jacobi_balanced: atom budget too small for even n = 1");
            throw stabilization_error(std::move(prev), n - 1, delta);
        }
        auto cur = jacobi_mu_n(ifs, opt.init, n, rows, mopt).jac;
        if (prev.rows() > 0) {
            delta = compare_sequences(prev, cur).running_max.back();
            if (delta <= eps) return {std::move(cur), n, delta};
        }
        prev = std::move(cur);
    }
    throw stabilization_error(std::move(prev), opt.n_max, delta);
}

} // namespace isotorus
