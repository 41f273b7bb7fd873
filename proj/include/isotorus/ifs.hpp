#pragma once

#include "common.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>

namespace isotorus {

struct interval {
    double a = 0.0, b = 0.0;   // closed [a, b]
    [[nodiscard]] double length() const { return b - a; }
    [[nodiscard]] double center() const { return 0.5 * (a + b); }
    [[nodiscard]] double halfwidth() const { return 0.5 * (b - a); }
    friend bool operator==(const interval&, const interval&) = default;
};

// Finite union of disjoint closed intervals ("bands"), kept ascending.
// `level` records which IFS iterate produced it (0 for a hull or a
// hand-built set).
struct interval_union {
    std::vector<interval> bands;
    int level = 0;

    interval_union() = default;
    interval_union(std::vector<interval> bs, int lvl) : bands(std::move(bs)), level(lvl) {
        validate();
    }

    void validate() const {
        if (bands.empty()) throw validation_error("interval_union: empty");
        for (std::size_t i = 0; i < bands.size(); ++i) {
            if (!(bands[i].a < bands[i].b))
                throw validation_error("interval_union: band " + std::to_string(i) +
                                       " is not a proper interval");
            if (i > 0 && !(bands[i - 1].b < bands[i].a))
                throw validation_error("interval_union: bands " + std::to_string(i - 1) +
                                       " and " + std::to_string(i) + " touch or overlap");
        }
    }

    [[nodiscard]] std::size_t size() const { return bands.size(); }
    [[nodiscard]] interval hull() const { return {bands.front().a, bands.back().b}; }
    [[nodiscard]] double total_length() const {
        double s = 0.0;
        for (const auto& b : bands) s += b.length();
        return s;
    }
    // Index of the band containing s, or nullopt if s sits in a gap or
    // outside the hull.
    [[nodiscard]] std::optional<std::size_t> band_of(double s) const {
        auto it = std::upper_bound(bands.begin(), bands.end(), s,
                                   [](double v, const interval& b) { return v < b.a; });
        if (it == bands.begin()) return std::nullopt;
        --it;
        if (s <= it->b) return std::size_t(it - bands.begin());
        return std::nullopt;
    }
};

struct gap {
    double left = 0.0, right = 0.0;   // open (left, right)
    int birth_level = 0;              // iterate at which the gap first opened
    [[nodiscard]] double length() const { return right - left; }
    [[nodiscard]] double midpoint() const { return 0.5 * (left + right); }
};

// Gaps in seniority order: by birth level, then left-to-right within a
// level.  ascending_index[i] maps ordered position i to the position of the
// same gap when all gaps are sorted by location.
struct gap_list {
    std::vector<gap> ordered;
    std::vector<std::size_t> ascending_index;

    [[nodiscard]] std::size_t size() const { return ordered.size(); }
};

struct weighted_atom {
    double x = 0.0, w = 0.0;
};

// Finitely supported positive measure; atom order is meaningful only in
// that downstream reductions run over it in the stored order, keeping
// every pipeline bit-reproducible.
struct discrete_measure {
    std::vector<weighted_atom> atoms;

    [[nodiscard]] double total_mass() const {
        kahan_sum s;
        for (const auto& a : atoms) s.add(a.w);
        return s.value();
    }
    void normalize() {
        const double m = total_mass();
        if (!(m > 0.0)) throw validation_error("discrete_measure: nonpositive mass");
        for (auto& a : atoms) a.w /= m;
    }
};

struct affine_map {
    double delta = 0.0, gamma = 0.0;   // s -> delta*(s - gamma) + gamma
    [[nodiscard]] double operator()(double s) const { return delta * (s - gamma) + gamma; }
    [[nodiscard]] interval operator()(const interval& iv) const {
        return {(*this)(iv.a), (*this)(iv.b)};
    }
};

// Contractive affine maps with fixed points gamma_j plus probability
// weights.  Construction sorts maps (and weights) left to right and
// rejects systems whose first images overlap -- which is exactly the
// fully-disconnected condition for every deeper iterate.
class affine_ifs {
public:
    affine_ifs(std::vector<affine_map> maps, std::vector<double> weights = {})
        : maps_(std::move(maps)) {
        if (maps_.size() < 2) throw validation_error("affine_ifs: need at least 2 maps");
        for (std::size_t j = 0; j < maps_.size(); ++j)
            if (!(maps_[j].delta > 0.0 && maps_[j].delta < 1.0) || !std::isfinite(maps_[j].gamma))
                throw validation_error("affine_ifs: map " + std::to_string(j) +
                                       " needs 0 < delta < 1 and finite gamma");
        if (weights.empty()) weights.assign(maps_.size(), 1.0 / double(maps_.size()));
        if (weights.size() != maps_.size())
            throw validation_error("affine_ifs: weight count mismatch");
        kahan_sum ws;
        for (std::size_t j = 0; j < weights.size(); ++j) {
            if (!(weights[j] > 0.0))
                throw validation_error("affine_ifs: weight " + std::to_string(j) +
                                       " must be positive");
            ws.add(weights[j]);
        }
        if (std::abs(ws.value() - 1.0) > 1e-12)
            throw validation_error("affine_ifs: weights must sum to 1");
        weights_ = std::move(weights);

        std::vector<std::size_t> order(maps_.size());
        for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
        const interval e0 = {min_gamma(), max_gamma()};
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
            return maps_[i](e0).a < maps_[j](e0).a;
        });
        std::vector<affine_map> sm(maps_.size());
        std::vector<double> sw(maps_.size());
        for (std::size_t j = 0; j < order.size(); ++j) {
            sm[j] = maps_[order[j]];
            sw[j] = weights_[order[j]];
        }
        maps_ = std::move(sm);
        weights_ = std::move(sw);

        for (std::size_t j = 0; j + 1 < maps_.size(); ++j) {
            const interval u = maps_[j](e0), v = maps_[j + 1](e0);
            if (!(u.b < v.a))
                throw validation_error("affine_ifs: images of maps " + std::to_string(j) +
                                       " and " + std::to_string(j + 1) +
                                       " touch or overlap; the system is not fully disconnected");
        }
    }

    [[nodiscard]] std::size_t size() const { return maps_.size(); }
    [[nodiscard]] const affine_map& map(std::size_t j) const { return maps_.at(j); }
    [[nodiscard]] double weight(std::size_t j) const { return weights_.at(j); }
    [[nodiscard]] interval hull() const { return {min_gamma(), max_gamma()}; }

private:
    [[nodiscard]] double min_gamma() const {
        double m = maps_[0].gamma;
        for (const auto& f : maps_) m = std::min(m, f.gamma);
        return m;
    }
    [[nodiscard]] double max_gamma() const {
        double m = maps_[0].gamma;
        for (const auto& f : maps_) m = std::max(m, f.gamma);
        return m;
    }
    std::vector<affine_map> maps_;
    std::vector<double> weights_;
};

// n-th iterate E^n as a union of size(ifs)^n bands.  Bands come out in
// lexicographic word order, which coincides with left-to-right order
// because the maps are increasing and sorted.
inline interval_union iterate_bands(const affine_ifs& ifs, int n,
                                    std::uint64_t band_budget = std::uint64_t(1) << 22) {
    if (n < 0) throw validation_error("iterate_bands: n >= 0 required");
    double count = 1.0;
    for (int k = 0; k < n; ++k) {
        count *= double(ifs.size());
        if (count > double(band_budget))
            throw validation_error("iterate_bands: band count exceeds budget; reduce n");
    }
    std::vector<interval> cur = {ifs.hull()};
    for (int k = 0; k < n; ++k) {
        std::vector<interval> next;
        next.reserve(cur.size() * ifs.size());
        for (std::size_t j = 0; j < ifs.size(); ++j)
            for (const auto& b : cur) next.push_back(ifs.map(j)(b));
        cur = std::move(next);
    }
    return interval_union{std::move(cur), n};
}

// Gaps of a band set in plain left-to-right order; birth levels are not
// known at this layer and are set to the set's level.
inline std::vector<gap> gaps_of(const interval_union& u) {
    std::vector<gap> g;
    g.reserve(u.size() - 1);
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        g.push_back({u.bands[i].b, u.bands[i + 1].a, u.level});
    return g;
}

// Gaps of E^n in the canonical ordering: the M-1 gaps opened at level 1
// first, then their images level by level, left to right within a level.
// Endpoint arithmetic matches iterate_bands exactly, so a gap born at
// level m is bit-identical at every later level.
inline gap_list ordered_gaps(const affine_ifs& ifs, int n) {
    if (n < 1) throw validation_error("ordered_gaps: n >= 1 required");
    const interval_union e1 = iterate_bands(ifs, 1);
    std::vector<gap> level = gaps_of(e1);
    for (auto& g : level) g.birth_level = 1;

    gap_list out;
    out.ordered = level;
    for (int m = 2; m <= n; ++m) {
        std::vector<gap> next;
        next.reserve(level.size() * ifs.size());
        for (std::size_t j = 0; j < ifs.size(); ++j)
            for (const auto& g : level)
                next.push_back({ifs.map(j)(g.left), ifs.map(j)(g.right), m});
        out.ordered.insert(out.ordered.end(), next.begin(), next.end());
        level = std::move(next);
    }

    std::vector<std::size_t> by_pos(out.ordered.size());
    for (std::size_t i = 0; i < by_pos.size(); ++i) by_pos[i] = i;
    std::sort(by_pos.begin(), by_pos.end(), [&](std::size_t i, std::size_t j) {
        return out.ordered[i].left < out.ordered[j].left;
    });
    out.ascending_index.resize(out.ordered.size());
    for (std::size_t rank = 0; rank < by_pos.size(); ++rank)
        out.ascending_index[by_pos[rank]] = rank;
    return out;
}

// n-fold pushforward of `base` under the weighted IFS: every atom (x, w)
// spawns (phi_j(x), pi_j * w).  Lexicographic word order again.
inline discrete_measure pushforward_measure(const affine_ifs& ifs, const discrete_measure& base,
                                            int n,
                                            std::uint64_t atom_budget = std::uint64_t(1) << 22) {
    if (n < 0) throw validation_error("pushforward_measure: n >= 0 required");
    double count = double(base.atoms.size());
    for (int k = 0; k < n; ++k) {
        count *= double(ifs.size());
        if (count > double(atom_budget))
            throw validation_error("pushforward_measure: atom count exceeds budget; "
                                   "reduce n or the base rule size");
    }
    discrete_measure cur = base;
    for (int k = 0; k < n; ++k) {
        discrete_measure next;
        next.atoms.reserve(cur.atoms.size() * ifs.size());
        for (std::size_t j = 0; j < ifs.size(); ++j) {
            const auto& f = ifs.map(j);
            const double pj = ifs.weight(j);
            for (const auto& a : cur.atoms) next.atoms.push_back({f(a.x), pj * a.w});
        }
        cur = std::move(next);
    }
    return cur;
}

} // namespace isotorus
