#include <catch2/catch_amalgamated.hpp>

#include <isotorus/ifs.hpp>

using namespace isotorus;

namespace {
affine_ifs example1() { return affine_ifs({{0.34, -1.0}, {0.52, 1.0}}); }
} // namespace

TEST_CASE("ifs constructor validates and sorts") {
    REQUIRE_THROWS_AS(affine_ifs({{0.34, -1.0}}), validation_error);
    REQUIRE_THROWS_AS(affine_ifs({{1.1, -1.0}, {0.5, 1.0}}), validation_error);
    REQUIRE_THROWS_AS(affine_ifs({{0.6, -1.0}, {0.6, 1.0}}), validation_error); // overlap
    REQUIRE_THROWS_AS(affine_ifs({{0.3, -1.0}, {0.3, 1.0}}, {0.5}), validation_error);
    REQUIRE_THROWS_AS(affine_ifs({{0.3, -1.0}, {0.3, 1.0}}, {0.7, 0.7}), validation_error);
    REQUIRE_THROWS_AS(affine_ifs({{0.3, -1.0}, {0.3, 1.0}}, {1.2, -0.2}), validation_error);

    // maps given right-to-left come out sorted by image position
    affine_ifs f({{0.52, 1.0}, {0.34, -1.0}}, {0.4, 0.6});
    REQUIRE(f.map(0).gamma == -1.0);
    REQUIRE(f.weight(0) == 0.6);
    REQUIRE(f.hull().a == -1.0);
    REQUIRE(f.hull().b == 1.0);
}

TEST_CASE("first two band generations have the expected endpoints") {
    auto f = example1();
    auto e1 = iterate_bands(f, 1);
    REQUIRE(e1.size() == 2);
    REQUIRE(e1.bands[0].a == Catch::Approx(-1.0).margin(1e-15));
    REQUIRE(e1.bands[0].b == Catch::Approx(-0.32).margin(1e-15));
    REQUIRE(e1.bands[1].a == Catch::Approx(-0.04).margin(1e-15));
    REQUIRE(e1.bands[1].b == Catch::Approx(1.0).margin(1e-15));

    auto e2 = iterate_bands(f, 2);
    REQUIRE(e2.size() == 4);
    const double want[4][2] = {
        {-1.0, -0.7688}, {-0.6736, -0.32}, {-0.04, 0.3136}, {0.4592, 1.0}};
    for (int i = 0; i < 4; ++i) {
        REQUIRE(e2.bands[i].a == Catch::Approx(want[i][0]).margin(1e-15));
        REQUIRE(e2.bands[i].b == Catch::Approx(want[i][1]).margin(1e-15));
    }
}

TEST_CASE("level zero is the hull") {
    auto e0 = iterate_bands(example1(), 0);
    REQUIRE(e0.size() == 1);
    REQUIRE(e0.bands[0].a == -1.0);
    REQUIRE(e0.bands[0].b == 1.0);
}

TEST_CASE("band count budget rejects deep iterates") {
    REQUIRE_THROWS_AS(iterate_bands(example1(), 23), validation_error);
}

TEST_CASE("gap ordering is by birth level then position") {
    auto gl = ordered_gaps(example1(), 2);
    REQUIRE(gl.size() == 3);
    REQUIRE(gl.ordered[0].left == Catch::Approx(-0.32).margin(1e-15));
    REQUIRE(gl.ordered[0].right == Catch::Approx(-0.04).margin(1e-15));
    REQUIRE(gl.ordered[0].birth_level == 1);
    REQUIRE(gl.ordered[1].left == Catch::Approx(-0.7688).margin(1e-15));
    REQUIRE(gl.ordered[1].birth_level == 2);
    REQUIRE(gl.ordered[2].left == Catch::Approx(0.3136).margin(1e-15));
    REQUIRE(gl.ordered[2].birth_level == 2);
    // ascending ranks: the senior gap sits second from the left
    REQUIRE(gl.ascending_index[0] == 1);
    REQUIRE(gl.ascending_index[1] == 0);
    REQUIRE(gl.ascending_index[2] == 2);
}

TEST_CASE("gaps persist bit-exactly across generations") {
    auto f = example1();
    auto g2 = ordered_gaps(f, 2);
    auto g3 = ordered_gaps(f, 3);
    REQUIRE(g3.size() == 7);
    for (std::size_t i = 0; i < g2.size(); ++i) {
        REQUIRE(g3.ordered[i].left == g2.ordered[i].left);      // identical doubles
        REQUIRE(g3.ordered[i].right == g2.ordered[i].right);
        REQUIRE(g3.ordered[i].birth_level == g2.ordered[i].birth_level);
    }
    // and the gap list matches the complement of the band set
    auto e3 = iterate_bands(f, 3);
    auto pos = gaps_of(e3);
    REQUIRE(pos.size() == 7);
    std::vector<double> lefts;
    for (const auto& g : g3.ordered) lefts.push_back(g.left);
    std::sort(lefts.begin(), lefts.end());
    for (std::size_t i = 0; i < pos.size(); ++i) REQUIRE(pos[i].left == lefts[i]);
}

TEST_CASE("interval union validation") {
    REQUIRE_THROWS_AS(interval_union({{0.0, 1.0}, {0.5, 2.0}}, 1).validate(),
                      validation_error);
    REQUIRE_THROWS_AS(interval_union({{1.0, 0.5}}, 1).validate(), validation_error);
    interval_union u({{-1.0, -0.2}, {0.1, 1.0}}, 1);
    u.validate();
    REQUIRE(u.hull().a == -1.0);
    REQUIRE(u.hull().b == 1.0);
    REQUIRE(u.band_of(-0.5) == 0);
    REQUIRE(u.band_of(0.5) == 1);
}

TEST_CASE("pushforward conserves mass and splits atoms") {
    affine_ifs f({{0.34, -1.0}, {0.52, 1.0}}, {0.6, 0.4});
    discrete_measure base;
    base.atoms = {{-0.5, 0.25}, {0.0, 0.5}, {0.5, 0.25}};
    auto m2 = pushforward_measure(f, base, 2);
    REQUIRE(m2.atoms.size() == 12);
    REQUIRE(m2.total_mass() == Catch::Approx(1.0).margin(1e-14));
    auto e2 = iterate_bands(f, 2);
    for (const auto& a : m2.atoms) {
        REQUIRE(a.w > 0.0);
        bool inside = false;
        for (const auto& b : e2.bands) inside |= (a.x >= b.a - 1e-12 && a.x <= b.b + 1e-12);
        REQUIRE(inside);
    }
}

TEST_CASE("discrete measure normalization") {
    discrete_measure m;
    m.atoms = {{0.0, 2.0}, {1.0, 6.0}};
    m.normalize();
    REQUIRE(m.atoms[0].w == Catch::Approx(0.25));
    REQUIRE(m.atoms[1].w == Catch::Approx(0.75));
    discrete_measure bad;
    REQUIRE_THROWS_AS(bad.normalize(), validation_error);
}
