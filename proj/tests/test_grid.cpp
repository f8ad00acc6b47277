#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sht/grid.hpp"

using namespace sht;

namespace {
constexpr double four_pi = 4.0 * std::numbers::pi;
}

TEST_CASE("healpix nside=1 ring structure") {
    const auto g = build_healpix_grid(1);
    REQUIRE(g.n_rings() == 3);
    CHECK(g.n_pix == 12);
    CHECK(g.rings[0].n_phi == 4);
    CHECK(g.rings[1].n_phi == 4);
    CHECK(g.rings[2].n_phi == 4);
    CHECK(g.rings[0].cos_theta == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(g.rings[1].cos_theta == 0.0);
    CHECK(g.rings[2].cos_theta == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("healpix nside=2 ring structure") {
    const auto g = build_healpix_grid(2);
    REQUIRE(g.n_rings() == 7);
    CHECK(g.n_pix == 48);
    const int want_nphi[7] = {4, 8, 8, 8, 8, 8, 4};
    const double want_z[7] = {11.0 / 12.0, 2.0 / 3.0, 1.0 / 3.0, 0.0,
                              -1.0 / 3.0,  -2.0 / 3.0, -11.0 / 12.0};
    for (int i = 0; i < 7; ++i) {
        CHECK(g.rings[i].n_phi == want_nphi[i]);
        CHECK(g.rings[i].cos_theta == doctest::Approx(want_z[i]).epsilon(1e-15));
    }
    // Cap ring starts at phi = pi/(4i); first belt ring (i=2=nside) offset.
    CHECK(g.rings[0].phi_0 == doctest::Approx(std::numbers::pi / 4.0));
    CHECK(g.rings[1].phi_0 == doctest::Approx(std::numbers::pi / 8.0));
    // Belt ring i=3: (i - nside) odd -> phi_0 = 0.
    CHECK(g.rings[2].phi_0 == 0.0);
    CHECK(g.rings[3].phi_0 == doctest::Approx(std::numbers::pi / 8.0));
}

TEST_CASE("healpix pixel offsets and equal weights") {
    const auto g = build_healpix_grid(4);
    CHECK(g.n_pix == 192);
    std::int64_t off = 0;
    for (const auto& r : g.rings) {
        CHECK(r.pixel_offset == off);
        off += r.n_phi;
        CHECK(r.weight == doctest::Approx(four_pi / g.n_pix).epsilon(1e-15));
    }
    CHECK(off == g.n_pix);
}

TEST_CASE("healpix south mirrors north bit-exactly") {
    for (int nside : {1, 2, 4, 8, 16}) {
        const auto g = build_healpix_grid(nside);
        const int n = g.n_rings();
        for (int i = 0; i < n / 2; ++i) {
            const auto& a = g.rings[i];
            const auto& b = g.rings[n - 1 - i];
            CHECK(a.cos_theta == -b.cos_theta);
            CHECK(a.sin_theta == b.sin_theta);
            CHECK(a.n_phi == b.n_phi);
            CHECK(a.phi_0 == b.phi_0);
            CHECK(a.weight == b.weight);
        }
        CHECK(g.rings[n / 2].cos_theta == 0.0);
    }
}

TEST_CASE("healpix solid angle closes") {
    for (int nside : {1, 2, 8, 32}) {
        const auto g = build_healpix_grid(nside);
        double sum = 0.0;
        for (const auto& r : g.rings) sum += r.weight * r.n_phi;
        CHECK(sum == doctest::Approx(four_pi).epsilon(1e-12));
    }
}

TEST_CASE("gauss-legendre nodes: closed forms") {
    {
        const auto [x, w] = gauss_legendre_nodes(1);
        REQUIRE(x.size() == 1);
        CHECK(x[0] == 0.0);
        CHECK(w[0] == doctest::Approx(2.0).epsilon(1e-15));
    }
    {
        const auto [x, w] = gauss_legendre_nodes(2);
        CHECK(x[0] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
        CHECK(x[1] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
        CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-15));
    }
    {
        const auto [x, w] = gauss_legendre_nodes(3);
        CHECK(x[0] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-15));
        CHECK(x[1] == 0.0);
        CHECK(x[2] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-15));
        CHECK(w[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
        CHECK(w[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
    }
}

TEST_CASE("gauss-legendre weights sum to 2 and integrate polynomials") {
    for (int n : {4, 16, 33, 64, 129}) {
        const auto [x, w] = gauss_legendre_nodes(n);
        double s = 0.0;
        for (double wi : w) s += wi;
        CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
        // Exact for degree <= 2n-1: integral of x^2 over [-1,1] is 2/3.
        double sx2 = 0.0;
        for (int i = 0; i < n; ++i) sx2 += w[i] * x[i] * x[i];
        CHECK(sx2 == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    }
}

TEST_CASE("gauss-legendre nodes are symmetric, descending, interlaced") {
    const auto [x, w] = gauss_legendre_nodes(64);
    for (int i = 0; i < 32; ++i) {
        CHECK(x[i] == -x[63 - i]);
        CHECK(w[i] == w[63 - i]);
    }
    for (int i = 1; i < 64; ++i) CHECK(x[i] < x[i - 1]);
}

TEST_CASE("gauss-legendre grid rings") {
    const auto g = build_gauss_legendre_grid(4, 8);
    REQUIRE(g.n_rings() == 4);
    CHECK(g.n_pix == 32);
    const auto [x, w] = gauss_legendre_nodes(4);
    for (int i = 0; i < 4; ++i) {
        CHECK(g.rings[i].cos_theta == x[i]);
        CHECK(g.rings[i].n_phi == 8);
        CHECK(g.rings[i].phi_0 == 0.0);
        CHECK(g.rings[i].weight ==
              doctest::Approx(2.0 * std::numbers::pi / 8.0 * w[i]).epsilon(1e-15));
        CHECK(g.rings[i].sin_theta ==
              doctest::Approx(std::sqrt(1.0 - x[i] * x[i])).epsilon(1e-15));
    }
    double sum = 0.0;
    for (const auto& r : g.rings) sum += r.weight * r.n_phi;
    CHECK(sum == doctest::Approx(four_pi).epsilon(1e-13));
}

TEST_CASE("symmetric ring pairs") {
    const auto gh = build_healpix_grid(2);
    const auto ph = symmetric_ring_pairs(gh);
    REQUIRE(ph.size() == 4);
    CHECK(ph[0].first == 0);
    REQUIRE(ph[0].second.has_value());
    CHECK(*ph[0].second == 6);
    CHECK(ph[3].first == 3);
    CHECK(!ph[3].second.has_value());

    const auto gg = build_gauss_legendre_grid(6, 12);
    const auto pg = symmetric_ring_pairs(gg);
    REQUIRE(pg.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(pg[i].first == i);
        REQUIRE(pg[i].second.has_value());
        CHECK(*pg[i].second == 5 - i);
    }
}

TEST_CASE("grid constructor errors") {
    CHECK_THROWS_AS(build_healpix_grid(0), std::invalid_argument);
    CHECK_THROWS_AS(build_healpix_grid(-2), std::invalid_argument);
    CHECK_THROWS_AS(build_gauss_legendre_grid(0, 8), std::invalid_argument);
    CHECK_THROWS_AS(build_gauss_legendre_grid(4, 0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_legendre_nodes(0), std::invalid_argument);
}
