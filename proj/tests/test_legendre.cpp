#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "sht/grid.hpp"
#include "sht/legendre.hpp"

using namespace sht;

namespace {

// Generalized binomial C(z, n) for half-integer z, exact enough in long
// double for l <= 10.
long double binom_ld(long double z, int n) {
    long double r = 1.0L;
    for (int j = 1; j <= n; ++j) r *= (z - (n - j)) / j;
    return r;
}

// Normalized P_{lm} from the explicit degree-l polynomial: an oracle fully
// independent of the two-term recurrence.
double plm_explicit(int l, int m, double x) {
    const long double xl = x;
    long double sum = 0.0L;
    for (int k = m; k <= l; ++k) {
        long double falling = 1.0L;
        for (int j = 0; j < m; ++j) falling *= (k - j);
        sum += falling * binom_ld(l, k) * binom_ld((l + k - 1) / 2.0L, l) *
               std::pow(xl, static_cast<long double>(k - m));
    }
    long double poly = std::pow(2.0L, static_cast<long double>(l)) * sum;
    poly *= std::pow((1.0L - xl) * (1.0L + xl), m / 2.0L);

    long double num = (2.0L * l + 1.0L), den = 4.0L * std::numbers::pi_v<long double>;
    for (int j = l - m + 1; j <= l + m; ++j) den *= j;
    return static_cast<double>(poly * std::sqrt(num / den));
}

long double binom_int(int n, int k) { return binom_ld(static_cast<long double>(n), k); }

}  // namespace

TEST_CASE("recurrence seeds mu_m") {
    CHECK(recurrence_start(0).mantissa == doctest::Approx(0.28209479177387814).epsilon(1e-13));
    CHECK(recurrence_start(0).scale == 0);
    CHECK(recurrence_start(1).mantissa == doctest::Approx(0.34549414947133548).epsilon(1e-13));
    CHECK(recurrence_start(2).mantissa == doctest::Approx(0.38627420202318958).epsilon(1e-13));
    CHECK_THROWS_AS(recurrence_start(-1), std::invalid_argument);
    // Large m stays finite through the log-domain evaluation.
    CHECK(std::isfinite(recurrence_start(1000000).mantissa));
}

TEST_CASE("beta coefficient values and errors") {
    CHECK(beta_lm(2, 0) == doctest::Approx(1.9364916731037084).epsilon(1e-14));
    CHECK(beta_lm(3, 1) == doctest::Approx(2.0916500663351889).epsilon(1e-14));
    CHECK(beta_lm(2, 0) == doctest::Approx(std::sqrt(15.0 / 4.0)).epsilon(1e-15));
    CHECK(beta_lm(3, 1) == doctest::Approx(std::sqrt(35.0 / 8.0)).epsilon(1e-15));
    CHECK_THROWS_AS(beta_lm(1, 1), std::domain_error);
    CHECK_THROWS_AS(beta_lm(1, 2), std::invalid_argument);
    CHECK_THROWS_AS(beta_lm(1, -1), std::invalid_argument);
}

TEST_CASE("recurrence coefficient table") {
    const auto rc = RecurrenceCoeffs::build(3, 12);
    REQUIRE(rc.beta.size() == 9);
    for (int i = 0; i < 9; ++i) {
        const int l = 4 + i;
        CHECK(rc.beta[i] ==
              doctest::Approx(std::sqrt((4.0 * l * l - 1.0) / (l * l - 9.0))).epsilon(1e-15));
        CHECK(rc.beta[i] > 0.0);
        CHECK(std::isfinite(rc.beta[i]));
        if (i >= 1) CHECK(rc.ratio[i] == rc.beta[i] / rc.beta[i - 1]);
    }
    CHECK_THROWS_AS(RecurrenceCoeffs::build(5, 4), std::invalid_argument);
}

TEST_CASE("plm_row spot values") {
    for (double x : {-0.9, 0.0, 0.3, 1.0}) {
        const auto row = plm_row(0, x, 0);
        CHECK(row[0] == doctest::Approx(0.28209479177387814).epsilon(1e-13));
    }
    CHECK(plm_row(0, 0.5, 1)[1] == doctest::Approx(0.24430125595145996).epsilon(1e-13));
    CHECK(plm_row(1, 0.5, 1)[0] == doctest::Approx(0.29920671030107451).epsilon(1e-13));
}

TEST_CASE("recurrence matches explicit polynomials for l <= 10") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double x = dist(rng);
        for (int m = 0; m <= 10; ++m) {
            const auto row = plm_row(m, x, 10);
            for (int l = m; l <= 10; ++l) {
                const double diff = std::fabs(row[l - m] - plm_explicit(l, m, x));
                worst = std::max(worst, diff);
            }
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("orthonormality under Gauss-Legendre quadrature") {
    constexpr int lmax = 64, n_nodes = 80;
    const auto [x, w] = gauss_legendre_nodes(n_nodes);
    double worst = 0.0;
    for (int m : {0, 1, 7, 32, 64}) {
        std::vector<std::vector<double>> rows(n_nodes);
        for (int k = 0; k < n_nodes; ++k) rows[k] = plm_row(m, x[k], lmax);
        for (int l = m; l <= lmax; ++l)
            for (int lp = l; lp <= lmax; ++lp) {
                double s = 0.0;
                for (int k = 0; k < n_nodes; ++k)
                    s += w[k] * rows[k][l - m] * rows[k][lp - m];
                s *= 2.0 * std::numbers::pi;
                const double want = (l == lp) ? 1.0 : 0.0;
                worst = std::max(worst, std::fabs(s - want));
            }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("parity identity") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const double x = dist(rng);
        for (int m : {0, 1, 2, 5, 11}) {
            const auto plus = plm_row(m, x, 40);
            const auto minus = plm_row(m, -x, 40);
            for (int l = m; l <= 40; ++l) {
                const double sign = ((l + m) % 2 == 0) ? 1.0 : -1.0;
                worst = std::max(worst, std::fabs(minus[l - m] - sign * plus[l - m]));
            }
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("rescaling is transparent when no threshold is crossed") {
    for (double x : {-0.8, 0.1, 0.99}) {
        for (int m : {0, 3, 17}) {
            const auto a = plm_row(m, x, 120, ScaleLadder::standard());
            const auto b = plm_row(m, x, 120, ScaleLadder::unscaled());
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
        }
    }
}

TEST_CASE("stream start from precomputed log matches direct start") {
    for (int m : {0, 1, 9, 250}) {
        const double lm = log_mu(m);
        for (double x : {-0.6, 0.2, 0.95}) {
            const auto direct = pmm_value(m, x);
            const auto from_log = pmm_from_log(m, x, lm);
            CHECK(direct.mantissa == from_log.mantissa);
            CHECK(direct.scale == from_log.scale);
        }
    }
}

TEST_CASE("deep-order evaluation stays finite and matches a long-double oracle") {
    constexpr int m = 2000, lmax = 2200;
    const double x = 0.999;

    const auto row = plm_row(m, x, lmax);
    for (double v : row) {
        CHECK(std::isfinite(v));
        CHECK(!std::isnan(v));
    }

    const auto scaled = plm_row_scaled(m, x, lmax);
    // The seed needs a ladder scale far below zero at this order.
    CHECK(scaled[0].scale < -10);

    // Long-double recurrence with its own exponent tracking.
    const long double xl = x;
    const long double ln2l = std::numbers::ln2_v<long double>;
    const long double log_pmm =
        -m * ln2l - std::lgamma(static_cast<long double>(m + 1)) +
        0.5L * (std::lgamma(static_cast<long double>(2 * m + 2)) -
                std::log(4.0L * std::numbers::pi_v<long double>)) +
        0.5L * m * std::log((1.0L - xl) * (1.0L + xl));
    const long double e2 = log_pmm / ln2l;
    long long ex = static_cast<long long>(std::floor(e2));
    long double p1 = std::exp2(e2 - ex);
    long double p0 = 0.0L;

    auto beta_ld = [](int l, int mm) {
        const long double ll = l, lm = mm;
        return std::sqrt((4.0L * ll * ll - 1.0L) / (ll * ll - lm * lm));
    };

    auto check_spot = [&](int l, long double mant, long long e) {
        const ScaledValue sv = scaled[l - m];
        const long long impl_e = 512LL * sv.scale;
        const long double impl = std::ldexp(static_cast<long double>(sv.mantissa),
                                            static_cast<int>(impl_e - e));
        CHECK(std::fabs(static_cast<double>(impl / mant - 1.0L)) <= 1e-8);
    };

    check_spot(m, p1, ex);
    long double prev_beta = 0.0L;
    for (int l = m + 1; l <= lmax; ++l) {
        const long double b = beta_ld(l, m);
        long double p2 = (l == m + 1) ? b * xl * p1 : b * xl * p1 - (b / prev_beta) * p0;
        prev_beta = b;
        int sh = 0;
        if (p2 != 0.0L) {
            std::frexp(p2, &sh);
            p2 = std::ldexp(p2, -sh);
            p1 = std::ldexp(p1, -sh);
            ex += sh;
        }
        p0 = p1;
        p1 = p2;
        if (l == 2050 || l == 2100 || l == 2150 || l == lmax) check_spot(l, p1, ex);
    }
}

TEST_CASE("row evaluator error contracts") {
    CHECK_THROWS_AS(plm_row(0, 1.5, 4), std::invalid_argument);
    CHECK_THROWS_AS(plm_row(0, -1.0001, 4), std::invalid_argument);
    CHECK_THROWS_AS(plm_row(5, 0.5, 4), std::invalid_argument);
    CHECK_THROWS_AS(plm_row(-1, 0.5, 4), std::invalid_argument);
}

TEST_CASE("explicit-polynomial oracle cross-check at closed forms") {
    // Guards the oracle itself: P~_00, P~_10 and P~_11 in closed form.
    CHECK(plm_explicit(0, 0, 0.37) == doctest::Approx(0.28209479177387814).epsilon(1e-14));
    CHECK(plm_explicit(1, 0, 0.5) == doctest::Approx(0.24430125595145996).epsilon(1e-14));
    CHECK(plm_explicit(1, 1, 0.5) == doctest::Approx(0.29920671030107451).epsilon(1e-14));
    // Binomial helper sanity.
    CHECK(binom_int(10, 3) == doctest::Approx(120.0).epsilon(1e-15));
}
