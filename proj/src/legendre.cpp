#include "sht/legendre.hpp"

#include <numbers>
#include <stdexcept>

namespace sht {

namespace {

constexpr double ln_4pi = 2.5310242469692907930;  // log(4*pi)
constexpr double inv_ln2 = 1.4426950408889634074;  // 1/log(2)

}  // namespace

// log(mu_m); factorials enter only through lgamma.
double log_mu(int m) {
    if (m < 0) throw std::invalid_argument("log_mu: m must be >= 0");
    return -m * std::numbers::ln2 - std::lgamma(m + 1.0)
           + 0.5 * (std::lgamma(2.0 * m + 2.0) - ln_4pi);
}

double beta_lm(int l, int m) {
    if (m < 0 || l < m) throw std::invalid_argument("beta_lm: need l >= m >= 0");
    if (l == m) throw std::domain_error("beta_lm: undefined at l == m");
    double dl = l, dm = m;
    return std::sqrt((4.0 * dl * dl - 1.0) / (dl * dl - dm * dm));
}

RecurrenceCoeffs RecurrenceCoeffs::build(int m, int lmax) {
    if (m < 0 || lmax < m) throw std::invalid_argument("RecurrenceCoeffs: need lmax >= m >= 0");
    RecurrenceCoeffs rc;
    rc.m = m;
    rc.lmax = lmax;
    const int n = lmax - m;
    rc.beta.resize(n);
    rc.ratio.resize(n);
    for (int i = 0; i < n; ++i) rc.beta[i] = beta_lm(m + 1 + i, m);
    for (int i = 1; i < n; ++i) rc.ratio[i] = rc.beta[i] / rc.beta[i - 1];
    return rc;
}

const ScaleLadder& ScaleLadder::standard() {
    static const ScaleLadder ladder{};
    return ladder;
}

const ScaleLadder& ScaleLadder::unscaled() {
    static const ScaleLadder ladder = [] {
        ScaleLadder l;
        l.enabled = false;
        return l;
    }();
    return ladder;
}

ScaledValue recurrence_start(int m) {
    if (m < 0) throw std::invalid_argument("recurrence_start: m must be >= 0");
    // mu_m grows slower than m^(1/4); no ladder step is ever needed here.
    return {std::exp(log_mu(m)), 0};
}

ScaledValue pmm_from_log(int m, double x, double log_mu_m) {
    if (m < 0) throw std::invalid_argument("pmm_from_log: m must be >= 0");
    if (std::fabs(x) > 1.0) throw std::invalid_argument("pmm_from_log: |x| must be <= 1");
    if (m == 0) return {std::exp(log_mu_m), 0};

    // (1-x)(1+x) keeps full precision where 1-x*x would cancel.
    const double s2 = (1.0 - x) * (1.0 + x);
    if (s2 <= 0.0) return {0.0, 0};

    // Binary exponent of mu_m * (1-x^2)^(m/2); split off the ladder scale so
    // the mantissa lands well inside the representable window.
    const double e2 = log_mu_m * inv_ln2 + 0.5 * m * std::log2(s2);
    const int k = static_cast<int>(std::floor(e2 / 512.0 + 0.5));
    return {std::exp2(e2 - 512.0 * k), k};
}

std::vector<double> plm_row(int m, double x, int lmax, const ScaleLadder& ladder) {
    if (m < 0 || lmax < m) throw std::invalid_argument("plm_row: need lmax >= m >= 0");
    if (std::fabs(x) > 1.0) throw std::invalid_argument("plm_row: |x| must be <= 1");
    auto rc = RecurrenceCoeffs::build(m, lmax);
    std::vector<double> out(lmax - m + 1);
    PlmStream s(rc, x, ladder);
    out[0] = s.value();
    for (int l = m + 1; l <= lmax; ++l) {
        s.advance();
        out[l - m] = s.value();
    }
    return out;
}

std::vector<ScaledValue> plm_row_scaled(int m, double x, int lmax, const ScaleLadder& ladder) {
    if (m < 0 || lmax < m) throw std::invalid_argument("plm_row_scaled: need lmax >= m >= 0");
    if (std::fabs(x) > 1.0) throw std::invalid_argument("plm_row_scaled: |x| must be <= 1");
    auto rc = RecurrenceCoeffs::build(m, lmax);
    std::vector<ScaledValue> out(lmax - m + 1);
    PlmStream s(rc, x, ladder);
    out[0] = {s.mantissa(), s.scale()};
    for (int l = m + 1; l <= lmax; ++l) {
        s.advance();
        out[l - m] = {s.mantissa(), s.scale()};
    }
    return out;
}

}  // namespace sht
