#pragma once

#include <cmath>
#include <vector>

namespace sht {

/// beta_{lm} = sqrt((4l^2 - 1)/(l^2 - m^2)), the coefficient of the upward
/// two-term recurrence in l at fixed order m.
double beta_lm(int l, int m);

/// Per-order recurrence coefficients for l = m+1 .. lmax.
/// ratio[i] = beta[i]/beta[i-1] so the recurrence step needs no division.
struct RecurrenceCoeffs {
    int m = 0;
    int lmax = 0;
    std::vector<double> beta;   // beta[i] = beta_lm(m+1+i, m)
    std::vector<double> ratio;  // valid for i >= 1; ratio[0] unused

    static RecurrenceCoeffs build(int m, int lmax);
};

/// Rescaling parameters keeping recurrence magnitudes representable. The
/// step is an exact power of two, so applying and removing a scale factor
/// is bit-transparent. A value is (mantissa, k) meaning mantissa * F^k.
struct ScaleLadder {
    double step = 0x1p512;       // F
    double inv_step = 0x1p-512;  // F^-1
    double hi = 0x1p512;         // rescale down when |p| >= hi
    double lo = 0x1p-512;        // rescale up when 0 < |p| < lo
    bool enabled = true;

    static const ScaleLadder& standard();
    /// Thresholds never trip; used to verify rescaling transparency.
    static const ScaleLadder& unscaled();
};

struct ScaledValue {
    double mantissa = 0.0;
    int scale = 0;  // value = mantissa * 2^(512*scale)
};

/// Collapse to a plain double; values below the double range come out as 0.
inline double apply_scale(ScaledValue v) {
    if (v.scale == 0) return v.mantissa;
    return std::ldexp(v.mantissa, 512 * v.scale);
}

/// mu_m, the amplitude of the recurrence seed P_mm = mu_m * (1-x^2)^(m/2).
/// Evaluated as a log-domain sum, never by multiplying factorials.
ScaledValue recurrence_start(int m);

/// Natural log of mu_m; transforms precompute this once per order.
double log_mu(int m);

/// P_mm(x) in ladder form given log(mu_m), mantissa normalized near 2^0.
ScaledValue pmm_from_log(int m, double x, double log_mu_m);

/// P_mm(x) in ladder form with the mantissa normalized near 2^0.
inline ScaledValue pmm_value(int m, double x) { return pmm_from_log(m, x, log_mu(m)); }

namespace detail {

inline double plm_first_step(double beta1, double x, double pmm) { return beta1 * x * pmm; }

inline double plm_step(double beta, double ratio, double x, double p1, double p0) {
    return beta * x * p1 - ratio * p0;
}

/// Keeps the running pair inside the ladder window; returns the scale
/// increment (-1, 0 or +1). Factors-of-two multiplies are bit-transparent.
inline int plm_rescale(const ScaleLadder& ladder, double& p2, double& p1) {
    const double ap = std::fabs(p2);
    if (ap >= ladder.hi) {
        p2 *= ladder.inv_step;
        p1 *= ladder.inv_step;
        return 1;
    }
    if (ap < ladder.lo && p2 != 0.0) {
        p2 *= ladder.step;
        p1 *= ladder.step;
        return -1;
    }
    return 0;
}

}  // namespace detail

/// Walks P_mm, P_{m+1,m}, ..., P_{lmax,m} at fixed x, rescaling whenever the
/// running magnitude leaves the ladder window. The delta kernels and the row
/// evaluators share this stream so they agree to rounding.
class PlmStream {
public:
    PlmStream(const RecurrenceCoeffs& rc, double x, const ScaleLadder& ladder)
        : PlmStream(rc, x, ladder, pmm_value(rc.m, x)) {}

    PlmStream(const RecurrenceCoeffs& rc, double x, const ScaleLadder& ladder,
              ScaledValue start)
        : rc_(&rc), ladder_(&ladder), x_(x), p_(start.mantissa), k_(start.scale) {}

    double mantissa() const { return p_; }
    int scale() const { return k_; }
    double value() const { return apply_scale({p_, k_}); }

    /// Step l -> l+1; call at most lmax - m times.
    void advance() {
        double p2 = (n_ == 0) ? detail::plm_first_step(rc_->beta[0], x_, p_)
                              : detail::plm_step(rc_->beta[n_], rc_->ratio[n_], x_, p_, pm1_);
        ++n_;
        if (ladder_->enabled) k_ += detail::plm_rescale(*ladder_, p2, p_);
        pm1_ = p_;
        p_ = p2;
    }

private:
    const RecurrenceCoeffs* rc_;
    const ScaleLadder* ladder_;
    double x_;
    double pm1_ = 0.0;
    double p_ = 0.0;
    int k_ = 0;
    int n_ = 0;  // advances taken
};

/// P_{lm}(x) for l = m..lmax as plain doubles (0 where the true value
/// underflows double precision).
std::vector<double> plm_row(int m, double x, int lmax,
                            const ScaleLadder& ladder = ScaleLadder::standard());

/// Same row in ladder form, for callers that need the full dynamic range.
std::vector<ScaledValue> plm_row_scaled(int m, double x, int lmax,
                                        const ScaleLadder& ladder = ScaleLadder::standard());

}  // namespace sht
