#include "sht/fft.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sht::fft {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::size_t smallest_factor(std::size_t n) {
    if (n % 2 == 0) return 2;
    for (std::size_t p = 3; p * p <= n; p += 2)
        if (n % p == 0) return p;
    return n;
}

// Last-used root-of-unity table, one slot per transform direction. Ring
// lengths repeat heavily within a stage, so this catches nearly all reuse
// without keeping every length alive.
struct RootTable {
    std::size_t n = 0;
    std::vector<cdouble> w;
};
thread_local RootTable root_cache[2];

const std::vector<cdouble>& get_roots(std::size_t n, int sign) {
    RootTable& t = root_cache[sign > 0 ? 1 : 0];
    if (t.n != n) {
        t.w.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            t.w[j] = std::polar(1.0, sign * two_pi * static_cast<double>(j) / static_cast<double>(n));
        t.n = n;
    }
    return t.w;
}

// Recursive decimation-in-time step. Reads n elements of `in` at `stride`,
// writes them transformed and contiguous into `out`. `roots` is the table
// for the top-level length; a sub-length n uses every (full_n/n)-th entry,
// tracked by `root_step`. `work` provides n scratch slots.
void recurse(cdouble* out, const cdouble* in, std::size_t n, std::size_t stride,
             const cdouble* roots, std::size_t root_step, cdouble* work) {
    if (n == 1) {
        out[0] = in[0];
        return;
    }
    const std::size_t r = smallest_factor(n);
    const std::size_t m = n / r;
    if (m == 1) {  // prime length: direct sum against the root table
        for (std::size_t k = 0; k < n; ++k) {
            cdouble acc = in[0];
            for (std::size_t j = 1; j < n; ++j)
                acc += in[j * stride] * roots[((j * k) % n) * root_step];
            out[k] = acc;
        }
        return;
    }
    for (std::size_t q = 0; q < r; ++q)
        recurse(out + q * m, in + q * stride, m, stride * r, roots, root_step * r, work);
    for (std::size_t k2 = 0; k2 < m; ++k2) {
        for (std::size_t q = 0; q < r; ++q) {
            const std::size_t k = k2 + q * m;
            cdouble acc = out[k2];
            for (std::size_t p = 1; p < r; ++p)
                acc += out[p * m + k2] * roots[((p * k) % n) * root_step];
            work[k] = acc;
        }
    }
    for (std::size_t k = 0; k < n; ++k) out[k] = work[k];
}

void cooley_tukey(std::span<cdouble> data, int sign) {
    const std::size_t n = data.size();
    const auto& roots = get_roots(n, sign);
    std::vector<cdouble> in(data.begin(), data.end());
    std::vector<cdouble> work(n);
    recurse(data.data(), in.data(), n, 1, roots.data(), 1, work.data());
}

// Chirp-z: express X_k = w_k * sum_j (x_j w_j) * conj(w_{k-j}) with
// w_j = exp(sign*i*pi*j^2/n) and evaluate the convolution by power-of-two
// transforms of length M >= 2n-1.
void bluestein(std::span<cdouble> data, int sign) {
    const std::size_t n = data.size();
    const std::size_t m = std::bit_ceil(2 * n - 1);

    std::vector<cdouble> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        // j^2 mod 2n keeps the phase argument small; the chirp is periodic
        // in j^2 with period 2n.
        const std::size_t e = (j * j) % (2 * n);
        chirp[j] = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(e) / static_cast<double>(n));
    }

    std::vector<cdouble> a(m, cdouble{0.0, 0.0});
    std::vector<cdouble> b(m, cdouble{0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) a[j] = data[j] * chirp[j];
    b[0] = std::conj(chirp[0]);
    for (std::size_t j = 1; j < n; ++j) b[j] = b[m - j] = std::conj(chirp[j]);

    cooley_tukey(a, -1);
    cooley_tukey(b, -1);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    cooley_tukey(a, +1);

    const double norm = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) data[k] = a[k] * chirp[k] * norm;
}

}  // namespace

bool smooth_length(std::size_t n) {
    if (n == 0) return false;
    for (std::size_t p : {2, 3, 5, 7, 11, 13})
        while (n % p == 0) n /= p;
    return n == 1;
}

void transform(std::span<cdouble> data, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("fft: sign must be +1 or -1");
    const std::size_t n = data.size();
    if (n <= 1) return;
    if (smooth_length(n))
        cooley_tukey(data, sign);
    else
        bluestein(data, sign);
}

}  // namespace sht::fft
