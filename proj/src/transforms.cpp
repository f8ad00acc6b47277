#include "sht/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "sht/fourier.hpp"

namespace sht {

namespace detail {

std::vector<double> log_mu_table(int mmax) {
    std::vector<double> t(static_cast<std::size_t>(mmax) + 1);
    for (int m = 0; m <= mmax; ++m) t[m] = log_mu(m);
    return t;
}

namespace {

// Delta accumulation for one (order, latitude): sum_l a_l * P_l.
inline cdouble delta_sum(const cdouble* am, int nl, const RecurrenceCoeffs& rc,
                         double x, const ScaleLadder& ladder, ScaledValue start) {
    PlmStream s(rc, x, ladder, start);
    cdouble acc{0.0, 0.0};
    if (s.scale() == 0) acc += am[0] * s.mantissa();
    else if (s.scale() > 0) acc += am[0] * s.value();
    for (int i = 1; i <= nl; ++i) {
        s.advance();
        if (s.scale() == 0) acc += am[i] * s.mantissa();
        else if (s.scale() > 0) acc += am[i] * s.value();
    }
    return acc;
}

// a_l += delta * P_l for one (order, latitude).
inline void alm_accumulate(cdouble* out, int nl, const RecurrenceCoeffs& rc,
                           double x, const ScaleLadder& ladder, ScaledValue start,
                           cdouble delta) {
    PlmStream s(rc, x, ladder, start);
    if (s.scale() == 0) out[0] += delta * s.mantissa();
    else if (s.scale() > 0) out[0] += delta * s.value();
    for (int i = 1; i <= nl; ++i) {
        s.advance();
        if (s.scale() == 0) out[i] += delta * s.mantissa();
        else if (s.scale() > 0) out[i] += delta * s.value();
    }
}

}  // namespace

void delta_a_columns(const AlmSet& alm, std::span<const double> cos_thetas,
                     std::span<const MColumn> cols, const double* log_mu,
                     const ScaleLadder& ladder, cdouble* entries, std::size_t row_stride,
                     std::uint64_t* step_counter) {
    const int lmax = alm.lmax;
    std::uint64_t steps = 0;
    for (const MColumn& mc : cols) {
        const int m = mc.m;
        const auto rc = RecurrenceCoeffs::build(m, lmax);
        const cdouble* am = alm.values.data() + alm.offset(m);
        const int nl = lmax - m;
        for (std::size_t ri = 0; ri < cos_thetas.size(); ++ri) {
            const double x = cos_thetas[ri];
            entries[ri * row_stride + mc.col] =
                delta_sum(am, nl, rc, x, ladder, pmm_from_log(m, x, log_mu[m]));
        }
        steps += static_cast<std::uint64_t>(nl + 1) * cos_thetas.size();
    }
    if (step_counter) *step_counter += steps;
}

void delta_a_rows_ring_major(const AlmSet& alm, std::span<const double> cos_thetas,
                             std::size_t row_begin, std::size_t row_end,
                             std::span<const MColumn> cols, const double* log_mu,
                             const ScaleLadder& ladder, cdouble* entries,
                             std::size_t row_stride, std::uint64_t* step_counter) {
    const int lmax = alm.lmax;
    constexpr int tile_n = 256;
    double beta_t[tile_n], ratio_t[tile_n];
    std::uint64_t steps = 0;
    for (std::size_t ri = row_begin; ri < row_end; ++ri) {
        const double x = cos_thetas[ri];
        for (const MColumn& mc : cols) {
            const int m = mc.m;
            const int nl = lmax - m;
            const cdouble* am = alm.values.data() + alm.offset(m);
            const ScaledValue start = pmm_from_log(m, x, log_mu[m]);
            double p1 = start.mantissa, p0 = 0.0;
            int k = start.scale;
            cdouble acc{0.0, 0.0};
            if (k == 0) acc += am[0] * p1;
            else if (k > 0) acc += am[0] * apply_scale({p1, k});
            // Stream l in fixed-size tiles, refilling the coefficient
            // buffer per (ring, m) instead of holding it per order.
            double prev_beta = 0.0;
            int i = 1;
            while (i <= nl) {
                const int chunk = std::min(tile_n, nl - i + 1);
                for (int j = 0; j < chunk; ++j) beta_t[j] = beta_lm(m + i + j, m);
                ratio_t[0] = (i == 1) ? 0.0 : beta_t[0] / prev_beta;
                for (int j = 1; j < chunk; ++j) ratio_t[j] = beta_t[j] / beta_t[j - 1];
                for (int j = 0; j < chunk; ++j) {
                    double p2 = (i + j == 1) ? plm_first_step(beta_t[j], x, p1)
                                             : plm_step(beta_t[j], ratio_t[j], x, p1, p0);
                    if (ladder.enabled) k += plm_rescale(ladder, p2, p1);
                    p0 = p1;
                    p1 = p2;
                    if (k == 0) acc += am[i + j] * p1;
                    else if (k > 0) acc += am[i + j] * apply_scale({p1, k});
                }
                prev_beta = beta_t[chunk - 1];
                i += chunk;
            }
            entries[ri * row_stride + mc.col] = acc;
            steps += static_cast<std::uint64_t>(nl) + 1;
        }
    }
    if (step_counter) *step_counter += steps;
}

void accumulate_columns(const DeltaPanel& panel, std::span<const double> cos_thetas,
                        std::span<const MColumn> cols, const double* log_mu,
                        const ScaleLadder& ladder, AlmSet& out,
                        std::uint64_t* step_counter) {
    const int lmax = out.lmax;
    const std::size_t stride = panel.ms.size();
    std::uint64_t steps = 0;
    for (const MColumn& mc : cols) {
        const int m = mc.m;
        const auto rc = RecurrenceCoeffs::build(m, lmax);
        cdouble* dst = out.values.data() + out.offset(m);
        const int nl = lmax - m;
        for (std::size_t ri = 0; ri < panel.rings.size(); ++ri) {
            const double x = cos_thetas[ri];
            alm_accumulate(dst, nl, rc, x, ladder, pmm_from_log(m, x, log_mu[m]),
                           panel.entries[ri * stride + mc.col]);
        }
        steps += static_cast<std::uint64_t>(nl + 1) * panel.rings.size();
    }
    if (step_counter) *step_counter += steps;
}

void delta_a_columns_paired(const AlmSet& alm, std::span<const MirrorPair> pairs,
                            std::span<const MColumn> cols, const double* log_mu,
                            const ScaleLadder& ladder, cdouble* entries,
                            std::size_t row_stride, std::uint64_t* step_counter) {
    const int lmax = alm.lmax;
    std::uint64_t steps = 0;
    for (const MColumn& mc : cols) {
        const int m = mc.m;
        const auto rc = RecurrenceCoeffs::build(m, lmax);
        const cdouble* am = alm.values.data() + alm.offset(m);
        const int nl = lmax - m;
        for (const MirrorPair& pr : pairs) {
            const double x = pr.x;
            const ScaledValue start = pmm_from_log(m, x, log_mu[m]);
            if (pr.south < 0) {
                entries[pr.north * row_stride + mc.col] =
                    delta_sum(am, nl, rc, x, ladder, start);
            } else {
                // One stream serves both hemispheres through the parity
                // P_{lm}(-x) = (-1)^(l+m) P_{lm}(x).
                PlmStream s(rc, x, ladder, start);
                cdouble even{0.0, 0.0}, odd{0.0, 0.0};
                if (s.scale() == 0) even += am[0] * s.mantissa();
                else if (s.scale() > 0) even += am[0] * s.value();
                for (int i = 1; i <= nl; ++i) {
                    s.advance();
                    cdouble& acc = (i & 1) ? odd : even;
                    if (s.scale() == 0) acc += am[i] * s.mantissa();
                    else if (s.scale() > 0) acc += am[i] * s.value();
                }
                entries[pr.north * row_stride + mc.col] = even + odd;
                entries[static_cast<std::size_t>(pr.south) * row_stride + mc.col] = even - odd;
            }
            steps += static_cast<std::uint64_t>(nl) + 1;
        }
    }
    if (step_counter) *step_counter += steps;
}

void accumulate_columns_paired(const DeltaPanel& panel, std::span<const MirrorPair> pairs,
                               std::span<const MColumn> cols, const double* log_mu,
                               const ScaleLadder& ladder, AlmSet& out,
                               std::uint64_t* step_counter) {
    const int lmax = out.lmax;
    const std::size_t stride = panel.ms.size();
    std::uint64_t steps = 0;
    for (const MColumn& mc : cols) {
        const int m = mc.m;
        const auto rc = RecurrenceCoeffs::build(m, lmax);
        cdouble* dst = out.values.data() + out.offset(m);
        const int nl = lmax - m;
        for (const MirrorPair& pr : pairs) {
            const double x = pr.x;
            const ScaledValue start = pmm_from_log(m, x, log_mu[m]);
            const cdouble dn = panel.entries[pr.north * stride + mc.col];
            if (pr.south < 0) {
                alm_accumulate(dst, nl, rc, x, ladder, start, dn);
            } else {
                const cdouble ds =
                    panel.entries[static_cast<std::size_t>(pr.south) * stride + mc.col];
                const cdouble sum = dn + ds, diff = dn - ds;
                PlmStream s(rc, x, ladder, start);
                if (s.scale() == 0) dst[0] += sum * s.mantissa();
                else if (s.scale() > 0) dst[0] += sum * s.value();
                for (int i = 1; i <= nl; ++i) {
                    s.advance();
                    const cdouble& d = (i & 1) ? diff : sum;
                    if (s.scale() == 0) dst[i] += d * s.mantissa();
                    else if (s.scale() > 0) dst[i] += d * s.value();
                }
            }
            steps += static_cast<std::uint64_t>(nl) + 1;
        }
    }
    if (step_counter) *step_counter += steps;
}

}  // namespace detail

namespace {

std::vector<int> checked_m_set(std::span<const int> m_set, int mmax, const char* where) {
    std::vector<int> ms(m_set.begin(), m_set.end());
    std::sort(ms.begin(), ms.end());
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (ms[i] < 0 || ms[i] > mmax)
            throw std::invalid_argument(std::string(where) + ": order outside [0, mmax]");
        if (i > 0 && ms[i] == ms[i - 1])
            throw std::invalid_argument(std::string(where) + ": duplicate order");
    }
    return ms;
}

void check_latitudes(std::span<const double> cos_thetas, const char* where) {
    for (double x : cos_thetas)
        if (!(std::fabs(x) <= 1.0))
            throw std::invalid_argument(std::string(where) + ": cos_theta outside [-1, 1]");
}

std::vector<detail::MColumn> identity_columns(const std::vector<int>& ms) {
    std::vector<detail::MColumn> cols(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i) cols[i] = {ms[i], i};
    return cols;
}

std::vector<int> iota_rings(std::size_t n) {
    std::vector<int> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = static_cast<int>(i);
    return r;
}

std::vector<detail::MirrorPair> mirror_pairs(const PixelGrid& grid) {
    auto sym = symmetric_ring_pairs(grid);
    std::vector<detail::MirrorPair> pairs(sym.size());
    for (std::size_t i = 0; i < sym.size(); ++i) {
        pairs[i].north = static_cast<std::size_t>(sym[i].first);
        pairs[i].south = sym[i].second ? static_cast<std::ptrdiff_t>(*sym[i].second) : -1;
        pairs[i].x = grid.rings[sym[i].first].cos_theta;
    }
    return pairs;
}

}  // namespace

DeltaPanel compute_delta_a(const AlmSet& alm, std::span<const double> cos_thetas,
                           std::span<const int> m_set, const ScaleLadder& ladder,
                           std::uint64_t* step_counter) {
    auto ms = checked_m_set(m_set, alm.mmax, "compute_delta_a");
    check_latitudes(cos_thetas, "compute_delta_a");

    DeltaPanel panel;
    panel.kind = DeltaKind::synthesis;
    panel.rings = iota_rings(cos_thetas.size());
    panel.ms = std::move(ms);
    panel.entries.assign(cos_thetas.size() * panel.ms.size(), cdouble{0.0, 0.0});

    const auto logmu = detail::log_mu_table(alm.mmax);
    const auto cols = identity_columns(panel.ms);
    detail::delta_a_columns(alm, cos_thetas, cols, logmu.data(), ladder,
                            panel.entries.data(), panel.ms.size(), step_counter);
    return panel;
}

DeltaPanel compute_delta_a_ring_major(const AlmSet& alm, std::span<const double> cos_thetas,
                                      std::span<const int> m_set, int n_work_items,
                                      const ScaleLadder& ladder,
                                      std::uint64_t* step_counter) {
    if (n_work_items < 1)
        throw std::invalid_argument("compute_delta_a_ring_major: n_work_items must be >= 1");
    auto ms = checked_m_set(m_set, alm.mmax, "compute_delta_a_ring_major");
    check_latitudes(cos_thetas, "compute_delta_a_ring_major");

    DeltaPanel panel;
    panel.kind = DeltaKind::synthesis;
    panel.rings = iota_rings(cos_thetas.size());
    panel.ms = std::move(ms);
    panel.entries.assign(cos_thetas.size() * panel.ms.size(), cdouble{0.0, 0.0});

    const auto logmu = detail::log_mu_table(alm.mmax);
    const auto cols = identity_columns(panel.ms);
    const std::size_t n_rows = cos_thetas.size();
    const std::size_t items = std::min<std::size_t>(n_work_items, std::max<std::size_t>(n_rows, 1));

    if (items <= 1) {
        detail::delta_a_rows_ring_major(alm, cos_thetas, 0, n_rows, cols, logmu.data(),
                                        ladder, panel.entries.data(), panel.ms.size(),
                                        step_counter);
        return panel;
    }

    std::vector<std::uint64_t> counters(items, 0);
    std::vector<std::thread> pool;
    pool.reserve(items);
    for (std::size_t t = 0; t < items; ++t) {
        const std::size_t begin = n_rows * t / items;
        const std::size_t end = n_rows * (t + 1) / items;
        pool.emplace_back([&, t, begin, end] {
            detail::delta_a_rows_ring_major(alm, cos_thetas, begin, end, cols, logmu.data(),
                                            ladder, panel.entries.data(), panel.ms.size(),
                                            &counters[t]);
        });
    }
    for (auto& th : pool) th.join();
    if (step_counter)
        for (auto c : counters) *step_counter += c;
    return panel;
}

namespace {

AlmSet accumulate_core(const DeltaPanel& panel, std::span<const double> cos_thetas,
                       int lmax, int mmax, const ScaleLadder& ladder,
                       std::uint64_t* step_counter, const char* where) {
    if (lmax < mmax || mmax < 0)
        throw std::invalid_argument(std::string(where) + ": need lmax >= mmax >= 0");
    if (cos_thetas.size() != panel.rings.size())
        throw std::invalid_argument(std::string(where) + ": latitude count != panel rings");
    check_latitudes(cos_thetas, where);
    for (int m : panel.ms)
        if (m < 0 || m > mmax)
            throw std::invalid_argument(std::string(where) + ": panel order outside [0, mmax]");

    AlmSet out(lmax, mmax);
    const auto logmu = detail::log_mu_table(mmax);
    const auto cols = identity_columns(panel.ms);
    detail::accumulate_columns(panel, cos_thetas, cols, logmu.data(), ladder, out,
                               step_counter);
    return out;
}

}  // namespace

AlmSet accumulate_alm(const DeltaPanel& panel, std::span<const double> cos_thetas,
                      int lmax, int mmax, const ScaleLadder& ladder,
                      std::uint64_t* step_counter) {
    for (std::size_t i = 0; i < panel.rings.size(); ++i)
        if (panel.rings[i] != static_cast<int>(i))
            throw std::invalid_argument("accumulate_alm: ring coverage incomplete");
    return accumulate_core(panel, cos_thetas, lmax, mmax, ladder, step_counter,
                           "accumulate_alm");
}

PartialAlm accumulate_alm_partial(const DeltaPanel& panel, std::span<const double> cos_thetas,
                                  int lmax, int mmax, const ScaleLadder& ladder,
                                  std::uint64_t* step_counter) {
    for (std::size_t i = 1; i < panel.rings.size(); ++i)
        if (panel.rings[i] <= panel.rings[i - 1])
            throw std::invalid_argument("accumulate_alm_partial: rings not strictly ascending");
    PartialAlm part;
    part.alm = accumulate_core(panel, cos_thetas, lmax, mmax, ladder, step_counter,
                               "accumulate_alm_partial");
    part.rings = panel.rings;
    return part;
}

AlmSet reduce_partials(std::span<const PartialAlm> parts, std::size_t n_rings) {
    if (parts.empty()) throw std::invalid_argument("reduce_partials: no partials");
    const int lmax = parts[0].alm.lmax, mmax = parts[0].alm.mmax;
    std::vector<int> seen;
    for (const PartialAlm& p : parts) {
        if (p.alm.lmax != lmax || p.alm.mmax != mmax)
            throw std::invalid_argument("reduce_partials: mismatched band limits");
        seen.insert(seen.end(), p.rings.begin(), p.rings.end());
    }
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 1; i < seen.size(); ++i)
        if (seen[i] == seen[i - 1])
            throw std::invalid_argument("reduce_partials: overlapping ring subsets");
    if (seen.size() != n_rings || (n_rings > 0 && (seen.front() != 0 || seen.back() != static_cast<int>(n_rings) - 1)))
        throw std::invalid_argument("reduce_partials: ring subsets do not cover the grid");

    AlmSet out(lmax, mmax);
    for (const PartialAlm& p : parts)
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += p.alm.values[i];
    return out;
}

SkyMap synthesis(const AlmSet& alm, const PixelGrid& grid, const TransformOptions& options) {
    if (grid.n_rings() == 0) throw std::invalid_argument("synthesis: empty grid");
    const auto cos = grid.cos_thetas();
    check_latitudes(cos, "synthesis");

    std::vector<int> all_m(static_cast<std::size_t>(alm.mmax) + 1);
    for (int m = 0; m <= alm.mmax; ++m) all_m[m] = m;

    DeltaPanel panel;
    panel.kind = DeltaKind::synthesis;
    panel.rings = iota_rings(cos.size());
    panel.ms = all_m;
    panel.entries.assign(cos.size() * all_m.size(), cdouble{0.0, 0.0});

    const auto logmu = detail::log_mu_table(alm.mmax);
    const auto cols = identity_columns(all_m);
    const ScaleLadder& ladder = ScaleLadder::standard();

    if (options.pairing == PairPolicy::mirror) {
        const auto pairs = mirror_pairs(grid);
        detail::delta_a_columns_paired(alm, pairs, cols, logmu.data(), ladder,
                                       panel.entries.data(), panel.ms.size(),
                                       options.step_counter);
    } else if (options.kernel == KernelOrder::ring_major) {
        detail::delta_a_rows_ring_major(alm, cos, 0, cos.size(), cols, logmu.data(), ladder,
                                        panel.entries.data(), panel.ms.size(),
                                        options.step_counter);
    } else {
        detail::delta_a_columns(alm, cos, cols, logmu.data(), ladder, panel.entries.data(),
                                panel.ms.size(), options.step_counter);
    }

    SkyMap map;
    map.grid = grid;
    map.pixels.assign(static_cast<std::size_t>(grid.n_pix), 0.0);
    const std::size_t stride = panel.ms.size();
    for (int r = 0; r < grid.n_rings(); ++r) {
        const RingDescriptor& ring = grid.rings[r];
        ring_synthesis_into({panel.entries.data() + r * stride, stride}, ring,
                            {map.pixels.data() + ring.pixel_offset,
                             static_cast<std::size_t>(ring.n_phi)});
    }
    return map;
}

AlmSet analysis(const SkyMap& map, int lmax, int mmax, const TransformOptions& options) {
    if (lmax < mmax || mmax < 0)
        throw std::invalid_argument("analysis: need lmax >= mmax >= 0");
    const PixelGrid& grid = map.grid;
    if (grid.n_rings() == 0) throw std::invalid_argument("analysis: empty grid");
    if (map.pixels.size() != static_cast<std::size_t>(grid.n_pix))
        throw std::invalid_argument("analysis: pixel count != grid");
    const auto cos = grid.cos_thetas();
    check_latitudes(cos, "analysis");

    DeltaPanel panel;
    panel.kind = DeltaKind::analysis;
    panel.rings = iota_rings(cos.size());
    panel.ms.resize(static_cast<std::size_t>(mmax) + 1);
    for (int m = 0; m <= mmax; ++m) panel.ms[m] = m;
    panel.entries.assign(cos.size() * panel.ms.size(), cdouble{0.0, 0.0});

    const std::size_t stride = panel.ms.size();
    for (int r = 0; r < grid.n_rings(); ++r) {
        const RingDescriptor& ring = grid.rings[r];
        ring_analysis_into({map.pixels.data() + ring.pixel_offset,
                            static_cast<std::size_t>(ring.n_phi)},
                           ring, mmax, {panel.entries.data() + r * stride, stride});
    }

    AlmSet out(lmax, mmax);
    const auto logmu = detail::log_mu_table(mmax);
    const auto cols = identity_columns(panel.ms);
    const ScaleLadder& ladder = ScaleLadder::standard();
    if (options.pairing == PairPolicy::mirror) {
        const auto pairs = mirror_pairs(grid);
        detail::accumulate_columns_paired(panel, pairs, cols, logmu.data(), ladder, out,
                                          options.step_counter);
    } else {
        detail::accumulate_columns(panel, cos, cols, logmu.data(), ladder, out,
                                   options.step_counter);
    }
    return out;
}

}  // namespace sht
