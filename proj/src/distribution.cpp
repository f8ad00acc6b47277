#include "sht/distribution.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <stdexcept>
#include <thread>

#include "sht/fourier.hpp"

namespace sht {

namespace {

using steady = std::chrono::steady_clock;

double seconds_since(steady::time_point t0) {
    return std::chrono::duration<double>(steady::now() - t0).count();
}

std::vector<int> iota_rings(int n) {
    std::vector<int> r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) r[i] = i;
    return r;
}

std::size_t column_of(const std::vector<int>& ms, int m) {
    auto it = std::lower_bound(ms.begin(), ms.end(), m);
    if (it == ms.end() || *it != m)
        throw std::invalid_argument("distribution: order missing from panel");
    return static_cast<std::size_t>(it - ms.begin());
}

std::vector<detail::MColumn> columns_for(const std::vector<int>& subset,
                                         const std::vector<int>& panel_ms) {
    std::vector<detail::MColumn> cols(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i)
        cols[i] = {subset[i], column_of(panel_ms, subset[i])};
    return cols;
}

std::vector<detail::MirrorPair> mirror_pairs_of(const PixelGrid& grid) {
    auto sym = symmetric_ring_pairs(grid);
    std::vector<detail::MirrorPair> pairs(sym.size());
    for (std::size_t i = 0; i < sym.size(); ++i) {
        pairs[i].north = static_cast<std::size_t>(sym[i].first);
        pairs[i].south = sym[i].second ? static_cast<std::ptrdiff_t>(*sym[i].second) : -1;
        pairs[i].x = grid.rings[sym[i].first].cos_theta;
    }
    return pairs;
}

void check_layout(const WorkerLayout& layout, const PixelGrid& grid, int mmax,
                  const RunOptions& options, const char* where) {
    if (layout.n_workers < 1 ||
        layout.m_sets.size() != static_cast<std::size_t>(layout.n_workers) ||
        layout.ring_sets.size() != static_cast<std::size_t>(layout.n_workers))
        throw std::invalid_argument(std::string(where) + ": malformed layout");
    if (layout.n_rings != grid.n_rings())
        throw std::invalid_argument(std::string(where) + ": layout built for another grid");
    if (layout.mmax != mmax)
        throw std::invalid_argument(std::string(where) + ": layout built for another mmax");
    if (options.n_threads < 1)
        throw std::invalid_argument(std::string(where) + ": n_threads must be >= 1");
    if (options.pairing == PairPolicy::mirror && options.kernel == KernelOrder::ring_major)
        throw std::invalid_argument(std::string(where) + ": mirror pairing needs the m-major kernel");
}

void run_pool(int n_jobs, const std::function<void(int)>& job) {
    if (n_jobs == 1) {
        job(0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_jobs));
    for (int j = 0; j < n_jobs; ++j) pool.emplace_back(job, j);
    for (auto& th : pool) th.join();
}

}  // namespace

std::vector<std::vector<int>> assign_m(int mmax, int n_workers) {
    if (mmax < 0) throw std::invalid_argument("assign_m: mmax must be >= 0");
    if (n_workers < 1) throw std::invalid_argument("assign_m: n_workers must be >= 1");
    if (n_workers > 1 && n_workers > (mmax + 1) / 2)
        throw std::invalid_argument("assign_m: n_workers > mmax/2");
    std::vector<std::vector<int>> sets(static_cast<std::size_t>(n_workers));
    int lo = 0, hi = mmax, w = 0;
    while (lo < hi) {
        sets[w].push_back(lo);
        sets[w].push_back(hi);
        ++lo;
        --hi;
        w = (w + 1) % n_workers;
    }
    if (lo == hi) sets[w].push_back(lo);  // middle lands on worker (mmax/2 mod n)
    for (auto& s : sets) std::sort(s.begin(), s.end());
    return sets;
}

std::vector<std::vector<int>> assign_rings(const PixelGrid& grid, int n_workers) {
    const int r_n = grid.n_rings();
    if (n_workers < 1) throw std::invalid_argument("assign_rings: n_workers must be >= 1");
    if (r_n < 1) throw std::invalid_argument("assign_rings: empty grid");
    if (n_workers == 1) return {iota_rings(r_n)};
    if (2 * n_workers > r_n)
        throw std::invalid_argument("assign_rings: n_workers > n_rings/2");

    const int h = (r_n + 1) / 2;  // northern rows, equator included
    const int q = h / n_workers, rem = h % n_workers;
    std::vector<std::vector<int>> sets(static_cast<std::size_t>(n_workers));
    int row = 0;
    for (int w = 0; w < n_workers; ++w) {
        const int len = q + (w < rem ? 1 : 0);
        auto& s = sets[w];
        for (int j = 0; j < len; ++j, ++row) {
            s.push_back(row);
            const int mirror = r_n - 1 - row;
            if (mirror != row) s.push_back(mirror);
        }
        std::sort(s.begin(), s.end());
    }
    return sets;
}

std::vector<std::vector<int>> thread_partition(const std::vector<int>& m_set, int n_threads) {
    if (n_threads <= 0) throw std::invalid_argument("thread_partition: n_threads must be >= 1");
    std::vector<int> ms = m_set;
    std::sort(ms.begin(), ms.end());
    std::vector<std::vector<int>> sets(static_cast<std::size_t>(n_threads));
    if (ms.empty()) return sets;

    const long long top = ms.back();
    std::vector<long long> load(static_cast<std::size_t>(n_threads), 0);
    auto weight = [top](int m) { return top + 1 - m; };  // recurrence-length proxy

    std::size_t lo = 0, hi = ms.size() - 1;
    int t = 0;
    while (lo < hi) {
        sets[t].push_back(ms[lo]);
        sets[t].push_back(ms[hi]);
        load[t] += weight(ms[lo]) + weight(ms[hi]);
        ++lo;
        --hi;
        t = (t + 1) % n_threads;
    }
    if (lo == hi) {
        int best = 0;
        for (int j = 1; j < n_threads; ++j)
            if (load[j] < load[best]) best = j;
        sets[best].push_back(ms[lo]);
    }
    for (auto& s : sets) std::sort(s.begin(), s.end());
    return sets;
}

WorkerLayout WorkerLayout::create(const PixelGrid& grid, int mmax, int n_workers) {
    WorkerLayout layout;
    layout.n_workers = n_workers;
    layout.mmax = mmax;
    layout.n_rings = grid.n_rings();
    if (n_workers == 1) {
        std::vector<int> all(static_cast<std::size_t>(mmax) + 1);
        for (int m = 0; m <= mmax; ++m) all[m] = m;
        layout.m_sets = {std::move(all)};
    } else {
        layout.m_sets = assign_m(mmax, n_workers);
    }
    layout.ring_sets = assign_rings(grid, n_workers);
    return layout;
}

std::uint64_t ExchangeVolume::total() const {
    std::uint64_t t = 0;
    for (const auto& row : bytes)
        for (auto b : row) t += b;
    return t;
}

namespace {

constexpr std::uint64_t entry_bytes = 16;

void check_exchange_input(const std::vector<DeltaPanel>& panels, const WorkerLayout& layout,
                          bool m_sliced, const char* where) {
    if (panels.size() != static_cast<std::size_t>(layout.n_workers))
        throw std::invalid_argument(std::string(where) + ": panel count != n_workers");
    for (int i = 0; i < layout.n_workers; ++i) {
        const DeltaPanel& p = panels[static_cast<std::size_t>(i)];
        if (m_sliced) {
            if (p.ms != layout.m_sets[static_cast<std::size_t>(i)] ||
                p.rings.size() != static_cast<std::size_t>(layout.n_rings))
                throw std::invalid_argument(std::string(where) + ": layout mismatch");
            for (std::size_t r = 0; r < p.rings.size(); ++r)
                if (p.rings[r] != static_cast<int>(r))
                    throw std::invalid_argument(std::string(where) + ": layout mismatch");
        } else {
            if (p.rings != layout.ring_sets[static_cast<std::size_t>(i)] ||
                p.ms.size() != static_cast<std::size_t>(layout.mmax) + 1)
                throw std::invalid_argument(std::string(where) + ": layout mismatch");
            for (std::size_t c = 0; c < p.ms.size(); ++c)
                if (p.ms[c] != static_cast<int>(c))
                    throw std::invalid_argument(std::string(where) + ": layout mismatch");
        }
        if (p.entries.size() != p.rings.size() * p.ms.size())
            throw std::invalid_argument(std::string(where) + ": panel shape mismatch");
    }
}

struct RingOwner {
    int owner;
    std::size_t row;  // row within the owner's ring slice
};

std::vector<RingOwner> ring_owners(const WorkerLayout& layout) {
    std::vector<RingOwner> own(static_cast<std::size_t>(layout.n_rings), {-1, 0});
    for (int w = 0; w < layout.n_workers; ++w) {
        const auto& rs = layout.ring_sets[static_cast<std::size_t>(w)];
        for (std::size_t j = 0; j < rs.size(); ++j) {
            const int r = rs[j];
            if (r < 0 || r >= layout.n_rings || own[static_cast<std::size_t>(r)].owner >= 0)
                throw std::invalid_argument("exchange: invalid ring layout");
            own[static_cast<std::size_t>(r)] = {w, j};
        }
    }
    for (const RingOwner& ro : own)
        if (ro.owner < 0) throw std::invalid_argument("exchange: ring layout gap");
    return own;
}

}  // namespace

std::vector<DeltaPanel> exchange_m_to_rings(const std::vector<DeltaPanel>& panels,
                                            const WorkerLayout& layout,
                                            ExchangeVolume* volume) {
    check_exchange_input(panels, layout, true, "exchange_m_to_rings");
    const int nw = layout.n_workers;
    const std::size_t n_ms = static_cast<std::size_t>(layout.mmax) + 1;
    const auto owners = ring_owners(layout);

    std::vector<DeltaPanel> out(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) {
        out[w].kind = panels[0].kind;
        out[w].rings = layout.ring_sets[static_cast<std::size_t>(w)];
        out[w].ms.resize(n_ms);
        for (std::size_t c = 0; c < n_ms; ++c) out[w].ms[c] = static_cast<int>(c);
        out[w].entries.assign(out[w].rings.size() * n_ms, cdouble{0.0, 0.0});
    }
    if (volume) volume->bytes.assign(nw, std::vector<std::uint64_t>(nw, 0));

    for (int src = 0; src < nw; ++src) {
        const DeltaPanel& p = panels[static_cast<std::size_t>(src)];
        const std::size_t width = p.ms.size();
        for (int r = 0; r < layout.n_rings; ++r) {
            const RingOwner ro = owners[static_cast<std::size_t>(r)];
            cdouble* dst_row = out[ro.owner].entries.data() + ro.row * n_ms;
            const cdouble* src_row = p.entries.data() + static_cast<std::size_t>(r) * width;
            for (std::size_t c = 0; c < width; ++c)
                dst_row[static_cast<std::size_t>(p.ms[c])] = src_row[c];
            if (volume) volume->bytes[src][ro.owner] += width * entry_bytes;
        }
    }
    return out;
}

std::vector<DeltaPanel> exchange_rings_to_m(const std::vector<DeltaPanel>& panels,
                                            const WorkerLayout& layout,
                                            ExchangeVolume* volume) {
    check_exchange_input(panels, layout, false, "exchange_rings_to_m");
    const int nw = layout.n_workers;
    const std::size_t n_ms = static_cast<std::size_t>(layout.mmax) + 1;

    std::vector<DeltaPanel> out(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) {
        out[w].kind = panels[0].kind;
        out[w].rings = iota_rings(layout.n_rings);
        out[w].ms = layout.m_sets[static_cast<std::size_t>(w)];
        out[w].entries.assign(static_cast<std::size_t>(layout.n_rings) * out[w].ms.size(),
                              cdouble{0.0, 0.0});
    }
    if (volume) volume->bytes.assign(nw, std::vector<std::uint64_t>(nw, 0));

    for (int src = 0; src < nw; ++src) {
        const DeltaPanel& p = panels[static_cast<std::size_t>(src)];
        for (std::size_t j = 0; j < p.rings.size(); ++j) {
            const std::size_t r = static_cast<std::size_t>(p.rings[j]);
            const cdouble* src_row = p.entries.data() + j * n_ms;
            for (int dst = 0; dst < nw; ++dst) {
                const auto& ms = out[dst].ms;
                cdouble* dst_row = out[dst].entries.data() + r * ms.size();
                for (std::size_t c = 0; c < ms.size(); ++c)
                    dst_row[c] = src_row[static_cast<std::size_t>(ms[c])];
                if (volume) volume->bytes[src][dst] += ms.size() * entry_bytes;
            }
        }
    }
    return out;
}

SkyMap distributed_synthesis(const AlmSet& alm, const PixelGrid& grid,
                             const WorkerLayout& layout, const RunOptions& options) {
    check_layout(layout, grid, alm.mmax, options, "distributed_synthesis");
    const int nw = layout.n_workers, nt = options.n_threads;
    Profiler* prof = options.profiler;
    if (prof) prof->configure(nw, nt);

    auto t0 = steady::now();
    const auto cos = grid.cos_thetas();
    const auto logmu = detail::log_mu_table(alm.mmax);
    const auto pairs = options.pairing == PairPolicy::mirror
                           ? mirror_pairs_of(grid)
                           : std::vector<detail::MirrorPair>{};
    if (prof) prof->precompute_s += seconds_since(t0);

    // Stage 1: each worker fills its order slice of the panel over all rings.
    t0 = steady::now();
    std::vector<DeltaPanel> panels(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) {
        panels[w].kind = DeltaKind::synthesis;
        panels[w].rings = iota_rings(layout.n_rings);
        panels[w].ms = layout.m_sets[static_cast<std::size_t>(w)];
        panels[w].entries.assign(cos.size() * panels[w].ms.size(), cdouble{0.0, 0.0});
    }
    run_pool(nw * nt, [&](int job) {
        const int w = job / nt, t = job % nt;
        DeltaPanel& panel = panels[static_cast<std::size_t>(w)];
        std::uint64_t local = 0;
        std::uint64_t* ctr = prof ? prof->step_slot(w, t) : &local;
        if (options.kernel == KernelOrder::ring_major) {
            const auto cols = columns_for(panel.ms, panel.ms);
            const std::size_t begin = cos.size() * static_cast<std::size_t>(t) / nt;
            const std::size_t end = cos.size() * (static_cast<std::size_t>(t) + 1) / nt;
            detail::delta_a_rows_ring_major(alm, cos, begin, end, cols, logmu.data(),
                                            ScaleLadder::standard(), panel.entries.data(),
                                            panel.ms.size(), ctr);
        } else {
            const auto mine = thread_partition(panel.ms, nt)[static_cast<std::size_t>(t)];
            const auto cols = columns_for(mine, panel.ms);
            if (options.pairing == PairPolicy::mirror)
                detail::delta_a_columns_paired(alm, pairs, cols, logmu.data(),
                                               ScaleLadder::standard(), panel.entries.data(),
                                               panel.ms.size(), ctr);
            else
                detail::delta_a_columns(alm, cos, cols, logmu.data(), ScaleLadder::standard(),
                                        panel.entries.data(), panel.ms.size(), ctr);
        }
    });
    if (prof) prof->recurrence_s += seconds_since(t0);

    t0 = steady::now();
    ExchangeVolume volume;
    auto ring_panels = exchange_m_to_rings(panels, layout, &volume);
    panels.clear();
    if (prof) {
        prof->exchange_s += seconds_since(t0);
        prof->exchange_bytes += volume.total();
    }

    // Stage 2: per-ring Fourier synthesis on each worker's ring slice.
    t0 = steady::now();
    SkyMap map;
    map.grid = grid;
    map.pixels.assign(static_cast<std::size_t>(grid.n_pix), 0.0);
    const std::size_t n_ms = static_cast<std::size_t>(alm.mmax) + 1;
    run_pool(nw * nt, [&](int job) {
        const int w = job / nt, t = job % nt;
        const DeltaPanel& panel = ring_panels[static_cast<std::size_t>(w)];
        const std::size_t n_local = panel.rings.size();
        const std::size_t begin = n_local * static_cast<std::size_t>(t) / nt;
        const std::size_t end = n_local * (static_cast<std::size_t>(t) + 1) / nt;
        for (std::size_t j = begin; j < end; ++j) {
            const RingDescriptor& ring = grid.rings[static_cast<std::size_t>(panel.rings[j])];
            ring_synthesis_into({panel.entries.data() + j * n_ms, n_ms}, ring,
                                {map.pixels.data() + ring.pixel_offset,
                                 static_cast<std::size_t>(ring.n_phi)});
        }
    });
    if (prof) prof->fft_s += seconds_since(t0);
    return map;
}

AlmSet distributed_analysis(const SkyMap& map, int lmax, int mmax,
                            const WorkerLayout& layout, const RunOptions& options) {
    if (lmax < mmax || mmax < 0)
        throw std::invalid_argument("distributed_analysis: need lmax >= mmax >= 0");
    const PixelGrid& grid = map.grid;
    if (map.pixels.size() != static_cast<std::size_t>(grid.n_pix))
        throw std::invalid_argument("distributed_analysis: pixel count != grid");
    check_layout(layout, grid, mmax, options, "distributed_analysis");
    const int nw = layout.n_workers, nt = options.n_threads;
    Profiler* prof = options.profiler;
    if (prof) prof->configure(nw, nt);

    auto t0 = steady::now();
    const auto cos = grid.cos_thetas();
    const auto logmu = detail::log_mu_table(mmax);
    const auto pairs = options.pairing == PairPolicy::mirror
                           ? mirror_pairs_of(grid)
                           : std::vector<detail::MirrorPair>{};
    if (prof) prof->precompute_s += seconds_since(t0);

    // Stage 1: per-ring Fourier analysis on each worker's ring slice.
    t0 = steady::now();
    const std::size_t n_ms = static_cast<std::size_t>(mmax) + 1;
    std::vector<DeltaPanel> ring_panels(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) {
        ring_panels[w].kind = DeltaKind::analysis;
        ring_panels[w].rings = layout.ring_sets[static_cast<std::size_t>(w)];
        ring_panels[w].ms.resize(n_ms);
        for (std::size_t c = 0; c < n_ms; ++c) ring_panels[w].ms[c] = static_cast<int>(c);
        ring_panels[w].entries.assign(ring_panels[w].rings.size() * n_ms, cdouble{0.0, 0.0});
    }
    run_pool(nw * nt, [&](int job) {
        const int w = job / nt, t = job % nt;
        DeltaPanel& panel = ring_panels[static_cast<std::size_t>(w)];
        const std::size_t n_local = panel.rings.size();
        const std::size_t begin = n_local * static_cast<std::size_t>(t) / nt;
        const std::size_t end = n_local * (static_cast<std::size_t>(t) + 1) / nt;
        for (std::size_t j = begin; j < end; ++j) {
            const RingDescriptor& ring = grid.rings[static_cast<std::size_t>(panel.rings[j])];
            ring_analysis_into({map.pixels.data() + ring.pixel_offset,
                                static_cast<std::size_t>(ring.n_phi)},
                               ring, mmax, {panel.entries.data() + j * n_ms, n_ms});
        }
    });
    if (prof) prof->fft_s += seconds_since(t0);

    t0 = steady::now();
    ExchangeVolume volume;
    auto m_panels = exchange_rings_to_m(ring_panels, layout, &volume);
    ring_panels.clear();
    if (prof) {
        prof->exchange_s += seconds_since(t0);
        prof->exchange_bytes += volume.total();
    }

    // Stage 2: per-worker Legendre accumulation over its order slice.
    t0 = steady::now();
    std::vector<AlmSet> worker_alm(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) worker_alm[w] = AlmSet(lmax, mmax);
    if (options.kernel != KernelOrder::ring_major) {
        run_pool(nw * nt, [&](int job) {
            const int w = job / nt, t = job % nt;
            const DeltaPanel& panel = m_panels[static_cast<std::size_t>(w)];
            std::uint64_t local = 0;
            std::uint64_t* ctr = prof ? prof->step_slot(w, t) : &local;
            const auto mine = thread_partition(panel.ms, nt)[static_cast<std::size_t>(t)];
            const auto cols = columns_for(mine, panel.ms);
            if (options.pairing == PairPolicy::mirror)
                detail::accumulate_columns_paired(panel, pairs, cols, logmu.data(),
                                                  ScaleLadder::standard(), worker_alm[w], ctr);
            else
                detail::accumulate_columns(panel, cos, cols, logmu.data(),
                                           ScaleLadder::standard(), worker_alm[w], ctr);
        });
    } else {
        // Threads take ring blocks; per-thread partials reduce in thread order.
        for (int w = 0; w < nw; ++w) {
            const DeltaPanel& panel = m_panels[static_cast<std::size_t>(w)];
            std::vector<PartialAlm> parts(static_cast<std::size_t>(nt));
            run_pool(nt, [&](int t) {
                const std::size_t n_local = panel.rings.size();
                const std::size_t begin = n_local * static_cast<std::size_t>(t) / nt;
                const std::size_t end = n_local * (static_cast<std::size_t>(t) + 1) / nt;
                DeltaPanel block;
                block.kind = panel.kind;
                block.rings.assign(panel.rings.begin() + begin, panel.rings.begin() + end);
                block.ms = panel.ms;
                block.entries.assign(panel.entries.begin() + begin * panel.ms.size(),
                                     panel.entries.begin() + end * panel.ms.size());
                std::vector<double> xs(block.rings.size());
                for (std::size_t j = 0; j < block.rings.size(); ++j)
                    xs[j] = cos[static_cast<std::size_t>(block.rings[j])];
                std::uint64_t local = 0;
                std::uint64_t* ctr = prof ? prof->step_slot(w, t) : &local;
                parts[static_cast<std::size_t>(t)] =
                    accumulate_alm_partial(block, xs, lmax, mmax, ScaleLadder::standard(), ctr);
            });
            worker_alm[w] = reduce_partials(parts, cos.size());
        }
    }

    // Deterministic merge: ascending worker order.
    AlmSet out(lmax, mmax);
    for (int w = 0; w < nw; ++w)
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += worker_alm[static_cast<std::size_t>(w)].values[i];
    if (prof) prof->recurrence_s += seconds_since(t0);
    return out;
}

}  // namespace sht
