#pragma once

#include <cstdint>
#include <vector>

#include "sht/perfmodel.hpp"
#include "sht/transforms.hpp"

namespace sht {

/// Orders for each of n_workers workers. Worker i takes the index-i slice
/// of the pair list (0, mmax), (1, mmax-1), ... dealt round-robin, so every
/// worker holds (almost) the same total of lmax-m+1 recurrence lengths.
/// Requires 2*n_workers <= mmax + 1. Sets come back sorted ascending.
std::vector<std::vector<int>> assign_m(int mmax, int n_workers);

/// Rings for each worker: consecutive blocks of the northern half
/// (equator included) plus their mirrors, so each worker's set is closed
/// under the north-south reflection. Requires 2*n_workers <= n_rings + 1.
/// Sets come back sorted ascending.
std::vector<std::vector<int>> assign_rings(const PixelGrid& grid, int n_workers);

/// Splits one worker's order set across threads by the same paired deal,
/// pairing the set's own (min, max) remaining extremes; a leftover middle
/// order goes to the currently least-loaded thread (ties to the lowest
/// thread id). Sets come back sorted ascending.
std::vector<std::vector<int>> thread_partition(const std::vector<int>& m_set, int n_threads);

/// Static decomposition shared by both transform directions.
struct WorkerLayout {
    int n_workers = 1;
    int mmax = 0;
    int n_rings = 0;
    std::vector<std::vector<int>> m_sets;
    std::vector<std::vector<int>> ring_sets;

    static WorkerLayout create(const PixelGrid& grid, int mmax, int n_workers);
};

/// Pairwise byte counts bytes[from][to] of one panel exchange, n_c = 16
/// bytes per entry; the diagonal counts the worker's own retained block.
struct ExchangeVolume {
    std::vector<std::vector<std::uint64_t>> bytes;

    std::uint64_t total() const;
};

/// Repartitions per-worker panels from order slices (all rings x M_i) to
/// ring slices (R_i x all orders), or back. The in-process transpose stands
/// in for the network all-to-all; byte accounting matches what an MPI
/// implementation would move, including the self block.
std::vector<DeltaPanel> exchange_m_to_rings(const std::vector<DeltaPanel>& panels,
                                            const WorkerLayout& layout,
                                            ExchangeVolume* volume = nullptr);
std::vector<DeltaPanel> exchange_rings_to_m(const std::vector<DeltaPanel>& panels,
                                            const WorkerLayout& layout,
                                            ExchangeVolume* volume = nullptr);

struct RunOptions {
    int n_threads = 1;
    KernelOrder kernel = KernelOrder::m_major;
    PairPolicy pairing = PairPolicy::none;
    Profiler* profiler = nullptr;
};

/// Inverse transform split over layout.n_workers workers, each running
/// n_threads threads: per-worker Legendre stage over its order slice, panel
/// exchange to ring slices, per-ring Fourier synthesis. Results are
/// independent of the worker and thread counts.
SkyMap distributed_synthesis(const AlmSet& alm, const PixelGrid& grid,
                             const WorkerLayout& layout, const RunOptions& options = {});

/// Direct transform: per-ring Fourier analysis on ring slices, exchange to
/// order slices, per-worker Legendre accumulation, then a deterministic
/// merge in ascending worker order.
AlmSet distributed_analysis(const SkyMap& map, int lmax, int mmax,
                            const WorkerLayout& layout, const RunOptions& options = {});

}  // namespace sht
