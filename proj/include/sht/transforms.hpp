#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sht/alm.hpp"
#include "sht/legendre.hpp"

namespace sht {

/// Loop ordering of the Legendre-stage kernels. Both orders keep l
/// innermost and stream the recurrence; they differ in whether orders or
/// rings form the outer (parallelizable) loop.
enum class KernelOrder { m_major, ring_major };

/// mirror computes each north/south ring pair from a single recurrence
/// stream using the parity P_{lm}(-x) = (-1)^(l+m) P_{lm}(x). Pure
/// optimization; results match the unpaired path to rounding.
enum class PairPolicy { none, mirror };

struct TransformOptions {
    KernelOrder kernel = KernelOrder::m_major;
    PairPolicy pairing = PairPolicy::none;
    /// When set, incremented by lmax-m+1 per (order, recurrence stream).
    std::uint64_t* step_counter = nullptr;
};

/// Delta^A_m(r) = sum_{l=m}^{lmax} a_{lm} P_{lm}(cos r) for every m in
/// m_set and every ring latitude. Orders outermost (coefficients built once
/// per m), rings middle, l innermost.
DeltaPanel compute_delta_a(const AlmSet& alm, std::span<const double> cos_thetas,
                           std::span<const int> m_set,
                           const ScaleLadder& ladder = ScaleLadder::standard(),
                           std::uint64_t* step_counter = nullptr);

/// Same contract as compute_delta_a with rings outermost, one ring per work
/// item; recurrence coefficients are recomputed into a fixed 256-entry tile
/// per (ring, m) instead of being held per order.
DeltaPanel compute_delta_a_ring_major(const AlmSet& alm, std::span<const double> cos_thetas,
                                      std::span<const int> m_set, int n_work_items = 1,
                                      const ScaleLadder& ladder = ScaleLadder::standard(),
                                      std::uint64_t* step_counter = nullptr);

/// a_{lm} = sum_r Delta^S_m(r) P_{lm}(cos r). The panel must cover every
/// ring of the grid (rings 0..n_rings-1); cos_thetas is the full grid
/// latitude list. Ring loop outermost within each m.
AlmSet accumulate_alm(const DeltaPanel& panel, std::span<const double> cos_thetas,
                      int lmax, int mmax,
                      const ScaleLadder& ladder = ScaleLadder::standard(),
                      std::uint64_t* step_counter = nullptr);

/// Contribution of a ring subset; rings ride along for the reduction.
struct PartialAlm {
    AlmSet alm;
    std::vector<int> rings;
};

/// As accumulate_alm but over the panel's ring subset only; cos_thetas here
/// are the latitudes of exactly those rings.
PartialAlm accumulate_alm_partial(const DeltaPanel& panel, std::span<const double> cos_thetas,
                                  int lmax, int mmax,
                                  const ScaleLadder& ladder = ScaleLadder::standard(),
                                  std::uint64_t* step_counter = nullptr);

/// Sums partials in ascending list order (documented, bit-reproducible for
/// a fixed partition). The ring subsets must be disjoint and cover
/// 0..n_rings-1 exactly.
AlmSet reduce_partials(std::span<const PartialAlm> parts, std::size_t n_rings);

/// Whole-sphere inverse transform: Legendre stage over all orders, then one
/// Fourier synthesis per ring.
SkyMap synthesis(const AlmSet& alm, const PixelGrid& grid,
                 const TransformOptions& options = {});

/// Whole-sphere direct transform: Fourier analysis per ring, then the
/// Legendre-stage accumulation over all orders.
AlmSet analysis(const SkyMap& map, int lmax, int mmax,
                const TransformOptions& options = {});

namespace detail {

/// Column of a panel an order maps to.
struct MColumn {
    int m = 0;
    std::size_t col = 0;
};

/// log(mu_m) for m = 0..mmax; the precompute stage of a transform.
std::vector<double> log_mu_table(int mmax);

void delta_a_columns(const AlmSet& alm, std::span<const double> cos_thetas,
                     std::span<const MColumn> cols, const double* log_mu,
                     const ScaleLadder& ladder, cdouble* entries, std::size_t row_stride,
                     std::uint64_t* step_counter);

void delta_a_rows_ring_major(const AlmSet& alm, std::span<const double> cos_thetas,
                             std::size_t row_begin, std::size_t row_end,
                             std::span<const MColumn> cols, const double* log_mu,
                             const ScaleLadder& ladder, cdouble* entries,
                             std::size_t row_stride, std::uint64_t* step_counter);

void accumulate_columns(const DeltaPanel& panel, std::span<const double> cos_thetas,
                        std::span<const MColumn> cols, const double* log_mu,
                        const ScaleLadder& ladder, AlmSet& out,
                        std::uint64_t* step_counter);

/// Mirror-paired variants; pairs are (north row, south row or -1, latitude
/// of the north row).
struct MirrorPair {
    std::size_t north = 0;
    std::ptrdiff_t south = -1;  // -1: self-paired equator row
    double x = 0.0;
};

void delta_a_columns_paired(const AlmSet& alm, std::span<const MirrorPair> pairs,
                            std::span<const MColumn> cols, const double* log_mu,
                            const ScaleLadder& ladder, cdouble* entries,
                            std::size_t row_stride, std::uint64_t* step_counter);

void accumulate_columns_paired(const DeltaPanel& panel, std::span<const MirrorPair> pairs,
                               std::span<const MColumn> cols, const double* log_mu,
                               const ScaleLadder& ladder, AlmSet& out,
                               std::uint64_t* step_counter);

}  // namespace detail

}  // namespace sht
