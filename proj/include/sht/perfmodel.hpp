#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sht {

/// Machine parameters of the runtime model: per-message latency alpha (s),
/// inverse bandwidth beta (s/byte), inverse compute rate gamma (s/flop) and
/// the per-coefficient payload n_c (bytes).
struct CostParams {
    double alpha = 1e-5;
    double beta_inv_bw = 1e-9;
    double gamma = 1e-10;
    int n_c = 16;
    /// Exchange messages at most this large use the recursive-halving
    /// estimate; larger ones the flat all-to-all estimate. Inclusive.
    double switch_bytes = 262144.0;
};

/// Nominal flop weights: c1 per precomputed order, c2 per recurrence step
/// (two multiplies, one subtract, one threshold test), c3 per FFT butterfly.
inline constexpr double flops_c1 = 8.0;
inline constexpr double flops_c2 = 4.0;
inline constexpr double flops_c3 = 5.0;

struct FlopsBreakdown {
    double precompute = 0.0;
    double recurrence = 0.0;
    double fft = 0.0;

    double total() const { return precompute + recurrence + fft; }
};

/// Stage flop estimates for a transform over r_n rings at band limits
/// (lmax, mmax), split across n_workers:
///   precompute = c1 * mmax
///   recurrence = c2 * r_n * lmax * mmax / n_workers
///   fft        = c3 * (r_n / n_workers) * mmax * log2(mmax)
FlopsBreakdown flops_estimate(double r_n, double lmax, double mmax, int n_workers);

/// Bytes of one pairwise exchange message:
///   S = r_n * (mmax / n_workers) * n_c.
double message_size(double r_n, double mmax, int n_workers, int n_c = 16);

/// All-to-all exchange time for per-pair message size s_msg bytes among
/// n_workers. Zero for a single worker.
double comm_time(double s_msg, int n_workers, const CostParams& params = {});

/// Predicted stage times over nside in nsides x n_workers in worker_counts,
/// written as CSV: nside,lmax,mmax,n_workers,precompute_s,compute_s,comm_s,
/// ratio. Band limits follow lmax = mmax = 2*nside, r_n = 4*nside - 1;
/// compute_s = gamma * (recurrence + fft) so it scales exactly as
/// 1/n_workers; ratio = compute_s / comm_s.
void runtime_curves(std::ostream& os, std::span<const int> nsides,
                    std::span<const int> worker_counts, const CostParams& params = {});

/// Wall-clock and step counts collected by the distributed drivers. Slots
/// are per (worker, thread); stage seconds accumulate across calls.
class Profiler {
public:
    void configure(int n_workers, int n_threads);

    std::uint64_t* step_slot(int worker, int thread);
    std::uint64_t slot_steps(int worker, int thread) const;
    std::uint64_t total_steps() const;

    int n_workers() const { return n_workers_; }
    int n_threads() const { return n_threads_; }

    double precompute_s = 0.0;
    double recurrence_s = 0.0;
    double exchange_s = 0.0;
    double fft_s = 0.0;
    std::uint64_t exchange_bytes = 0;

private:
    int n_workers_ = 0;
    int n_threads_ = 0;
    std::vector<std::uint64_t> steps_;
};

/// One row of a model-versus-measurement report.
struct StageCost {
    std::string stage;
    double predicted_s = 0.0;
    bool has_measured = false;
    double measured_s = 0.0;
    double flops = 0.0;
    double bytes = 0.0;
};

struct CostReport {
    std::vector<StageCost> stages;

    /// CSV with header stage,predicted_s,measured_s,flops,bytes; the
    /// measured field is empty when no run was profiled.
    void write_csv(std::ostream& os) const;
};

/// Model rows for the four stages, with measured times filled in from a
/// profiled run when one is supplied.
CostReport build_report(double r_n, double lmax, double mmax, int n_workers,
                        const Profiler* prof = nullptr, const CostParams& params = {});

}  // namespace sht
