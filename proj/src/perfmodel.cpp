#include "sht/perfmodel.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace sht {

FlopsBreakdown flops_estimate(double r_n, double lmax, double mmax, int n_workers) {
    if (n_workers < 1) throw std::invalid_argument("flops_estimate: n_workers must be >= 1");
    if (r_n < 0 || lmax < 0 || mmax < 0)
        throw std::invalid_argument("flops_estimate: negative problem size");
    FlopsBreakdown fb;
    fb.precompute = flops_c1 * mmax;
    fb.recurrence = flops_c2 * r_n * lmax * mmax / n_workers;
    fb.fft = flops_c3 * (r_n / n_workers) * mmax * std::log2(std::max(mmax, 2.0));
    return fb;
}

double message_size(double r_n, double mmax, int n_workers, int n_c) {
    if (n_workers < 1) throw std::invalid_argument("message_size: n_workers must be >= 1");
    if (r_n < 0 || mmax < 0 || n_c < 1)
        throw std::invalid_argument("message_size: negative problem size");
    return r_n * (mmax / n_workers) * n_c;
}

double comm_time(double s_msg, int n_workers, const CostParams& params) {
    if (n_workers < 1) throw std::invalid_argument("comm_time: n_workers must be >= 1");
    if (s_msg < 0) throw std::invalid_argument("comm_time: negative message size");
    if (n_workers == 1) return 0.0;
    const double n = n_workers;
    if (s_msg <= params.switch_bytes)
        return params.alpha * std::log2(n) + params.beta_inv_bw * s_msg * (n / 2.0) * std::log2(n);
    return params.alpha * (n - 1.0) + params.beta_inv_bw * s_msg * (n - 1.0);
}

void runtime_curves(std::ostream& os, std::span<const int> nsides,
                    std::span<const int> worker_counts, const CostParams& params) {
    os << "nside,lmax,mmax,n_workers,precompute_s,compute_s,comm_s,ratio\n";
    os.precision(12);
    for (int nside : nsides) {
        if (nside < 1) throw std::invalid_argument("runtime_curves: nside must be >= 1");
        const double lmax = 2.0 * nside, mmax = 2.0 * nside;
        const double r_n = 4.0 * nside - 1.0;
        for (int n : worker_counts) {
            const FlopsBreakdown fb = flops_estimate(r_n, lmax, mmax, n);
            const double pre = params.gamma * fb.precompute;
            const double compute = params.gamma * (fb.recurrence + fb.fft);
            const double comm = comm_time(message_size(r_n, mmax, n, params.n_c), n, params);
            const double ratio = comm > 0.0 ? compute / comm : 0.0;
            os << nside << ',' << lmax << ',' << mmax << ',' << n << ',' << pre << ','
               << compute << ',' << comm << ',' << ratio << '\n';
        }
    }
}

void Profiler::configure(int n_workers, int n_threads) {
    if (n_workers < 1 || n_threads < 1)
        throw std::invalid_argument("Profiler: worker and thread counts must be >= 1");
    n_workers_ = n_workers;
    n_threads_ = n_threads;
    steps_.assign(static_cast<std::size_t>(n_workers) * n_threads, 0);
    precompute_s = recurrence_s = exchange_s = fft_s = 0.0;
    exchange_bytes = 0;
}

std::uint64_t* Profiler::step_slot(int worker, int thread) {
    if (worker < 0 || worker >= n_workers_ || thread < 0 || thread >= n_threads_)
        throw std::out_of_range("Profiler::step_slot");
    return &steps_[static_cast<std::size_t>(worker) * n_threads_ + thread];
}

std::uint64_t Profiler::slot_steps(int worker, int thread) const {
    if (worker < 0 || worker >= n_workers_ || thread < 0 || thread >= n_threads_)
        throw std::out_of_range("Profiler::slot_steps");
    return steps_[static_cast<std::size_t>(worker) * n_threads_ + thread];
}

std::uint64_t Profiler::total_steps() const {
    std::uint64_t t = 0;
    for (auto s : steps_) t += s;
    return t;
}

void CostReport::write_csv(std::ostream& os) const {
    os << "stage,predicted_s,measured_s,flops,bytes\n";
    os.precision(12);
    for (const StageCost& sc : stages) {
        os << sc.stage << ',' << sc.predicted_s << ',';
        if (sc.has_measured) os << sc.measured_s;
        os << ',' << sc.flops << ',' << sc.bytes << '\n';
    }
}

CostReport build_report(double r_n, double lmax, double mmax, int n_workers,
                        const Profiler* prof, const CostParams& params) {
    const FlopsBreakdown fb = flops_estimate(r_n, lmax, mmax, n_workers);
    const double s_msg = message_size(r_n, mmax, n_workers, params.n_c);
    CostReport rep;
    rep.stages = {
        {"precompute", params.gamma * fb.precompute, false, 0.0, fb.precompute, 0.0},
        {"recurrence", params.gamma * fb.recurrence, false, 0.0, fb.recurrence, 0.0},
        {"exchange", comm_time(s_msg, n_workers, params), false, 0.0, 0.0,
         s_msg * n_workers * std::max(n_workers - 1, 0)},
        {"fft", params.gamma * fb.fft, false, 0.0, fb.fft, 0.0},
    };
    if (prof) {
        rep.stages[0].has_measured = true;
        rep.stages[0].measured_s = prof->precompute_s;
        rep.stages[1].has_measured = true;
        rep.stages[1].measured_s = prof->recurrence_s;
        rep.stages[2].has_measured = true;
        rep.stages[2].measured_s = prof->exchange_s;
        rep.stages[2].bytes = static_cast<double>(prof->exchange_bytes);
        rep.stages[3].has_measured = true;
        rep.stages[3].measured_s = prof->fft_s;
    }
    return rep;
}

}  // namespace sht
