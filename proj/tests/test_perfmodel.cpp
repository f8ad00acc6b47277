#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sht/distribution.hpp"
#include "sht/perfmodel.hpp"

using sht::CostParams;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

struct CurveRow {
    int nside, n_workers;
    double lmax, mmax, precompute_s, compute_s, comm_s, ratio;
};

std::vector<CurveRow> parse_curves(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    REQUIRE(std::getline(in, line));
    REQUIRE(line == "nside,lmax,mmax,n_workers,precompute_s,compute_s,comm_s,ratio");
    std::vector<CurveRow> rows;
    while (std::getline(in, line)) {
        auto f = split_csv_line(line);
        REQUIRE(f.size() == 8);
        rows.push_back({std::stoi(f[0]), std::stoi(f[3]), std::stod(f[1]), std::stod(f[2]),
                        std::stod(f[4]), std::stod(f[5]), std::stod(f[6]), std::stod(f[7])});
    }
    return rows;
}

// Smallest power-of-two worker count whose predicted compute/comm ratio
// drops below one.
int ratio_one_crossing(int nside, const CostParams& params) {
    const double lmax = 2.0 * nside, mmax = 2.0 * nside, r_n = 4.0 * nside - 1.0;
    for (int n = 2; n <= 4096; n *= 2) {
        const auto fb = sht::flops_estimate(r_n, lmax, mmax, n);
        const double compute = params.gamma * (fb.recurrence + fb.fft);
        const double comm = sht::comm_time(sht::message_size(r_n, mmax, n, params.n_c),
                                           n, params);
        if (compute / comm < 1.0) return n;
    }
    return -1;
}

}  // namespace

TEST_CASE("flops estimate follows the per-stage closed forms") {
    auto fb = sht::flops_estimate(15, 8, 8, 1);
    CHECK(fb.recurrence == sht::flops_c2 * 960.0);
    CHECK(fb.precompute == sht::flops_c1 * 8.0);
    CHECK(fb.fft == sht::flops_c3 * 15.0 * 8.0 * 3.0);
    CHECK(fb.total() == fb.precompute + fb.recurrence + fb.fft);

    auto doubled = sht::flops_estimate(30, 16, 16, 1);
    CHECK(doubled.recurrence == 8.0 * fb.recurrence);

    auto split = sht::flops_estimate(15, 8, 8, 2);
    CHECK(split.recurrence == 0.5 * fb.recurrence);
    CHECK(split.fft == 0.5 * fb.fft);
    CHECK(split.precompute == fb.precompute);

    CHECK_THROWS_AS(sht::flops_estimate(15, 8, 8, 0), std::invalid_argument);
    CHECK_THROWS_AS(sht::flops_estimate(-1, 8, 8, 1), std::invalid_argument);
}

TEST_CASE("message size is the literal product") {
    CHECK(sht::message_size(15, 8, 4, 16) == 480.0);
    CHECK(sht::message_size(15, 8, 1, 16) == 15.0 * 8.0 * 16.0);
    CHECK(sht::message_size(16383, 8192, 128, 16) == 16776192.0);
    CHECK_THROWS_AS(sht::message_size(15, 8, 0, 16), std::invalid_argument);
    CHECK_THROWS_AS(sht::message_size(15, -8, 1, 16), std::invalid_argument);
}

TEST_CASE("communication model switches branches at 256 kB inclusive") {
    CostParams p;
    CHECK(sht::comm_time(480, 1) == 0.0);

    const double short_val = sht::comm_time(480, 4);
    CHECK(short_val == p.alpha * 2.0 + p.beta_inv_bw * 480.0 * 2.0 * 2.0);
    CHECK(short_val == doctest::Approx(2.192e-5).epsilon(1e-12));

    const double long_val = sht::comm_time(1048576, 4);
    CHECK(long_val == p.alpha * 3.0 + p.beta_inv_bw * 1048576.0 * 3.0);
    CHECK(long_val == doctest::Approx(3.175728e-3).epsilon(1e-12));
    CHECK(long_val == doctest::Approx(3.1758e-3).epsilon(1e-4));

    const double at_switch = sht::comm_time(262144.0, 4);
    CHECK(at_switch == p.alpha * 2.0 + p.beta_inv_bw * 262144.0 * 2.0 * 2.0);
    const double past_switch = sht::comm_time(262145.0, 4);
    CHECK(past_switch == p.alpha * 3.0 + p.beta_inv_bw * 262145.0 * 3.0);

    CHECK_THROWS_AS(sht::comm_time(480, 0), std::invalid_argument);
    CHECK_THROWS_AS(sht::comm_time(-1.0, 2), std::invalid_argument);
}

TEST_CASE("long-message communication is nearly flat in the worker count") {
    const double s1 = 1e9;
    const double a = sht::comm_time(s1 / 512, 512);
    const double b = sht::comm_time(s1 / 1024, 1024);
    CHECK(b / a == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("runtime curves halve compute per worker doubling and cross over later on larger problems") {
    std::ostringstream out;
    const std::vector<int> nsides{256, 512};
    const std::vector<int> workers{1, 2, 4, 8};
    sht::runtime_curves(out, nsides, workers, {});
    auto rows = parse_curves(out.str());
    REQUIRE(rows.size() == nsides.size() * workers.size());

    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].lmax == 2.0 * rows[i].nside);
        CHECK(rows[i].mmax == 2.0 * rows[i].nside);
        if (i % workers.size() != 0) {
            CHECK(rows[i].nside == rows[i - 1].nside);
            CHECK(rows[i].compute_s == doctest::Approx(rows[i - 1].compute_s / 2).epsilon(1e-11));
        }
        if (rows[i].n_workers > 1) {
            CHECK(rows[i].ratio ==
                  doctest::Approx(rows[i].compute_s / rows[i].comm_s).epsilon(1e-9));
        } else {
            CHECK(rows[i].comm_s == 0.0);
            CHECK(rows[i].ratio == 0.0);
        }
    }

    const int small = ratio_one_crossing(64, {});
    const int large = ratio_one_crossing(1024, {});
    REQUIRE(small > 0);
    REQUIRE(large > 0);
    CHECK(large > small);

    std::ostringstream bad;
    CHECK_THROWS_AS(sht::runtime_curves(bad, std::vector<int>{0}, workers, {}),
                    std::invalid_argument);
}

TEST_CASE("counted recurrence steps match the closed-form identity") {
    const int lmax = 8, mmax = 8;
    auto grid = sht::build_gauss_legendre_grid(15, 18);
    const std::uint64_t r_n = 15;

    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    sht::AlmSet alm(lmax, mmax);
    for (auto& v : alm.values) v = sht::cdouble{dist(gen), dist(gen)};
    for (int l = 0; l <= lmax; ++l) alm.at(l, 0).imag(0.0);

    sht::Profiler prof;
    sht::RunOptions opts;
    opts.profiler = &prof;
    auto layout = sht::WorkerLayout::create(grid, mmax, 2);
    opts.n_threads = 2;
    (void)sht::distributed_synthesis(alm, grid, layout, opts);

    std::int64_t two_term = 0;
    for (int m = 0; m <= mmax; ++m) two_term += static_cast<std::int64_t>(lmax - m - 1) * 15;
    two_term += 2 * 15 * (mmax + 1);

    std::uint64_t per_stream = 0;
    for (int m = 0; m <= mmax; ++m) per_stream += static_cast<std::uint64_t>(lmax - m + 1);

    CHECK(prof.total_steps() == static_cast<std::uint64_t>(two_term));
    CHECK(prof.total_steps() == r_n * per_stream);
}

TEST_CASE("counted steps grow with the third power of the band limit") {
    std::vector<double> logs_l, logs_s;
    for (int lmax : {64, 128, 256, 512}) {
        const std::uint64_t r_n = static_cast<std::uint64_t>(lmax) + 1;
        std::uint64_t steps = 0;
        for (int m = 0; m <= lmax; ++m)
            steps += r_n * static_cast<std::uint64_t>(lmax - m + 1);
        logs_l.push_back(std::log(static_cast<double>(lmax)));
        logs_s.push_back(std::log(static_cast<double>(steps)));
    }
    double mean_l = 0, mean_s = 0;
    for (std::size_t i = 0; i < logs_l.size(); ++i) {
        mean_l += logs_l[i];
        mean_s += logs_s[i];
    }
    mean_l /= logs_l.size();
    mean_s /= logs_s.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < logs_l.size(); ++i) {
        num += (logs_l[i] - mean_l) * (logs_s[i] - mean_s);
        den += (logs_l[i] - mean_l) * (logs_l[i] - mean_l);
    }
    const double slope = num / den;
    CHECK(slope == doctest::Approx(3.0).epsilon(0.04));
}

TEST_CASE("cost report rows carry the model predictions and profiler measurements") {
    CostParams p;
    auto rep = sht::build_report(15, 8, 8, 4);
    REQUIRE(rep.stages.size() == 4);
    CHECK(rep.stages[0].stage == "precompute");
    CHECK(rep.stages[1].stage == "recurrence");
    CHECK(rep.stages[2].stage == "exchange");
    CHECK(rep.stages[3].stage == "fft");

    auto fb = sht::flops_estimate(15, 8, 8, 4);
    CHECK(rep.stages[0].predicted_s == p.gamma * fb.precompute);
    CHECK(rep.stages[1].predicted_s == p.gamma * fb.recurrence);
    CHECK(rep.stages[2].predicted_s == sht::comm_time(480, 4));
    CHECK(rep.stages[3].predicted_s == p.gamma * fb.fft);
    CHECK(rep.stages[2].bytes == 480.0 * 4 * 3);
    for (const auto& s : rep.stages) CHECK_FALSE(s.has_measured);

    std::ostringstream out;
    rep.write_csv(out);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "stage,predicted_s,measured_s,flops,bytes");
    int rows = 0;
    while (std::getline(in, line)) {
        auto f = split_csv_line(line);
        REQUIRE(f.size() == 5);
        CHECK(f[2].empty());  // no measured column without a profiler
        ++rows;
    }
    CHECK(rows == 4);

    sht::Profiler prof;
    prof.configure(2, 1);
    prof.precompute_s = 0.25;
    prof.recurrence_s = 1.5;
    prof.exchange_s = 0.125;
    prof.fft_s = 0.5;
    prof.exchange_bytes = 4096;
    auto measured = sht::build_report(15, 8, 8, 2, &prof);
    for (const auto& s : measured.stages) CHECK(s.has_measured);
    CHECK(measured.stages[1].measured_s == 1.5);
    CHECK(measured.stages[2].bytes == 4096.0);

    std::ostringstream out2;
    measured.write_csv(out2);
    std::istringstream in2(out2.str());
    REQUIRE(std::getline(in2, line));
    REQUIRE(std::getline(in2, line));
    auto f = split_csv_line(line);
    CHECK(f[0] == "precompute");
    CHECK(std::stod(f[2]) == 0.25);
}

TEST_CASE("profiler slots accumulate per worker and thread") {
    sht::Profiler prof;
    prof.configure(2, 3);
    CHECK(prof.n_workers() == 2);
    CHECK(prof.n_threads() == 3);
    *prof.step_slot(0, 0) += 5;
    *prof.step_slot(1, 2) += 7;
    *prof.step_slot(1, 2) += 1;
    CHECK(prof.slot_steps(0, 0) == 5);
    CHECK(prof.slot_steps(1, 2) == 8);
    CHECK(prof.slot_steps(0, 1) == 0);
    CHECK(prof.total_steps() == 13);

    prof.configure(1, 1);
    CHECK(prof.total_steps() == 0);
    CHECK(prof.precompute_s == 0.0);

    CHECK_THROWS_AS(prof.step_slot(1, 0), std::out_of_range);
    CHECK_THROWS_AS(prof.slot_steps(0, 1), std::out_of_range);
    CHECK_THROWS_AS(prof.configure(0, 1), std::invalid_argument);
}
