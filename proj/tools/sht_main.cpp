#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sht/distribution.hpp"
#include "sht/experiment.hpp"
#include "sht/io.hpp"
#include "sht/perfmodel.hpp"

namespace {

struct ExperimentConfig {
    std::string grid = "healpix";
    int nside = 64;
    int nrings = 0;
    int nphi = 0;
    int lmax = 128;
    int mmax = -1;  // -1: follow lmax
    std::uint64_t seed = 12345;
    int n_workers = 1;
    int n_threads = 1;
    std::string kernel = "m-major";
    std::string out;
    std::string csv;
};

void add_grid_flags(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--grid", cfg.grid, "Grid scheme: healpix or gauss-legendre")
        ->check(CLI::IsMember({"healpix", "gauss-legendre"}))
        ->capture_default_str();
    cmd->add_option("--nside", cfg.nside, "HEALPix resolution parameter")
        ->capture_default_str();
    cmd->add_option("--nrings", cfg.nrings, "Gauss-Legendre ring count");
    cmd->add_option("--nphi", cfg.nphi, "Samples per Gauss-Legendre ring (default 2*nrings)");
}

void add_band_flags(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--lmax", cfg.lmax, "Maximum degree")->capture_default_str();
    cmd->add_option("--mmax", cfg.mmax, "Maximum order (default: lmax)");
}

void add_run_flags(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--workers", cfg.n_workers, "Worker count")->capture_default_str();
    cmd->add_option("--threads", cfg.n_threads, "Threads per worker")
        ->envname("SHT_THREADS")
        ->capture_default_str();
    cmd->add_option("--kernel", cfg.kernel, "Legendre kernel order")
        ->check(CLI::IsMember({"m-major", "ring-major"}))
        ->capture_default_str();
}

sht::PixelGrid make_grid(const ExperimentConfig& cfg) {
    if (cfg.grid == "healpix") return sht::build_healpix_grid(cfg.nside);
    const int nr = cfg.nrings > 0 ? cfg.nrings : cfg.lmax + 1;
    const int np = cfg.nphi > 0 ? cfg.nphi : 2 * nr;
    return sht::build_gauss_legendre_grid(nr, np);
}

int resolved_mmax(const ExperimentConfig& cfg) {
    return cfg.mmax >= 0 ? cfg.mmax : cfg.lmax;
}

sht::RunOptions run_options(const ExperimentConfig& cfg, sht::Profiler* prof = nullptr) {
    sht::RunOptions opt;
    opt.n_threads = cfg.n_threads;
    opt.kernel = cfg.kernel == "ring-major" ? sht::KernelOrder::ring_major
                                            : sht::KernelOrder::m_major;
    opt.profiler = prof;
    return opt;
}

std::string set_to_string(const std::vector<int>& s) {
    std::ostringstream os;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << ' ';
        os << s[i];
    }
    return os.str();
}

void cmd_grid_info(const ExperimentConfig& cfg) {
    const auto grid = make_grid(cfg);
    double wsum = 0.0;
    for (const auto& r : grid.rings) wsum += r.weight * r.n_phi;
    std::cout << "scheme " << to_string(grid.scheme) << "\n";
    if (grid.scheme == sht::GridScheme::healpix_ring)
        std::cout << "nside " << grid.nside << "\n";
    std::cout << "rings " << grid.n_rings() << "\n"
              << "pixels " << grid.n_pix << "\n";
    std::cout.precision(15);
    std::cout << "weight_sum_over_4pi " << wsum / (4.0 * 3.14159265358979323846) << "\n";
}

void cmd_synth(const ExperimentConfig& cfg, const std::string& alm_in) {
    const auto grid = make_grid(cfg);
    const int mmax = resolved_mmax(cfg);
    const sht::AlmSet alm = alm_in.empty() ? sht::random_alm(cfg.lmax, mmax, cfg.seed)
                                           : sht::read_alm(alm_in);
    const auto layout = sht::WorkerLayout::create(grid, alm.mmax, cfg.n_workers);
    const auto map = sht::distributed_synthesis(alm, grid, layout, run_options(cfg));
    if (cfg.out.empty()) throw std::runtime_error("synth: --out is required");
    sht::write_map(cfg.out, map);
    std::cout << "wrote " << cfg.out << " (" << map.pixels.size() << " pixels)\n";
}

void cmd_analyze(const ExperimentConfig& cfg, const std::string& map_in) {
    const auto map = sht::read_map(map_in);
    const int mmax = resolved_mmax(cfg);
    const auto layout = sht::WorkerLayout::create(map.grid, mmax, cfg.n_workers);
    const auto alm = sht::distributed_analysis(map, cfg.lmax, mmax, layout, run_options(cfg));
    if (cfg.out.empty()) throw std::runtime_error("analyze: --out is required");
    sht::write_alm(cfg.out, alm);
    std::cout << "wrote " << cfg.out << " (" << alm.values.size() << " coefficients)\n";
}

void cmd_roundtrip(const ExperimentConfig& cfg) {
    const auto grid = make_grid(cfg);
    const int mmax = resolved_mmax(cfg);
    const auto alm = sht::random_alm(cfg.lmax, mmax, cfg.seed);
    const auto layout = sht::WorkerLayout::create(grid, mmax, cfg.n_workers);
    const auto opt = run_options(cfg);
    const auto map = sht::distributed_synthesis(alm, grid, layout, opt);
    const auto back = sht::distributed_analysis(map, cfg.lmax, mmax, layout, opt);
    std::cout.precision(17);
    std::cout << "D_err " << sht::roundtrip_error(alm, back) << "\n";
    if (!cfg.out.empty()) sht::write_alm(cfg.out, back);
}

void cmd_bench(const ExperimentConfig& cfg) {
    const auto grid = make_grid(cfg);
    const int mmax = resolved_mmax(cfg);
    const auto alm = sht::random_alm(cfg.lmax, mmax, cfg.seed);
    const auto layout = sht::WorkerLayout::create(grid, mmax, cfg.n_workers);
    sht::Profiler prof;
    const auto map = sht::distributed_synthesis(alm, grid, layout, run_options(cfg, &prof));
    if (!cfg.out.empty()) sht::write_map(cfg.out, map);

    const auto report = sht::build_report(grid.n_rings(), cfg.lmax, mmax, cfg.n_workers, &prof);
    if (!cfg.csv.empty()) {
        std::ofstream os(cfg.csv, std::ios::trunc);
        if (!os) throw std::runtime_error("bench: cannot open " + cfg.csv);
        report.write_csv(os);
    } else {
        report.write_csv(std::cout);
    }
    std::cout.precision(6);
    std::cout << "recurrence_steps " << prof.total_steps() << "\n"
              << "recurrence_s " << prof.recurrence_s << "\n"
              << "fft_s " << prof.fft_s << "\n";
}

void cmd_model(const std::vector<int>& nsides, const std::vector<int>& workers,
               const std::string& csv) {
    std::vector<int> ns = nsides.empty() ? std::vector<int>{256, 512, 1024} : nsides;
    std::vector<int> ws = workers.empty() ? std::vector<int>{1, 2, 4, 8, 16} : workers;
    if (!csv.empty()) {
        std::ofstream os(csv, std::ios::trunc);
        if (!os) throw std::runtime_error("model: cannot open " + csv);
        sht::runtime_curves(os, ns, ws);
    } else {
        sht::runtime_curves(std::cout, ns, ws);
    }
}

void cmd_partition(const ExperimentConfig& cfg) {
    const auto grid = make_grid(cfg);
    const int mmax = resolved_mmax(cfg);
    const auto layout = sht::WorkerLayout::create(grid, mmax, cfg.n_workers);
    const auto steps_of = [&](const std::vector<int>& ms) {
        std::uint64_t s = 0;
        for (int m : ms) s += static_cast<std::uint64_t>(cfg.lmax - m + 1);
        return s * static_cast<std::uint64_t>(grid.n_rings());
    };
    for (int w = 0; w < layout.n_workers; ++w) {
        std::cout << "worker " << w << " m { " << set_to_string(layout.m_sets[w]) << " }\n";
        std::cout << "worker " << w << " rings { " << set_to_string(layout.ring_sets[w])
                  << " }\n";
        std::cout << "worker " << w << " steps " << steps_of(layout.m_sets[w]) << "\n";
        const auto tp = sht::thread_partition(layout.m_sets[w], cfg.n_threads);
        for (int t = 0; t < cfg.n_threads; ++t)
            std::cout << "worker " << w << " thread " << t << " m { "
                      << set_to_string(tp[t]) << " } steps " << steps_of(tp[t]) << "\n";
    }
}

void cmd_render(const ExperimentConfig& cfg, const std::string& map_in, int width,
                int height) {
    const auto map = sht::read_map(map_in);
    const auto gray = sht::project_map(map, width, height);
    if (cfg.out.empty()) throw std::runtime_error("render: --out is required");
    sht::write_pgm(cfg.out, gray, width, height);
    std::cout << "wrote " << cfg.out << " (" << width << "x" << height << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spherical harmonic transforms on iso-latitude ring grids"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string input_path;
    std::vector<int> model_nsides, model_workers;
    int width = 512, height = 256;

    auto* grid_cmd = app.add_subcommand("grid", "Grid inspection");
    grid_cmd->require_subcommand(1);
    auto* info_cmd = grid_cmd->add_subcommand("info", "Print grid parameters");
    add_grid_flags(info_cmd, cfg);
    add_band_flags(info_cmd, cfg);

    auto* synth_cmd = app.add_subcommand("synth", "Synthesize a map from coefficients");
    add_grid_flags(synth_cmd, cfg);
    add_band_flags(synth_cmd, cfg);
    add_run_flags(synth_cmd, cfg);
    synth_cmd->add_option("input", input_path, "Coefficient file (omit for seeded random)");
    synth_cmd->add_option("--seed", cfg.seed, "Random coefficient seed")->capture_default_str();
    synth_cmd->add_option("--out", cfg.out, "Output map file")->required();

    auto* analyze_cmd = app.add_subcommand("analyze", "Analyze a map into coefficients");
    add_band_flags(analyze_cmd, cfg);
    add_run_flags(analyze_cmd, cfg);
    analyze_cmd->add_option("input", input_path, "Input map file")->required();
    analyze_cmd->add_option("--out", cfg.out, "Output coefficient file")->required();

    auto* rt_cmd = app.add_subcommand("roundtrip", "Synthesize then analyze; print D_err");
    add_grid_flags(rt_cmd, cfg);
    add_band_flags(rt_cmd, cfg);
    add_run_flags(rt_cmd, cfg);
    rt_cmd->add_option("--seed", cfg.seed, "Random coefficient seed")->capture_default_str();
    rt_cmd->add_option("--out", cfg.out, "Optional output coefficient file");

    auto* bench_cmd = app.add_subcommand("bench", "Profiled synthesis with a cost report");
    add_grid_flags(bench_cmd, cfg);
    add_band_flags(bench_cmd, cfg);
    add_run_flags(bench_cmd, cfg);
    bench_cmd->add_option("--seed", cfg.seed, "Random coefficient seed")->capture_default_str();
    bench_cmd->add_option("--out", cfg.out, "Optional output map file");
    bench_cmd->add_option("--csv", cfg.csv, "Cost report CSV path (default stdout)");

    auto* model_cmd = app.add_subcommand("model", "Predicted runtime curves");
    model_cmd->add_option("--nside", model_nsides, "Resolution sweep (repeatable)");
    model_cmd->add_option("--workers", model_workers, "Worker sweep (repeatable)");
    model_cmd->add_option("--csv", cfg.csv, "Output CSV path (default stdout)");

    auto* part_cmd = app.add_subcommand("partition", "Show the worker/thread decomposition");
    add_grid_flags(part_cmd, cfg);
    add_band_flags(part_cmd, cfg);
    add_run_flags(part_cmd, cfg);

    auto* render_cmd = app.add_subcommand("render", "Project a map to a PGM image");
    render_cmd->add_option("input", input_path, "Input map file")->required();
    render_cmd->add_option("--out", cfg.out, "Output PGM path")->required();
    render_cmd->add_option("--width", width, "Image width")->capture_default_str();
    render_cmd->add_option("--height", height, "Image height")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (info_cmd->parsed()) cmd_grid_info(cfg);
        else if (synth_cmd->parsed()) cmd_synth(cfg, input_path);
        else if (analyze_cmd->parsed()) cmd_analyze(cfg, input_path);
        else if (rt_cmd->parsed()) cmd_roundtrip(cfg);
        else if (bench_cmd->parsed()) cmd_bench(cfg);
        else if (model_cmd->parsed()) cmd_model(model_nsides, model_workers, cfg.csv);
        else if (part_cmd->parsed()) cmd_partition(cfg);
        else if (render_cmd->parsed()) cmd_render(cfg, input_path, width, height);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
