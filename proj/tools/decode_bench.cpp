// Monte-Carlo benchmark CLI: sweeps SNR points for one decoder
// configuration and emits per-point statistics as CSV or JSON.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "osd/osd.hpp"

namespace {

// Accepts "start:step:stop", a comma-separated list, or a single value.
std::vector<double> parse_snr_grid(const std::string& spec) {
    std::vector<double> grid;
    if (spec.find(':') != std::string::npos) {
        double start = 0, step = 0, stop = 0;
        if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &step, &stop) != 3 || step <= 0.0)
            throw std::invalid_argument("bad --snr range '" + spec + "', expected start:step:stop");
        for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
        return grid;
    }
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t comma = spec.find(',', pos);
        const std::string item = spec.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            grid.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad --snr value '" + item + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decode-bench: soft-decision OSD benchmark for short binary linear block codes"};

    std::string code_name, code_file;
    std::string decoder = "adaptive";
    std::string snr_spec;
    std::string out_path;
    std::string format = "csv";
    int order = -1;
    double lambda = 0.05, tau = 0.95;
    std::uint64_t target_errors = 500, max_frames = 20'000'000, seed = 42;
    unsigned workers = 1;

    auto* code_opt = app.add_option("--code", code_name, "Built-in code name, e.g. ebch-64-36");
    auto* file_opt =
        app.add_option("--code-file", code_file, "Generator matrix file (header \"n k\", then k rows of 0/1)");
    code_opt->excludes(file_opt);
    app.add_option("--decoder", decoder, "original-osd | standard-osd | adaptive | ml-oracle")
        ->capture_default_str();
    app.add_option("--order", order, "Reprocessing order m (default: ceil(d_H/4 - 1))");
    app.add_option("--lambda", lambda, "Condition-1 relaxation in (0,1]")->capture_default_str();
    app.add_option("--tau", tau, "Condition-2 acceptance threshold in [0,1]")->capture_default_str();
    app.add_option("--snr", snr_spec, "SNR grid in dB: start:step:stop, comma list, or one value")
        ->required();
    app.add_option("--target-errors", target_errors, "Stop a point after this many block errors")
        ->capture_default_str();
    app.add_option("--max-frames", max_frames, "Frame cap per point")->capture_default_str();
    app.add_option("--seed", seed, "Master seed; frames derive private streams from it")
        ->capture_default_str();
    app.add_option("--workers", workers, "Worker threads (frame-parallel)")
        ->envname("DECODE_BENCH_WORKERS")
        ->capture_default_str();
    app.add_option("--out", out_path, "Output path (default: stdout)");
    app.add_option("--format", format, "csv | json")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (code_name.empty() == code_file.empty())
            throw std::invalid_argument("exactly one of --code or --code-file is required");

        osd::CampaignConfig cfg;
        cfg.code = code_file.empty() ? osd::builtin_code(code_name) : osd::load_generator(code_file);
        cfg.decoder = osd::decoder_kind_from_string(decoder);
        cfg.order = order >= 0 ? static_cast<unsigned>(order) : osd::default_order(cfg.code);
        cfg.lambda = lambda;
        cfg.tau = tau;
        cfg.snr_grid_db = parse_snr_grid(snr_spec);
        cfg.target_errors = target_errors;
        cfg.max_frames = max_frames;
        cfg.master_seed = seed;
        cfg.workers = workers;
        cfg.output_path = out_path;
        cfg.format = osd::output_format_from_string(format);

        std::cerr << "code " << cfg.code.name << " (" << cfg.code.n << "," << cfg.code.k
                  << "), decoder " << decoder << ", order " << cfg.order << ", seed "
                  << cfg.master_seed << ", workers " << cfg.workers << std::endl;
        const auto results = osd::run_campaign(cfg, &std::cerr);
        if (out_path.empty()) osd::write_results(results, cfg.format, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
