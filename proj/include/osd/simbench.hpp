#pragma once

// Monte-Carlo campaign engine: sweeps an SNR grid, runs frames until an
// error quota (or a frame cap) is met, and aggregates BLER, TEP counts,
// GE-skip rates and timing. Frames are dispatched to workers by index and
// every frame derives its own random stream, so results are bit-identical
// for any worker count.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "osd/channel.hpp"
#include "osd/codes.hpp"
#include "osd/decoder.hpp"
#include "osd/reliability.hpp"

namespace osd {

enum class DecoderKind { original_osd, standard_osd, adaptive, ml_oracle };

inline const char* to_string(DecoderKind k) {
    switch (k) {
        case DecoderKind::original_osd: return "original-osd";
        case DecoderKind::standard_osd: return "standard-osd";
        case DecoderKind::adaptive: return "adaptive";
        case DecoderKind::ml_oracle: return "ml-oracle";
    }
    return "?";
}

inline DecoderKind decoder_kind_from_string(const std::string& s) {
    if (s == "original-osd") return DecoderKind::original_osd;
    if (s == "standard-osd") return DecoderKind::standard_osd;
    if (s == "adaptive") return DecoderKind::adaptive;
    if (s == "ml-oracle") return DecoderKind::ml_oracle;
    throw std::invalid_argument("unknown decoder kind '" + s + "'");
}

enum class OutputFormat { csv, json };

inline OutputFormat output_format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown output format '" + s + "'");
}

struct CampaignConfig {
    CodeSpec code;
    DecoderKind decoder = DecoderKind::adaptive;
    unsigned order = 0;
    double lambda = 0.05;
    double tau = 0.95;
    std::vector<double> snr_grid_db;
    std::uint64_t target_errors = 500;
    std::uint64_t max_frames = 20'000'000;
    std::uint64_t master_seed = 1;
    unsigned workers = 1;
    std::string output_path;  // empty: nothing written by run_campaign
    OutputFormat format = OutputFormat::csv;

    void validate() const {
        if (code.n == 0 || code.k == 0 || code.k > code.n)
            throw std::invalid_argument("campaign: invalid code dimensions");
        if (code.generator.rows() != code.k || code.generator.cols() != code.n)
            throw std::invalid_argument("campaign: generator dimensions do not match code");
        if (!code.generator.left_block_is_identity())
            throw std::invalid_argument("campaign: generator is not systematic");
        if (order > code.k) throw std::invalid_argument("campaign: order exceeds k");
        if (target_errors < 1) throw std::invalid_argument("campaign: target_errors must be >= 1");
        if (max_frames < target_errors)
            throw std::invalid_argument("campaign: max_frames must be >= target_errors");
        if (workers < 1) throw std::invalid_argument("campaign: workers must be >= 1");
        if (decoder == DecoderKind::ml_oracle && code.k > 24)
            throw std::invalid_argument("campaign: ml-oracle requires k <= 24");
        if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("campaign: lambda not in (0,1]");
        if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("campaign: tau not in [0,1]");
    }
};

struct SnrPointResult {
    double snr_db = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t block_errors = 0;
    double bler = 0.0;
    double avg_teps = 0.0;
    double ge_skip_rate = 0.0;      // fraction of frames decoded without GE
    double condition1_rate = 0.0;
    double condition2_rate = 0.0;
    double avg_decode_time_ns = 0.0;
    bool censored = false;  // frame cap hit before the error quota
};

/// Per-point decoder parameters. The original-OSD kind is the standard
/// engine with discarding and early termination switched off.
inline ConditionParams campaign_params(const CampaignConfig& cfg, const NoiseModel& noise) {
    ConditionParams p = make_condition_params(cfg.order, cfg.lambda, cfg.tau, noise, cfg.code.k);
    if (cfg.decoder == DecoderKind::original_osd) {
        p.tau_p = 0.0;
        p.tau = 1.0;
    }
    return p;
}

namespace detail {

struct FrameRecord {
    std::uint64_t teps = 0;
    std::uint64_t time_ns = 0;
    bool error = false;
    bool ge_skipped = false;
    bool cond1 = false;
    bool cond2 = false;
};

}  // namespace detail

inline SnrPointResult run_point(const CampaignConfig& cfg, double snr_db) {
    cfg.validate();
    const NoiseModel noise = NoiseModel::from_snr_db(snr_db);
    const ConditionParams params = campaign_params(cfg, noise);
    const CodeSpec& code = cfg.code;

    auto decode_frame = [&](std::uint64_t frame_index) {
        auto rng = make_frame_rng(cfg.master_seed, frame_index);
        const BitVec info = random_info_word(code.k, rng);
        const BitVec sent = mat_vec_mul(code.generator, info);
        const SoftWord swd = transmit(modulate(sent), noise, rng);

        DecodeOutcome out;
        switch (cfg.decoder) {
            case DecoderKind::adaptive:
                out = adaptive_decode(swd, code, noise, params);
                break;
            case DecoderKind::standard_osd:
            case DecoderKind::original_osd:
                out = standard_osd(swd, code, noise, params);
                break;
            case DecoderKind::ml_oracle: {
                const auto t0 = std::chrono::steady_clock::now();
                out.codeword = ml_oracle(swd, code);
                out.elapsed_ns = detail::elapsed_ns_since(t0);
                break;
            }
        }
        detail::FrameRecord rec;
        rec.teps = out.teps_reencoded;
        rec.time_ns = out.elapsed_ns;
        rec.error = !(out.codeword == sent);
        rec.ge_skipped = !out.ge_performed && cfg.decoder != DecoderKind::ml_oracle;
        rec.cond1 = out.condition1_fired;
        rec.cond2 = out.condition2_fired;
        return rec;
    };

    std::uint64_t frames = 0, errors = 0, teps_sum = 0, time_sum = 0;
    std::uint64_t ge_skips = 0, cond1_count = 0, cond2_count = 0;
    bool quota_met = false;

    const std::uint64_t batch_size = 256ull * std::max(1u, cfg.workers);
    std::vector<detail::FrameRecord> records;
    std::uint64_t next_frame = 0;
    while (!quota_met && next_frame < cfg.max_frames) {
        const std::uint64_t count = std::min(batch_size, cfg.max_frames - next_frame);
        records.resize(count);
        if (cfg.workers <= 1) {
            for (std::uint64_t i = 0; i < count; ++i) records[i] = decode_frame(next_frame + i);
        } else {
            std::atomic<std::uint64_t> cursor{0};
            std::vector<std::thread> pool;
            pool.reserve(cfg.workers);
            for (unsigned w = 0; w < cfg.workers; ++w) {
                pool.emplace_back([&] {
                    for (std::uint64_t i = cursor.fetch_add(1); i < count; i = cursor.fetch_add(1))
                        records[i] = decode_frame(next_frame + i);
                });
            }
            for (auto& t : pool) t.join();
        }
        // Aggregate strictly in frame order so the stopping point (and every
        // statistic) is independent of scheduling.
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto& r = records[i];
            ++frames;
            teps_sum += r.teps;
            time_sum += r.time_ns;
            ge_skips += r.ge_skipped;
            cond1_count += r.cond1;
            cond2_count += r.cond2;
            if (r.error && ++errors == cfg.target_errors) {
                quota_met = true;
                break;
            }
        }
        next_frame += count;
    }

    SnrPointResult res;
    res.snr_db = snr_db;
    res.frames = frames;
    res.block_errors = errors;
    res.bler = double(errors) / double(frames);
    res.avg_teps = double(teps_sum) / double(frames);
    res.ge_skip_rate = double(ge_skips) / double(frames);
    res.condition1_rate = double(cond1_count) / double(frames);
    res.condition2_rate = double(cond2_count) / double(frames);
    res.avg_decode_time_ns = double(time_sum) / double(frames);
    res.censored = errors < cfg.target_errors;
    return res;
}

namespace detail {

inline std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_csv(std::span<const SnrPointResult> results, std::ostream& out) {
    out << "snr_db,frames,block_errors,bler,avg_teps,ge_skip_rate,condition1_rate,"
           "condition2_rate,avg_decode_time_ns,censored\n";
    for (const auto& r : results) {
        out << detail::fmt_g17(r.snr_db) << ',' << r.frames << ',' << r.block_errors << ','
            << detail::fmt_g17(r.bler) << ',' << detail::fmt_g17(r.avg_teps) << ','
            << detail::fmt_g17(r.ge_skip_rate) << ',' << detail::fmt_g17(r.condition1_rate) << ','
            << detail::fmt_g17(r.condition2_rate) << ',' << detail::fmt_g17(r.avg_decode_time_ns)
            << ',' << (r.censored ? 1 : 0) << '\n';
    }
}

inline nlohmann::json to_json(const SnrPointResult& r) {
    return nlohmann::json{{"snr_db", r.snr_db},
                          {"frames", r.frames},
                          {"block_errors", r.block_errors},
                          {"bler", r.bler},
                          {"avg_teps", r.avg_teps},
                          {"ge_skip_rate", r.ge_skip_rate},
                          {"condition1_rate", r.condition1_rate},
                          {"condition2_rate", r.condition2_rate},
                          {"avg_decode_time_ns", r.avg_decode_time_ns},
                          {"censored", r.censored}};
}

inline void write_json(std::span<const SnrPointResult> results, std::ostream& out) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results) arr.push_back(to_json(r));
    out << arr.dump(2) << '\n';
}

inline void write_results(std::span<const SnrPointResult> results, OutputFormat format,
                          std::ostream& out) {
    if (format == OutputFormat::csv) {
        write_csv(results, out);
    } else {
        write_json(results, out);
    }
}

inline void emit_results(std::span<const SnrPointResult> results, OutputFormat format,
                         const std::string& path) {
    if (results.empty()) throw std::invalid_argument("emit_results: no results");
    std::ofstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    write_results(results, format, f);
    f.flush();
    if (!f.good()) throw std::runtime_error(path + ": write failed");
}

inline std::vector<SnrPointResult> run_campaign(const CampaignConfig& cfg,
                                                std::ostream* progress = nullptr) {
    cfg.validate();
    if (cfg.snr_grid_db.empty()) throw std::invalid_argument("campaign: empty SNR grid");
    std::vector<SnrPointResult> results;
    results.reserve(cfg.snr_grid_db.size());
    for (double snr : cfg.snr_grid_db) {
        SnrPointResult r = run_point(cfg, snr);
        if (progress) {
            char line[256];
            std::snprintf(line, sizeof line,
                          "snr=%.2f dB  frames=%llu  errors=%llu  bler=%.4e  avg_teps=%.4f  "
                          "ge_skip=%.4f%s",
                          r.snr_db, static_cast<unsigned long long>(r.frames),
                          static_cast<unsigned long long>(r.block_errors), r.bler, r.avg_teps,
                          r.ge_skip_rate, r.censored ? "  [censored]" : "");
            *progress << line << std::endl;
        }
        results.push_back(r);
    }
    if (!cfg.output_path.empty()) emit_results(results, cfg.format, cfg.output_path);
    return results;
}

}  // namespace osd
