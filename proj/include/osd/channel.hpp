#pragma once

// BPSK over AWGN: modulation, noise sampling, and per-bit reliability
// extraction. Every frame owns a private random stream derived from
// (master_seed, frame_index) so campaigns are reproducible under any
// worker count.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "osd/gf2.hpp"
#include "osd/qfunc.hpp"

namespace osd {

/// Single-sided noise spectral density N0; noise variance is N0/2 and
/// SNR = 2/N0.
struct NoiseModel {
    double n0 = 1.0;

    static NoiseModel from_snr_db(double snr_db) {
        return NoiseModel{2.0 / std::pow(10.0, snr_db / 10.0)};
    }
    double snr_db() const { return 10.0 * std::log10(2.0 / n0); }
    double sigma() const { return std::sqrt(n0 / 2.0); }

    void validate() const {
        if (!(n0 > 0.0)) throw std::invalid_argument("NoiseModel: n0 must be positive");
    }
};

/// One received frame: channel outputs r, reliabilities alpha = |r|, and
/// hard decisions y (y_i = 1 iff r_i < 0; a tie r_i == 0 decodes to 0).
struct SoftWord {
    std::vector<double> r;
    std::vector<double> alpha;
    BitVec y;
};

/// s_i = +1 for bit 0, -1 for bit 1.
inline std::vector<double> modulate(const BitVec& c) {
    std::vector<double> s(c.size(), 1.0);
    c.for_each_set([&](std::size_t i) { s[i] = -1.0; });
    return s;
}

/// Builds a SoftWord from exact channel outputs (also the zero-noise hook).
inline SoftWord soft_word_from_output(std::vector<double> r) {
    SoftWord sw;
    sw.alpha.resize(r.size());
    sw.y = BitVec(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        sw.alpha[i] = std::fabs(r[i]);
        if (r[i] < 0.0) sw.y.set(i, true);
    }
    sw.r = std::move(r);
    return sw;
}

/// splitmix64-style mix of (master seed, frame index) into a stream seed.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t frame) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (frame + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_frame_rng(std::uint64_t master_seed, std::uint64_t frame_index) {
    return std::mt19937_64(mix_seed(master_seed, frame_index));
}

/// r = s + w with w i.i.d. zero-mean Gaussian of variance n0/2.
inline SoftWord transmit(std::span<const double> s, const NoiseModel& noise, std::mt19937_64& rng) {
    noise.validate();
    std::normal_distribution<double> gauss(0.0, noise.sigma());
    std::vector<double> r(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) r[i] = s[i] + gauss(rng);
    return soft_word_from_output(std::move(r));
}

/// Uniform random information word of k bits.
inline BitVec random_info_word(std::size_t k, std::mt19937_64& rng) {
    BitVec v(k);
    for (std::size_t base = 0; base < k; base += 64) {
        const std::uint64_t w = rng();
        const std::size_t hi = std::min<std::size_t>(64, k - base);
        for (std::size_t j = 0; j < hi; ++j)
            if ((w >> j) & 1) v.set(base + j, true);
    }
    return v;
}

/// Raw hard-decision bit error probability p' = Q(sqrt(2/N0)).
inline double bitwise_error_prob_raw(const NoiseModel& noise) {
    noise.validate();
    return q_function(std::sqrt(2.0 / noise.n0));
}

}  // namespace osd
