#pragma once

// Reprocessing engines: TEP enumeration in the fixed reprocessing order,
// re-encoding and weighted-Hamming-distance tracking, the standard
// (probability-assisted) OSD, the non-GE OSD, the adaptive controller that
// decides per frame whether Gaussian elimination can be skipped, and a
// brute-force ML oracle for ground truth at small k.

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "osd/channel.hpp"
#include "osd/codes.hpp"
#include "osd/gf2.hpp"
#include "osd/reliability.hpp"

namespace osd {

/// A test error pattern: strictly increasing flip positions within the
/// basis, Hamming weight bounded by the decoding order.
struct Tep {
    std::vector<std::uint32_t> positions;
    unsigned weight() const { return static_cast<unsigned>(positions.size()); }
};

/// Streams the weight-w patterns over k basis positions in reprocessing
/// order: within a weight class, patterns flipping the higher-index (less
/// reliable) positions come first. Internally walks lexicographically
/// ascending combinations and emits their index reflection.
class TepClassRange {
public:
    TepClassRange(std::size_t k, unsigned w) : k_(static_cast<std::uint32_t>(k)), w_(w) {
        if (w > k) throw std::invalid_argument("TepClassRange: weight exceeds k");
        comb_.resize(w);
        for (unsigned i = 0; i < w; ++i) comb_[i] = i;
    }

    /// Fills `out` (resized to w, sorted ascending); false once exhausted.
    bool next(std::vector<std::uint32_t>& out) {
        if (done_) return false;
        out.resize(w_);
        for (unsigned j = 0; j < w_; ++j) out[j] = k_ - 1 - comb_[w_ - 1 - j];
        advance();
        return true;
    }

private:
    void advance() {
        if (w_ == 0) {
            done_ = true;
            return;
        }
        unsigned i = w_;
        while (i-- > 0) {
            if (comb_[i] + (w_ - i) < k_) {
                ++comb_[i];
                for (unsigned j = i + 1; j < w_; ++j) comb_[j] = comb_[j - 1] + 1;
                return;
            }
        }
        done_ = true;
    }

    std::uint32_t k_;
    unsigned w_;
    bool done_ = false;
    std::vector<std::uint32_t> comb_;
};

/// Visits every TEP of weight 0..max_weight in non-decreasing weight order.
template <class F>
void enumerate_teps(std::size_t k, unsigned max_weight, F&& visit) {
    if (max_weight > k) throw std::invalid_argument("enumerate_teps: max_weight > k");
    std::vector<std::uint32_t> tep;
    for (unsigned w = 0; w <= max_weight; ++w) {
        TepClassRange cls(k, w);
        while (cls.next(tep)) visit(std::span<const std::uint32_t>(tep));
    }
}

/// Preprocessing product: permutations, systematic matrix, and the ordered
/// receive-side vectors. to_natural maps ordered positions back to natural
/// ones (the composition pi1 . pi2 read as an index map).
struct OrderedContext {
    Permutation pi1;
    Permutation pi2;
    BitMatrix g_sys;
    BitVec y_ord;
    std::vector<double> alpha_ord;
    BitVec mrb;
    std::vector<std::uint32_t> to_natural;
};

/// Sorts reliabilities descending (stable, lower original index wins ties),
/// permutes the generator columns and reduces to systematic form.
inline OrderedContext preprocess(const SoftWord& sw, const BitMatrix& g) {
    const std::size_t n = g.cols(), k = g.rows();
    if (sw.alpha.size() != n) throw std::invalid_argument("preprocess: frame length != code length");

    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return sw.alpha[a] > sw.alpha[b]; });
    Permutation pi1(std::move(idx));

    auto sys = systematic_ge(pi1.apply_columns(g));  // may throw RankDeficientError
    const Permutation combined = Permutation::compose(sys.pi2, pi1);

    OrderedContext ctx;
    ctx.y_ord = combined.apply(sw.y);
    ctx.alpha_ord = combined.apply(sw.alpha);
    ctx.to_natural.assign(combined.map().begin(), combined.map().end());
    ctx.pi1 = std::move(pi1);
    ctx.pi2 = std::move(sys.pi2);
    ctx.g_sys = std::move(sys.g_sys);
    ctx.mrb = BitVec(k);
    for (std::size_t i = 0; i < k; ++i)
        if (ctx.y_ord.get(i)) ctx.mrb.set(i, true);
    return ctx;
}

/// Codeword estimate (basis xor tep) * g.
inline BitVec reencode(const BitMatrix& g, const BitVec& basis, std::span<const std::uint32_t> tep) {
    BitVec c = mat_vec_mul(g, basis);
    for (auto p : tep) c ^= g.row(p);
    return c;
}

/// Weighted Hamming distance: sum of alpha over positions where c and y
/// disagree, accumulated in ascending index order.
inline double whd(const BitVec& c, const BitVec& y, std::span<const double> alpha) {
    if (c.size() != y.size() || alpha.size() != c.size())
        throw std::invalid_argument("whd: length mismatch");
    double s = 0.0;
    const auto cw = c.words(), yw = y.words();
    for (std::size_t i = 0; i < cw.size(); ++i) {
        std::uint64_t m = cw[i] ^ yw[i];
        while (m) {
            s += alpha[i * 64 + std::countr_zero(m)];
            m &= m - 1;
        }
    }
    return s;
}

namespace detail {

/// whd with an early exit: returns a value > limit as soon as the partial
/// sum strictly exceeds limit. Exact when the result is <= limit.
inline double whd_bounded(const BitVec& c, const BitVec& y, std::span<const double> alpha, double limit) {
    double s = 0.0;
    const auto cw = c.words(), yw = y.words();
    for (std::size_t i = 0; i < cw.size(); ++i) {
        std::uint64_t m = cw[i] ^ yw[i];
        while (m) {
            s += alpha[i * 64 + std::countr_zero(m)];
            if (s > limit) return s;
            m &= m - 1;
        }
    }
    return s;
}

inline bool lex_less(const BitVec& a, const BitVec& b) {
    const auto aw = a.words(), bw = b.words();
    for (std::size_t i = 0; i < aw.size(); ++i) {
        const std::uint64_t d = aw[i] ^ bw[i];
        if (d) return !((aw[i] >> std::countr_zero(d)) & 1);  // 0 at first differing index wins
    }
    return false;
}

}  // namespace detail

/// Per-decode instrumentation; the recorded incumbent WHD sequence is
/// strictly decreasing.
struct DecodeTrace {
    std::vector<double> incumbent_whds;
};

struct WarmStart {
    BitVec codeword;  // natural order
    double whd;
};

struct DecodeOutcome {
    BitVec codeword;  // natural order
    double whd = 0.0;
    std::uint64_t teps_reencoded = 0;
    std::uint64_t teps_discarded = 0;
    bool ge_performed = false;
    bool condition1_fired = false;
    bool condition2_fired = false;
    bool fallback_to_standard = false;
    std::uint64_t elapsed_ns = 0;
};

namespace detail {

inline std::uint64_t elapsed_ns_since(std::chrono::steady_clock::time_point t0) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
            .count());
}

/// Parity-side view of a systematic reprocessing problem. Because the left
/// block of the generator is the identity, a candidate's basis mismatch
/// against y equals the TEP itself, so only the n-k parity bits need to be
/// re-encoded and scanned per TEP.
struct ParityReencoder {
    std::size_t k = 0, n = 0, pw = 0;       // pw = parity words
    std::vector<std::uint64_t> rows;         // k rows of pw words
    std::vector<std::uint64_t> base_parity;  // parity of the zero-TEP candidate
    std::vector<std::uint64_t> y_parity;
    std::vector<std::uint64_t> scratch;
    const double* alpha_parity = nullptr;

    void init(const BitMatrix& g, const BitVec& basis, const BitVec& y,
              std::span<const double> alpha) {
        k = g.rows();
        n = g.cols();
        pw = (n - k + 63) / 64;
        rows.assign(k * pw, 0);
        for (std::size_t i = 0; i < k; ++i) extract(g.row(i), &rows[i * pw]);
        base_parity.assign(pw, 0);
        extract(mat_vec_mul(g, basis), base_parity.data());
        y_parity.assign(pw, 0);
        extract(y, y_parity.data());
        scratch.assign(pw, 0);
        alpha_parity = alpha.data() + k;
    }

    void extract(const BitVec& v, std::uint64_t* dst) const {
        for (std::size_t j = 0; j < n - k; ++j)
            if (v.get(k + j)) dst[j >> 6] |= std::uint64_t{1} << (j & 63);
    }

    /// WHD of the TEP's candidate: flip_sum plus the parity-side mismatch
    /// weight, abandoning the scan once the sum exceeds `limit`. Callers
    /// may only read scratch (via assemble) when the result is <= limit.
    double candidate_whd(std::span<const std::uint32_t> tep, double flip_sum, double limit) {
        if (flip_sum > limit) return flip_sum;
        for (std::size_t wi = 0; wi < pw; ++wi) scratch[wi] = base_parity[wi];
        for (auto p : tep)
            for (std::size_t wi = 0; wi < pw; ++wi) scratch[wi] ^= rows[p * pw + wi];
        double d = flip_sum;
        for (std::size_t wi = 0; wi < pw; ++wi) {
            std::uint64_t m = scratch[wi] ^ y_parity[wi];
            while (m) {
                d += alpha_parity[wi * 64 + std::countr_zero(m)];
                if (d > limit) return d;
                m &= m - 1;
            }
        }
        return d;
    }

    /// Rebuilds the full candidate for the incumbent: y's basis bits with
    /// the TEP flipped, plus the parity bits left in scratch.
    BitVec assemble(const BitVec& y, std::span<const std::uint32_t> tep) const {
        BitVec c(n);
        for (std::size_t i = 0; i < k; ++i)
            if (y.get(i)) c.set(i, true);
        for (auto p : tep) c.flip(p);
        for (std::size_t j = 0; j < n - k; ++j)
            if ((scratch[j >> 6] >> (j & 63)) & 1) c.set(k + j, true);
        return c;
    }
};

}  // namespace detail

/// Order-m OSD over the ordered context. Each TEP's promise probability --
/// its success probability P(e) conditioned on every previously re-encoded
/// TEP having failed, P(e) / max(1 - sum of their P, p') -- is checked
/// first, and TEPs at or below tau_p are skipped without re-encoding; the
/// residual mass is floored at the raw error rate p' since it is built
/// from the same on-the-fly estimates it conditions. A new incumbent whose
/// correctness probability reaches tau ends the decode. tau_p = 0 disables
/// discarding and tau = 1 disables early termination, which is exactly the
/// original-OSD configuration.
inline DecodeOutcome standard_osd(const SoftWord& sw, const CodeSpec& spec, const NoiseModel& noise,
                                  const ConditionParams& params,
                                  const std::optional<WarmStart>& warm = std::nullopt,
                                  DecodeTrace* trace = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = spec.n, k = spec.k;
    const double n0 = noise.n0;
    OrderedContext ctx = preprocess(sw, spec.generator);

    double log1m_k = 0.0, log1m_all = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double l = log1m_bit_error(ctx.alpha_ord[i], n0);
        log1m_all += l;
        if (i < k) log1m_k += l;
    }

    detail::ParityReencoder renc;
    renc.init(ctx.g_sys, ctx.mrb, ctx.y_ord, ctx.alpha_ord);

    double best = warm ? warm->whd : std::numeric_limits<double>::infinity();
    std::optional<BitVec> best_ord;

    // This pass reprocesses at order m, so its discard threshold is scaled
    // by the order-m budget (params.tau_p carries the order-m' threshold
    // used by the non-GE loop). params.tau_p == 0 still disables discarding.
    const bool discard_on = params.tau_p > 0.0;
    const double tau_p = discard_on ? discard_threshold(n0, k, params.order_m) : 0.0;
    const double log_tau_p = discard_on ? std::log(tau_p) : kNegInf;
    const bool accept_on = params.tau < 1.0;
    const double inv_scale = 4.0 / n0;

    DecodeOutcome out;
    bool stop = false;
    const double residual_floor = bitwise_error_prob_raw(noise);
    double tep_mass = 0.0;             // sum of P(e) over re-encoded TEPs
    double log_thresh = log_tau_p;     // log(tau_p * max(1 - tep_mass, p'))
    double best_log_pe = 0.0;
    std::vector<char> single_done(k, 0);
    std::vector<std::uint32_t> tep, single(1);

    auto track = [&](double log_pe) {
        if (discard_on) {
            tep_mass += std::exp(log_pe);
            log_thresh = log_tau_p + std::log(std::max(1.0 - tep_mass, residual_floor));
        }
    };
    // Exact guard before honoring an acceptance: any still-unscanned single
    // flip with alpha below the incumbent WHD could produce a strictly
    // better candidate (its WHD is at least that alpha), so re-encode those
    // first. Empty whenever the incumbent already beats every basis alpha.
    auto singles_below = [&](double& bound) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::uint32_t j = 0; j < k; ++j) {
                if (single_done[j] || !(ctx.alpha_ord[j] < bound)) continue;
                single_done[j] = 1;
                single[0] = j;
                ++out.teps_reencoded;
                const double lp = -inv_scale * ctx.alpha_ord[j] + log1m_k;
                track(lp);
                const double dj = renc.candidate_whd(single, ctx.alpha_ord[j], bound);
                if (dj < bound) {
                    bound = dj;
                    best_ord = renc.assemble(ctx.y_ord, single);
                    best_log_pe = lp;
                    if (trace) trace->incumbent_whds.push_back(dj);
                    improved = true;
                }
            }
        }
    };

    for (unsigned w = 0; w <= params.order_m && !stop; ++w) {
        TepClassRange cls(k, w);
        while (cls.next(tep)) {
            if (w == 1 && single_done[tep[0]]) continue;  // handled by the guard
            double flip_sum = 0.0;
            for (auto p : tep) flip_sum += ctx.alpha_ord[p];
            const double log_pe = -inv_scale * flip_sum + log1m_k;
            if (discard_on && log_pe <= log_thresh && (out.teps_reencoded > 0 || warm)) {
                ++out.teps_discarded;
                continue;
            }
            ++out.teps_reencoded;
            track(log_pe);
            if (w == 1) single_done[tep[0]] = 1;
            const double d = renc.candidate_whd(tep, flip_sum, best);
            if (d < best) {
                best = d;
                best_ord = renc.assemble(ctx.y_ord, tep);
                best_log_pe = log_pe;
                if (trace) trace->incumbent_whds.push_back(d);
                if (accept_on &&
                    codeword_success_prob(d, log_pe, log1m_all, n, k, n0) >= params.tau) {
                    if (params.tau > 0.0) singles_below(best);
                    if (codeword_success_prob(best, best_log_pe, log1m_all, n, k, n0) >=
                        params.tau) {
                        stop = true;
                        break;
                    }
                }
            }
        }
    }

    if (best_ord) {
        out.codeword = BitVec(n);
        best_ord->for_each_set([&](std::size_t i) { out.codeword.set(ctx.to_natural[i], true); });
        out.whd = best;
    } else {
        out.codeword = warm->codeword;
        out.whd = warm->whd;
    }
    out.ge_performed = true;
    out.elapsed_ns = detail::elapsed_ns_since(t0);
    return out;
}

struct NonGeOutcome {
    DecodeOutcome outcome;
    bool accepted = false;
};

namespace detail {

inline NonGeOutcome non_ge_run(const SoftWord& sw, const CodeSpec& spec, const NoiseModel& noise,
                               const ConditionParams& params, const BitErrorProfile& profile,
                               DecodeTrace* trace) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = spec.n, k = spec.k;
    const double n0 = noise.n0;

    BitVec y_basis(k);
    for (std::size_t i = 0; i < k; ++i)
        if (sw.y.get(i)) y_basis.set(i, true);
    detail::ParityReencoder renc;
    renc.init(spec.generator, y_basis, sw.y, sw.alpha);

    double best = std::numeric_limits<double>::infinity();
    NonGeOutcome res;
    DecodeOutcome& out = res.outcome;

    const bool discard_on = params.tau_p > 0.0;
    const double log_tau_p = discard_on ? std::log(params.tau_p) : kNegInf;
    const bool accept_on = params.tau < 1.0;
    const double inv_scale = 4.0 / n0;

    const double residual_floor = bitwise_error_prob_raw(noise);
    double tep_mass = 0.0;
    double log_thresh = log_tau_p;
    double best_log_pe = 0.0;
    std::vector<char> single_done(k, 0);
    std::vector<std::uint32_t> tep, single(1);

    auto track = [&](double log_pe) {
        if (discard_on) {
            tep_mass += std::exp(log_pe);
            log_thresh = log_tau_p + std::log(std::max(1.0 - tep_mass, residual_floor));
        }
    };
    auto singles_below = [&](double& bound) {  // same exact guard as the standard pass
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::uint32_t j = 0; j < k; ++j) {
                if (single_done[j] || !(sw.alpha[j] < bound)) continue;
                single_done[j] = 1;
                single[0] = j;
                ++out.teps_reencoded;
                const double lp = -inv_scale * sw.alpha[j] + profile.log1m_prod_k;
                track(lp);
                const double dj = renc.candidate_whd(single, sw.alpha[j], bound);
                if (dj < bound) {
                    bound = dj;
                    out.codeword = renc.assemble(sw.y, single);
                    out.whd = dj;
                    best_log_pe = lp;
                    if (trace) trace->incumbent_whds.push_back(dj);
                    improved = true;
                }
            }
        }
    };

    for (unsigned w = 0; w <= params.order_m_prime && !res.accepted; ++w) {
        TepClassRange cls(k, w);
        while (cls.next(tep)) {
            if (w == 1 && single_done[tep[0]]) continue;
            double flip_sum = 0.0;
            for (auto p : tep) flip_sum += sw.alpha[p];
            const double log_pe = -inv_scale * flip_sum + profile.log1m_prod_k;
            if (discard_on && log_pe <= log_thresh && out.teps_reencoded > 0) {
                ++out.teps_discarded;  // unpromising TEP, skipped without re-encoding
                continue;
            }
            ++out.teps_reencoded;
            track(log_pe);
            if (w == 1) single_done[tep[0]] = 1;
            const double d = renc.candidate_whd(tep, flip_sum, best);
            if (d < best) {
                best = d;
                out.codeword = renc.assemble(sw.y, tep);
                out.whd = d;
                best_log_pe = log_pe;
                if (trace) trace->incumbent_whds.push_back(d);
                if (accept_on &&
                    codeword_success_prob(d, log_pe, profile.log1m_prod_all, n, k, n0) >= params.tau) {
                    if (params.tau > 0.0) singles_below(best);
                    if (codeword_success_prob(best, best_log_pe, profile.log1m_prod_all, n, k, n0) >=
                        params.tau) {
                        res.accepted = true;  // Condition 2: claim the result, stop decoding
                        break;
                    }
                }
            }
        }
    }

    out.ge_performed = false;
    out.condition2_fired = res.accepted;
    out.elapsed_ns = detail::elapsed_ns_since(t0);
    return res;
}

}  // namespace detail

/// Reprocessing at order m' = m-1 directly over the natural-order hard
/// decision with the original systematic generator; no permutations and no
/// elimination. `accepted` reports whether Condition 2 claimed the result.
inline NonGeOutcome non_ge_osd(const SoftWord& sw, const CodeSpec& spec, const NoiseModel& noise,
                               const ConditionParams& params, DecodeTrace* trace = nullptr) {
    const BitErrorProfile profile = BitErrorProfile::build(sw, spec.k, noise.n0);
    return detail::non_ge_run(sw, spec, noise, params, profile, trace);
}

/// The adaptive decoder: evaluate Condition 1 from the on-the-fly error
/// profile (needs the reliability sort but no elimination); if it holds,
/// try the non-GE pass and return its result when Condition 2 accepts it;
/// otherwise fall back to the standard pass, warm-started with the non-GE
/// incumbent so the fallback can only improve on it.
inline DecodeOutcome adaptive_decode(const SoftWord& sw, const CodeSpec& spec, const NoiseModel& noise,
                                     const ConditionParams& params, DecodeTrace* trace = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    const BitErrorProfile profile = BitErrorProfile::build(sw, spec.k, noise.n0);

    DecodeOutcome out;
    if (condition1(profile, params, spec.k)) {
        NonGeOutcome nonge = detail::non_ge_run(sw, spec, noise, params, profile, trace);
        if (nonge.accepted) {
            out = std::move(nonge.outcome);
            out.condition1_fired = true;
        } else {
            out = standard_osd(sw, spec, noise, params,
                               WarmStart{nonge.outcome.codeword, nonge.outcome.whd}, trace);
            out.teps_reencoded += nonge.outcome.teps_reencoded;
            out.teps_discarded += nonge.outcome.teps_discarded;
            out.condition1_fired = true;
            out.fallback_to_standard = true;
        }
    } else {
        out = standard_osd(sw, spec, noise, params, std::nullopt, trace);
    }
    assert(out.teps_reencoded <=
           tep_budget(spec.k, params.order_m_prime) + tep_budget(spec.k, params.order_m));
    out.elapsed_ns = detail::elapsed_ns_since(t0);
    return out;
}

/// Exhaustive minimum-WHD decoder (equivalent to ML for BPSK on AWGN).
/// Walks all 2^k codewords in Gray order; ties go to the lexicographically
/// smallest codeword. Refused for k > 24.
inline BitVec ml_oracle(const SoftWord& sw, const CodeSpec& spec) {
    if (spec.k > 24)
        throw std::invalid_argument("ml_oracle: k = " + std::to_string(spec.k) + " exceeds the k <= 24 limit");
    if (sw.alpha.size() != spec.n) throw std::invalid_argument("ml_oracle: frame length != code length");

    BitVec cw(spec.n);
    BitVec best_cw = cw;
    double best = whd(cw, sw.y, sw.alpha);
    for (std::uint64_t t = 1; t < (std::uint64_t{1} << spec.k); ++t) {
        cw ^= spec.generator.row(static_cast<std::size_t>(std::countr_zero(t)));
        const double d = detail::whd_bounded(cw, sw.y, sw.alpha, best);
        if (d < best || (d == best && detail::lex_less(cw, best_cw))) {
            best = d;
            best_cw = cw;
        }
    }
    return best_cw;
}

}  // namespace osd
