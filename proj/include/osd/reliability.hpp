#pragma once

// Probability kernel for the adaptive decoder: bitwise error probabilities,
// list-coverage probabilities (on-the-fly and offline), TEP success and
// codeword-correctness probabilities, and the discard threshold. Everything
// that can underflow is carried in the log domain.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "osd/channel.hpp"
#include "osd/qfunc.hpp"

namespace osd {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

namespace detail {

inline double logaddexp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

/// log(1 - e^x) for x <= 0.
inline double log1mexp(double x) {
    if (x == kNegInf) return 0.0;
    if (x >= 0.0) return kNegInf;  // 1 - e^x <= 0 only at x == 0 up to rounding
    if (x > -std::numbers::ln2) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

}  // namespace detail

/// Exact C(k, i) while it fits a double exactly; log C(k, i) otherwise via
/// lgamma. Exactness holds comfortably for k <= 128, i <= 4.
inline double log_binom(unsigned k, unsigned i) {
    if (i > k) return kNegInf;
    i = std::min(i, k - i);
    if (i <= 8) {
        double c = 1.0;
        for (unsigned j = 1; j <= i; ++j) c = c * (k - i + j) / j;
        if (c < 9.007199254740992e15) return std::log(std::round(c));
    }
    return std::lgamma(double(k) + 1.0) - std::lgamma(double(i) + 1.0) - std::lgamma(double(k - i) + 1.0);
}

inline double binom_exact(unsigned k, unsigned i) {
    if (i > k) return 0.0;
    i = std::min(i, k - i);
    double c = 1.0;
    for (unsigned j = 1; j <= i; ++j) c = c * (k - i + j) / j;
    return std::round(c);
}

/// Sum_{i=0}^{m} C(k, i): the order-m reprocessing budget.
inline std::uint64_t tep_budget(std::size_t k, unsigned m) {
    std::uint64_t total = 0;
    for (unsigned i = 0; i <= m; ++i) {
        const double c = binom_exact(static_cast<unsigned>(k), i);
        total += static_cast<std::uint64_t>(c);
    }
    return total;
}

/// Bitwise error probability 1/(1 + exp(4*alpha/n0)); saturates to exactly
/// zero once the exponent overflows.
inline double ordered_bit_error(double alpha, double n0) {
    const double x = 4.0 * alpha / n0;
    if (x > 745.0) return 0.0;
    return 1.0 / (1.0 + std::exp(x));
}

/// log of the above, valid far beyond the saturation point.
inline double log_bit_error(double alpha, double n0) {
    const double x = 4.0 * alpha / n0;
    return -(x + std::log1p(std::exp(-x)));
}

/// log(1 - P) for the same probability.
inline double log1m_bit_error(double alpha, double n0) {
    const double x = 4.0 * alpha / n0;
    return -std::log1p(std::exp(-x));
}

/// Per-frame cache of bitwise error probabilities and their log(1-P) sums.
/// p_ordered follows the reliabilities sorted descending (the pre-GE view),
/// p_unordered the natural receive order.
struct BitErrorProfile {
    std::vector<double> p_ordered;
    std::vector<double> p_unordered;
    double p_mrb_mean = 0.0;         // mean of p_ordered over the first k
    double p_prime_mean = 0.0;       // mean of p_unordered over the first k
    double log1m_prod_all = 0.0;     // sum log(1 - P(i)) over 1..n, natural order
    double log1m_prod_k = 0.0;       // sum log(1 - P(i)) over 1..k, natural order
    double log1m_prod_k_ord = 0.0;   // sum log(1 - P(~i)) over 1..k, sorted order

    static BitErrorProfile build(const SoftWord& sw, std::size_t k, double n0) {
        const std::size_t n = sw.alpha.size();
        if (k > n) throw std::invalid_argument("BitErrorProfile: k > n");
        BitErrorProfile prof;
        prof.p_unordered.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            prof.p_unordered[i] = ordered_bit_error(sw.alpha[i], n0);
            const double l = log1m_bit_error(sw.alpha[i], n0);
            prof.log1m_prod_all += l;
            if (i < k) {
                prof.log1m_prod_k += l;
                prof.p_prime_mean += prof.p_unordered[i];
            }
        }
        prof.p_prime_mean /= double(k);

        std::vector<double> sorted(sw.alpha);
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());
        prof.p_ordered.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            prof.p_ordered[i] = ordered_bit_error(sorted[i], n0);
            if (i < k) {
                prof.p_mrb_mean += prof.p_ordered[i];
                prof.log1m_prod_k_ord += log1m_bit_error(sorted[i], n0);
            }
        }
        prof.p_mrb_mean /= double(k);
        return prof;
    }
};

/// Binomial coverage Sum_{i=0}^{m} C(k,i) p^i (1-p)^{k-i}, log-domain.
/// Serves both the MRB estimate (p = p_mrb_mean, order m) and the
/// natural-order estimate (p = p_prime_mean, order m').
inline double plist_online(double p, std::size_t k, unsigned m) {
    if (m > k) throw std::invalid_argument("plist_online: m > k");
    if (m == k) return 1.0;
    if (p <= 0.0) return 1.0;
    const double lp = std::log(p), l1m = std::log1p(-p);
    double acc = kNegInf;
    for (unsigned i = 0; i <= m; ++i)
        acc = detail::logaddexp(acc, log_binom(static_cast<unsigned>(k), i) + i * lp + (k - i) * l1m);
    return std::min(1.0, std::exp(acc));
}

/// log Sum_{i=m+1}^{k} C(k,i) p^i (1-p)^{k-i}: the coverage complement,
/// exact in the log domain where 1 - plist_online would cancel to zero.
inline double plist_tail_log(double p, std::size_t k, unsigned m) {
    if (m >= k || p <= 0.0) return kNegInf;
    const double lp = std::log(p), l1m = std::log1p(-p);
    double acc = kNegInf;
    for (unsigned i = m + 1; i <= k; ++i)
        acc = detail::logaddexp(acc, log_binom(static_cast<unsigned>(k), i) + i * lp + (k - i) * l1m);
    return acc;
}

/// Decoding parameters shared by the engines. order_m_prime is the non-GE
/// reprocessing order and always equals max(order_m - 1, 0).
struct ConditionParams {
    double lambda = 0.05;
    double tau = 0.95;
    double tau_p = 0.0;
    unsigned order_m = 0;
    unsigned order_m_prime = 0;

    void validate() const {
        if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("ConditionParams: lambda not in (0,1]");
        if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("ConditionParams: tau not in [0,1]");
        if (tau_p < 0.0) throw std::invalid_argument("ConditionParams: tau_p < 0");
        if (order_m_prime != (order_m > 0 ? order_m - 1 : 0))
            throw std::invalid_argument("ConditionParams: order_m_prime != max(order_m-1, 0)");
    }
};

/// tau_p = 0.002 sqrt(p' / N_{m'}) with N_{m'} = Sum_{i=1}^{m'} C(k,i);
/// N_0 is taken as 1 so order-0 non-GE decoding stays defined.
inline double discard_threshold(double n0, std::size_t k, unsigned order_m_prime) {
    double nm = 0.0;
    for (unsigned i = 1; i <= order_m_prime; ++i) nm += binom_exact(static_cast<unsigned>(k), i);
    if (nm < 1.0) nm = 1.0;
    const double p_raw = q_function(std::sqrt(2.0 / n0));
    return 0.002 * std::sqrt(p_raw / nm);
}

inline ConditionParams make_condition_params(unsigned order_m, double lambda, double tau,
                                             const NoiseModel& noise, std::size_t k) {
    ConditionParams p;
    p.lambda = lambda;
    p.tau = tau;
    p.order_m = std::min<unsigned>(order_m, static_cast<unsigned>(k));
    p.order_m_prime = p.order_m > 0 ? p.order_m - 1 : 0;
    p.tau_p = discard_threshold(noise.n0, k, p.order_m_prime);
    p.validate();
    return p;
}

/// Condition 1: attempt the non-GE pass iff P'_list >= (1 - lambda) P_list,
/// both estimated on the fly from the current frame.
inline bool condition1(const BitErrorProfile& profile, const ConditionParams& params, std::size_t k) {
    const double p_list = plist_online(profile.p_mrb_mean, k, params.order_m);
    const double p_list_prime = plist_online(profile.p_prime_mean, k, params.order_m_prime);
    return p_list_prime >= (1.0 - params.lambda) * p_list;
}

namespace detail {

inline constexpr int kSimpsonMaxDepth = 48;

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) throw std::runtime_error("adaptive quadrature did not converge");
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson subdivision with an absolute tolerance, seeded with a
/// fixed panel split so narrow peaks are not skipped over.
template <class F>
double integrate(const F& f, double a, double b, double tol, int panels = 24) {
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
        const double x0 = a + i * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
        const double f0 = f(x0), f1 = f(x1), fm = f(xm);
        const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += adaptive_simpson_rec(f, x0, x1, f0, fm, f1, whole, tol / panels, kSimpsonMaxDepth);
    }
    return total;
}

/// BPSK reliability density: |N(+-1, n0/2)|, x >= 0.
inline double log_folded_pdf(double x, double n0) {
    const double la = -(x - 1.0) * (x - 1.0) / n0;
    const double lb = -(x + 1.0) * (x + 1.0) / n0;
    return logaddexp(la, lb) - 0.5 * std::log(std::numbers::pi * n0);
}

/// log P(alpha > x) for the same density.
inline double log_folded_upper(double x, double n0) {
    const double sig = std::sqrt(0.5 * n0);
    return logaddexp(log_q_function((x - 1.0) / sig), log_q_function((x + 1.0) / sig));
}

/// Average bitwise error probability of the bits with reliability above x:
/// p(x) = Q((x+1)/sigma) / (Q((x+1)/sigma) + Q((x-1)/sigma)).
inline double conditional_bit_error(double x, double n0) {
    const double sig = std::sqrt(0.5 * n0);
    const double la = log_q_function((x + 1.0) / sig);
    const double lb = log_q_function((x - 1.0) / sig);
    return std::exp(la - logaddexp(la, lb));
}

/// log density of the (k+1)-th largest of n i.i.d. folded-normal
/// reliabilities: n C(n-1,k) f(x) Fbar(x)^k F(x)^(n-k-1).
inline double log_order_stat_pdf(double x, double n0, std::size_t n, std::size_t k) {
    const double lfb = log_folded_upper(x, n0);
    const double lf = log1mexp(lfb);  // log F(x)
    if (lf == kNegInf && n - k - 1 > 0) return kNegInf;
    return std::log(double(n)) + log_binom(static_cast<unsigned>(n - 1), static_cast<unsigned>(k)) +
           log_folded_pdf(x, n0) + double(k) * lfb + double(n - k - 1) * lf;
}

}  // namespace detail

/// Offline P_list: integrates the binomial coverage against the density of
/// the (k+1)-th ordered reliability. Absolute tolerance 1e-9; the integrand
/// beyond 1 + 8 sigma is bounded by n Q(8) < 1e-13 and is dropped.
inline double plist_offline(double n0, std::size_t n, std::size_t k, unsigned m, double tol = 1e-9) {
    if (m > k) throw std::invalid_argument("plist_offline: m > k");
    if (m == k) return 1.0;
    const double upper = 1.0 + 8.0 * std::sqrt(0.5 * n0);
    auto integrand = [&](double x) {
        const double lo = detail::log_order_stat_pdf(x, n0, n, k);
        if (lo == kNegInf) return 0.0;
        return plist_online(detail::conditional_bit_error(x, n0), k, m) * std::exp(lo);
    };
    return std::min(1.0, detail::integrate(integrand, 0.0, upper, tol));
}

/// Complement of plist_offline, integrated directly so it stays meaningful
/// where 1 - P_list would round away.
inline double plist_offline_tail(double n0, std::size_t n, std::size_t k, unsigned m, double tol = 1e-12) {
    if (m >= k) return 0.0;
    const double upper = 1.0 + 8.0 * std::sqrt(0.5 * n0);
    auto integrand = [&](double x) {
        const double lo = detail::log_order_stat_pdf(x, n0, n, k);
        if (lo == kNegInf) return 0.0;
        const double lt = plist_tail_log(detail::conditional_bit_error(x, n0), k, m);
        return lt == kNegInf ? 0.0 : std::exp(lt + lo);
    };
    return detail::integrate(integrand, 0.0, upper, tol);
}

/// |P_list - P'_list| for the offline route, evaluated through the two
/// complements so the gap survives when both probabilities round to one.
inline double plist_gap_offline(double n0, std::size_t n, std::size_t k, unsigned m, unsigned m_prime) {
    const double p_raw = q_function(std::sqrt(2.0 / n0));
    const double tail_prime = std::exp(plist_tail_log(p_raw, k, m_prime));
    const double tail = plist_offline_tail(n0, n, k, m);
    return std::fabs(tail_prime - tail);
}

/// log of the order-m binomial term C(k,m) p^m (1-p)^(k-m) at the asymptote
/// p = 1/(1 + e^(4/n0)): the exact high-SNR gap between P_list and P'_list.
inline double plist_gap_asymptotic_log(double n0, std::size_t k, unsigned m) {
    const double lp = log_bit_error(1.0, n0);
    const double l1m = log1m_bit_error(1.0, n0);
    return log_binom(static_cast<unsigned>(k), m) + double(m) * lp + double(k - m) * l1m;
}

/// log P(e): the probability that flipping exactly the TEP positions
/// repairs the basis, as -(4/n0) sum_{i in e} alpha_i + sum_{i<=k} log(1-P(i)).
inline double tep_success_logprob(std::span<const std::uint32_t> tep, std::span<const double> alpha,
                                  double log1m_prod_k, double n0) {
    double s = 0.0;
    for (auto i : tep) s += alpha[i];
    return -(4.0 / n0) * s + log1m_prod_k;
}

/// Same quantity from the defining product Prod_{e_i!=0} P(i) Prod_{e_i=0} (1-P(i)).
inline double tep_success_logprob_direct(std::span<const std::uint32_t> tep, std::span<const double> alpha,
                                         std::size_t k, double n0) {
    double acc = 0.0;
    std::size_t t = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (t < tep.size() && tep[t] == i) {
            acc += log_bit_error(alpha[i], n0);
            ++t;
        } else {
            acc += log1m_bit_error(alpha[i], n0);
        }
    }
    return acc;
}

/// Probability that a codeword estimate with total weighted Hamming
/// distance whd_total (over all n positions) is the transmitted codeword,
/// given the TEP success probability log P(e) and the cached
/// sum_{i<=n} log(1-P(i)).
inline double codeword_success_prob(double whd_total, double log_tep_success, double log1m_prod_all,
                                    std::size_t n, std::size_t k, double n0) {
    const double log1m_pe = detail::log1mexp(std::min(0.0, log_tep_success));
    const double log_ratio = log1m_pe + (double(k) - double(n)) * std::numbers::ln2 +
                             (4.0 / n0) * whd_total - log1m_prod_all;
    if (log_ratio > 745.0) return 0.0;
    if (log_ratio < -745.0) return 1.0;
    return 1.0 / (1.0 + std::exp(log_ratio));
}

}  // namespace osd
