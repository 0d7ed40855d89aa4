#pragma once

// Construction and loading of the binary linear block codes used by the
// decoders: extended BCH codes synthesized from finite-field generator
// polynomials, plus a plain text generator-matrix file format.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "osd/gf2.hpp"

namespace osd {

/// GF(2^m) with log/antilog tables over a fixed primitive polynomial.
class Gf2mField {
public:
    Gf2mField(unsigned m, std::uint32_t primitive_poly)
        : m_(m), poly_(primitive_poly), nonzero_((1u << m) - 1) {
        alog_.resize(nonzero_);
        log_.resize(std::size_t{1} << m, 0);
        std::uint32_t x = 1;
        for (std::uint32_t e = 0; e < nonzero_; ++e) {
            alog_[e] = x;
            log_[x] = e;
            x <<= 1;
            if (x >> m & 1) x ^= poly_;
        }
        if (x != 1) throw std::invalid_argument("Gf2mField: polynomial is not primitive");
    }

    unsigned m() const { return m_; }
    std::uint32_t primitive_poly() const { return poly_; }
    std::uint32_t order() const { return nonzero_; }  // number of nonzero elements

    std::uint32_t alpha_pow(std::uint32_t e) const { return alog_[e % nonzero_]; }
    std::uint32_t log(std::uint32_t x) const { return log_[x]; }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        if (a == 0 || b == 0) return 0;
        return alog_[(log_[a] + log_[b]) % nonzero_];
    }

private:
    unsigned m_;
    std::uint32_t poly_;
    std::uint32_t nonzero_;
    std::vector<std::uint32_t> alog_;
    std::vector<std::uint32_t> log_;
};

/// Primitive polynomials pinned per extension degree so generated codes are
/// deterministic: m=3: x^3+x+1, m=4: x^4+x+1, m=5: x^5+x^2+1,
/// m=6: x^6+x+1, m=7: x^7+x^3+1.
inline std::uint32_t pinned_primitive_poly(unsigned m) {
    switch (m) {
        case 3: return 0b1011;
        case 4: return 0b10011;
        case 5: return 0b100101;
        case 6: return 0b1000011;
        case 7: return 0b10001001;
        default: throw std::invalid_argument("no pinned primitive polynomial for m=" + std::to_string(m));
    }
}

namespace detail {

// GF(2)[x] helpers on BitVec coefficients (bit i = coefficient of x^i).
inline int poly_degree(const BitVec& p) {
    for (std::size_t i = p.size(); i-- > 0;)
        if (p.get(i)) return static_cast<int>(i);
    return -1;
}

inline BitVec poly_mul(const BitVec& a, const BitVec& b) {
    const int da = poly_degree(a), db = poly_degree(b);
    if (da < 0 || db < 0) return BitVec(1);
    BitVec out(static_cast<std::size_t>(da + db + 1));
    for (int i = 0; i <= da; ++i) {
        if (!a.get(i)) continue;
        for (int j = 0; j <= db; ++j)
            if (b.get(j)) out.flip(i + j);
    }
    return out;
}

inline BitVec poly_mod(BitVec a, const BitVec& g) {
    const int dg = poly_degree(g);
    if (dg < 0) throw std::invalid_argument("poly_mod: zero divisor");
    for (int i = poly_degree(a); i >= dg; i = poly_degree(a)) {
        const int shift = i - dg;
        for (int j = 0; j <= dg; ++j)
            if (g.get(j)) a.flip(j + shift);
    }
    return a;
}

// Minimal polynomial of alpha^s over GF(2), via the cyclotomic coset of s.
inline BitVec minimal_polynomial(const Gf2mField& f, std::uint32_t s) {
    std::vector<std::uint32_t> coset;
    std::uint32_t c = s % f.order();
    while (std::find(coset.begin(), coset.end(), c) == coset.end()) {
        coset.push_back(c);
        c = (c * 2) % f.order();
    }
    // prod (x + alpha^c) in GF(2^m)[x]
    std::vector<std::uint32_t> poly{1};
    for (std::uint32_t e : coset) {
        const std::uint32_t root = f.alpha_pow(e);
        std::vector<std::uint32_t> next(poly.size() + 1, 0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i + 1] ^= poly[i];
            next[i] ^= f.mul(poly[i], root);
        }
        poly = std::move(next);
    }
    BitVec out(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i) {
        if (poly[i] > 1) throw std::logic_error("minimal polynomial has non-binary coefficient");
        if (poly[i]) out.set(i, true);
    }
    return out;
}

inline std::uint32_t coset_representative(std::uint32_t s, std::uint32_t order) {
    std::uint32_t rep = s % order, c = (s * 2) % order;
    while (c != s % order) {
        rep = std::min(rep, c);
        c = (c * 2) % order;
    }
    return rep;
}

}  // namespace detail

/// Narrow-sense BCH generator polynomial: lcm of the minimal polynomials of
/// alpha^1 .. alpha^{2t}. The returned BitVec holds the coefficients, bit i
/// being the coefficient of x^i.
inline BitVec bch_generator_poly(const Gf2mField& field, std::size_t n, unsigned designed_t) {
    if (n != field.order()) throw std::invalid_argument("bch_generator_poly: n must equal 2^m - 1");
    if (designed_t < 1) throw std::invalid_argument("bch_generator_poly: designed_t must be >= 1");
    BitVec g(1);
    g.set(0, true);
    std::vector<std::uint32_t> seen;
    for (std::uint32_t s = 1; s <= 2 * designed_t; ++s) {
        const std::uint32_t rep = detail::coset_representative(s, field.order());
        if (std::find(seen.begin(), seen.end(), rep) != seen.end()) continue;
        seen.push_back(rep);
        g = detail::poly_mul(g, detail::minimal_polynomial(field, s));
    }
    if (detail::poly_degree(g) >= static_cast<int>(n))
        throw std::invalid_argument("bch_generator_poly: designed_t too large for n");
    return g;
}

/// k x n generator matrix of the cyclic code with generator polynomial g,
/// brought to systematic form (no column permutation is ever needed here
/// since the shift matrix has a triangular left block).
inline BitMatrix cyclic_generator_matrix(const BitVec& g, std::size_t n) {
    const int dg = detail::poly_degree(g);
    if (dg < 0 || static_cast<std::size_t>(dg) >= n)
        throw std::invalid_argument("cyclic_generator_matrix: bad generator polynomial");
    const std::size_t k = n - static_cast<std::size_t>(dg);
    BitMatrix m(k, n);
    for (std::size_t r = 0; r < k; ++r)
        for (int j = 0; j <= dg; ++j)
            if (g.get(j)) m.set(r, r + static_cast<std::size_t>(j), true);
    auto sys = systematic_ge(m);
    return std::move(sys.g_sys);
}

/// Appends an overall parity column so every row (hence every codeword) has
/// even weight, then row-reduces back to systematic form.
inline BitMatrix extend_code(const BitMatrix& g) {
    const std::size_t k = g.rows(), n = g.cols() + 1;
    BitMatrix ext(k, n);
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t j = 0; j < n - 1; ++j)
            if (g.get(r, j)) ext.set(r, j, true);
        ext.set(r, n - 1, g.row(r).popcount() & 1u);
    }
    auto sys = systematic_ge(ext);
    return std::move(sys.g_sys);
}

struct CodeSpec {
    std::string name;
    std::size_t n = 0;
    std::size_t k = 0;
    unsigned d_h = 0;     // 0 when unknown
    BitMatrix generator;  // k x n, systematic [I_k | P]
};

/// Optimal reprocessing order ceil(d_H/4 - 1), clamped to >= 0.
inline unsigned default_order(const CodeSpec& spec) {
    if (spec.d_h == 0)
        throw std::invalid_argument("default_order: minimum distance unknown for code '" + spec.name +
                                    "'; pass an explicit order");
    if (spec.d_h <= 4) return 0;
    return (spec.d_h - 4 + 3) / 4;  // == ceil(d_h/4 - 1)
}

/// Exhaustive minimum nonzero codeword weight; feasible for small k only.
inline unsigned min_distance_exhaustive(const BitMatrix& g) {
    const std::size_t k = g.rows();
    if (k > 24) throw std::invalid_argument("min_distance_exhaustive: k too large");
    BitVec cw(g.cols());
    std::size_t best = g.cols() + 1;
    for (std::uint64_t t = 1; t < (std::uint64_t{1} << k); ++t) {
        cw ^= g.row(static_cast<std::size_t>(std::countr_zero(t)));  // Gray walk
        best = std::min(best, cw.popcount());
    }
    return static_cast<unsigned>(best);
}

/// Extended BCH code over GF(2^m): n = 2^m, with error-correction target t.
/// d_h is the designed distance plus one (exact for all bundled codes).
inline CodeSpec make_ebch(unsigned m, unsigned t, std::string name = {}) {
    const std::size_t n_bch = (std::size_t{1} << m) - 1;
    Gf2mField field(m, pinned_primitive_poly(m));
    const BitVec g = bch_generator_poly(field, n_bch, t);
    const BitMatrix bch = cyclic_generator_matrix(g, n_bch);
    BitMatrix ext = extend_code(bch);
    CodeSpec spec;
    spec.n = n_bch + 1;
    spec.k = bch.rows();
    spec.d_h = 2 * t + 2;
    spec.generator = std::move(ext);
    spec.name = name.empty()
                    ? "ebch-" + std::to_string(spec.n) + "-" + std::to_string(spec.k)
                    : std::move(name);
    return spec;
}

inline const std::vector<std::string>& builtin_code_names() {
    static const std::vector<std::string> names = {
        "ebch-8-4",  "ebch-16-11", "ebch-32-16",   "ebch-64-24",
        "ebch-64-36", "ebch-64-45", "ebch-128-106",
    };
    return names;
}

inline CodeSpec builtin_code(const std::string& name) {
    static const std::map<std::string, std::pair<unsigned, unsigned>> table = {
        {"ebch-8-4", {3, 1}},   {"ebch-16-11", {4, 1}}, {"ebch-32-16", {5, 3}},
        {"ebch-64-24", {6, 7}}, {"ebch-64-36", {6, 5}}, {"ebch-64-45", {6, 3}},
        {"ebch-128-106", {7, 3}},
    };
    const auto it = table.find(name);
    if (it == table.end()) throw std::invalid_argument("unknown code '" + name + "'");
    return make_ebch(it->second.first, it->second.second, name);
}

/// Writes the generator-matrix text format: a header line "n k" followed by
/// k rows of '0'/'1' characters.
inline void save_generator(const CodeSpec& spec, std::ostream& out) {
    out << spec.n << ' ' << spec.k << '\n';
    for (std::size_t r = 0; r < spec.k; ++r) out << spec.generator.row(r).to_string() << '\n';
}

inline void save_generator(const CodeSpec& spec, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    save_generator(spec, f);
    if (!f.good()) throw std::runtime_error(path + ": write failed");
}

/// Parses the text format above and brings the matrix to systematic form.
/// Any column permutation needed by the elimination is folded into the
/// stored matrix; on a memoryless channel the permuted code has identical
/// block error statistics. d_h is scanned exhaustively for small k and left
/// 0 (unknown) otherwise.
inline CodeSpec load_generator(std::istream& in, const std::string& diag_name = "<stream>") {
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) -> std::runtime_error {
        return std::runtime_error(diag_name + ":" + std::to_string(lineno) + ": " + msg);
    };

    ++lineno;
    if (!std::getline(in, line)) throw fail("missing header line \"n k\"");
    std::istringstream hdr(line);
    std::size_t n = 0, k = 0;
    if (!(hdr >> n >> k) || n == 0 || k == 0 || k > n) throw fail("malformed header, expected \"n k\"");

    std::vector<BitVec> rows;
    rows.reserve(k);
    for (std::size_t r = 0; r < k; ++r) {
        ++lineno;
        if (!std::getline(in, line)) throw fail("unexpected end of file, expected " + std::to_string(k) + " rows");
        std::string bits;
        bits.reserve(n);
        for (char ch : line) {
            if (ch == '0' || ch == '1') {
                bits.push_back(ch);
            } else if (ch != ' ' && ch != '\t' && ch != '\r') {
                throw fail(std::string("invalid character '") + ch + "' in matrix row");
            }
        }
        if (bits.size() != n)
            throw fail("row has " + std::to_string(bits.size()) + " bits, expected " + std::to_string(n));
        rows.push_back(BitVec::from_string(bits));
    }

    auto sys = systematic_ge(BitMatrix::from_rows(std::move(rows)));  // throws RankDeficientError
    CodeSpec spec;
    spec.name = diag_name;
    spec.n = n;
    spec.k = k;
    spec.generator = std::move(sys.g_sys);
    if (k <= 20) spec.d_h = min_distance_exhaustive(spec.generator);
    return spec;
}

inline CodeSpec load_generator(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open");
    return load_generator(f, path);
}

}  // namespace osd
