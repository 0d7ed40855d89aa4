#pragma once

// Bit-packed GF(2) vectors/matrices, permutations, and Gaussian elimination
// with column-permutation fallback.

#include <bit>
#include <cstdint>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace osd {

/// Dense bit vector packed little-endian into 64-bit words.
/// Unused tail bits of the last word are kept zero at all times.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    static BitVec from_string(std::string_view bits) {
        BitVec v(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1') {
                v.set(i, true);
            } else if (bits[i] != '0') {
                throw std::invalid_argument("BitVec::from_string: invalid character");
            }
        }
        return v;
    }

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }

    void set(std::size_t i, bool v) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (v) {
            w_[i >> 6] |= mask;
        } else {
            w_[i >> 6] &= ~mask;
        }
    }

    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    void clear() { w_.assign(w_.size(), 0); }

    BitVec& operator^=(const BitVec& o) {
        if (o.n_ != n_) throw std::invalid_argument("BitVec xor: length mismatch");
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
        return *this;
    }

    friend BitVec operator^(BitVec a, const BitVec& b) {
        a ^= b;
        return a;
    }

    bool operator==(const BitVec&) const = default;

    std::size_t popcount() const {
        std::size_t c = 0;
        for (auto w : w_) c += std::popcount(w);
        return c;
    }

    bool any() const {
        for (auto w : w_)
            if (w) return true;
        return false;
    }

    std::span<const std::uint64_t> words() const { return w_; }
    std::uint64_t word(std::size_t i) const { return w_[i]; }

    /// Calls f(index) for every set bit, in ascending index order.
    template <class F>
    void for_each_set(F&& f) const {
        for (std::size_t wi = 0; wi < w_.size(); ++wi) {
            std::uint64_t w = w_[wi];
            while (w) {
                f(wi * 64 + std::countr_zero(w));
                w &= w - 1;
            }
        }
    }

    std::string to_string() const {
        std::string s(n_, '0');
        for (std::size_t i = 0; i < n_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

/// Parity of a AND b, i.e. the GF(2) inner product.
inline bool dot(const BitVec& a, const BitVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < a.words().size(); ++i) acc ^= a.word(i) & b.word(i);
    return std::popcount(acc) & 1u;
}

/// Dense GF(2) matrix stored as bit-packed rows.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), r_(rows, BitVec(cols)) {}

    static BitMatrix identity(std::size_t k) {
        BitMatrix m(k, k);
        for (std::size_t i = 0; i < k; ++i) m.r_[i].set(i, true);
        return m;
    }

    static BitMatrix from_rows(std::vector<BitVec> rows) {
        BitMatrix m;
        m.rows_ = rows.size();
        m.cols_ = rows.empty() ? 0 : rows[0].size();
        for (const auto& r : rows)
            if (r.size() != m.cols_) throw std::invalid_argument("BitMatrix: ragged rows");
        m.r_ = std::move(rows);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const BitVec& row(std::size_t i) const { return r_[i]; }
    BitVec& row(std::size_t i) { return r_[i]; }
    bool get(std::size_t i, std::size_t j) const { return r_[i].get(j); }
    void set(std::size_t i, std::size_t j, bool v) { r_[i].set(j, v); }

    bool operator==(const BitMatrix&) const = default;

    void swap_rows(std::size_t a, std::size_t b) { std::swap(r_[a], r_[b]); }

    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (auto& r : r_) {
            const bool va = r.get(a), vb = r.get(b);
            r.set(a, vb);
            r.set(b, va);
        }
    }

    void xor_row(std::size_t dst, std::size_t src) { r_[dst] ^= r_[src]; }

    bool left_block_is_identity() const {
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < rows_; ++j)
                if (get(i, j) != (i == j)) return false;
        return true;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<BitVec> r_;
};

/// result = v * m over GF(2): result[j] = XOR_i v[i] & m[i][j].
inline BitVec mat_vec_mul(const BitMatrix& m, const BitVec& v) {
    if (v.size() != m.rows()) throw std::invalid_argument("mat_vec_mul: v.length != m.rows");
    BitVec out(m.cols());
    v.for_each_set([&](std::size_t i) { out ^= m.row(i); });
    return out;
}

/// Index remap: output position i is read from source position map[i].
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<std::uint32_t> map) : map_(std::move(map)) {}

    static Permutation identity(std::size_t n) {
        std::vector<std::uint32_t> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<std::uint32_t>(i);
        return Permutation(std::move(m));
    }

    std::size_t size() const { return map_.size(); }
    std::uint32_t operator[](std::size_t i) const { return map_[i]; }
    std::span<const std::uint32_t> map() const { return map_; }

    bool is_identity() const {
        for (std::size_t i = 0; i < map_.size(); ++i)
            if (map_[i] != i) return false;
        return true;
    }

    bool operator==(const Permutation&) const = default;

    Permutation inverse() const {
        std::vector<std::uint32_t> inv(map_.size());
        for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = static_cast<std::uint32_t>(i);
        return Permutation(std::move(inv));
    }

    /// apply(v)[i] = v[map[i]]
    template <class T>
    std::vector<T> apply(const std::vector<T>& v) const {
        if (v.size() != map_.size()) throw std::invalid_argument("Permutation::apply: size mismatch");
        std::vector<T> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[map_[i]];
        return out;
    }

    BitVec apply(const BitVec& v) const {
        if (v.size() != map_.size()) throw std::invalid_argument("Permutation::apply: size mismatch");
        BitVec out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v.get(map_[i])) out.set(i, true);
        return out;
    }

    /// Permutes matrix columns: out[r][i] = m[r][map[i]].
    BitMatrix apply_columns(const BitMatrix& m) const {
        if (m.cols() != map_.size()) throw std::invalid_argument("Permutation::apply_columns: size mismatch");
        BitMatrix out(m.rows(), m.cols());
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t i = 0; i < m.cols(); ++i)
                if (m.get(r, map_[i])) out.set(r, i, true);
        return out;
    }

    /// compose(outer, inner)(v) == outer(inner(v))
    static Permutation compose(const Permutation& outer, const Permutation& inner) {
        if (outer.size() != inner.size()) throw std::invalid_argument("Permutation::compose: size mismatch");
        std::vector<std::uint32_t> m(outer.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = inner.map_[outer.map_[i]];
        return Permutation(std::move(m));
    }

private:
    std::vector<std::uint32_t> map_;
};

class RankDeficientError : public std::runtime_error {
public:
    explicit RankDeficientError(std::size_t row)
        : std::runtime_error("rank deficient: pivot search exhausted all columns at row " +
                             std::to_string(row)),
          row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

struct SystematicForm {
    BitMatrix g_sys;    // [I_k | P], k x n
    Permutation pi2;    // column fixup, size n
    BitMatrix row_ops;  // invertible k x k, g_sys == row_ops * pi2(input)
};

/// Reduces a full-row-rank k x n matrix to systematic form [I_k | P].
///
/// Pivot search for row i scans columns i, i+1, ... left to right among
/// not-yet-pivoted columns; a successful pivot at column j != i swaps
/// columns i and j and records the swap in pi2, so pi2 moves as few
/// columns as possible.
inline SystematicForm systematic_ge(const BitMatrix& m) {
    const std::size_t k = m.rows(), n = m.cols();
    if (k > n) throw std::invalid_argument("systematic_ge: more rows than columns");
    BitMatrix work = m;
    BitMatrix ops = BitMatrix::identity(k);
    auto perm = Permutation::identity(n);
    std::vector<std::uint32_t> pmap(perm.map().begin(), perm.map().end());

    for (std::size_t i = 0; i < k; ++i) {
        std::size_t pc = n, pr = k;
        for (std::size_t j = i; j < n && pc == n; ++j) {
            for (std::size_t r = i; r < k; ++r) {
                if (work.get(r, j)) {
                    pc = j;
                    pr = r;
                    break;
                }
            }
        }
        if (pc == n) throw RankDeficientError(i);
        if (pr != i) {
            work.swap_rows(i, pr);
            ops.swap_rows(i, pr);
        }
        if (pc != i) {
            work.swap_cols(i, pc);
            std::swap(pmap[i], pmap[pc]);
        }
        for (std::size_t r = 0; r < k; ++r) {
            if (r != i && work.get(r, i)) {
                work.xor_row(r, i);
                ops.xor_row(r, i);
            }
        }
    }
    return SystematicForm{std::move(work), Permutation(std::move(pmap)), std::move(ops)};
}

/// H = [P^T | I_{n-k}] from G = [I_k | P]; every row of G is orthogonal to H.
inline BitMatrix parity_check_from_systematic(const BitMatrix& g_sys) {
    const std::size_t k = g_sys.rows(), n = g_sys.cols();
    if (!g_sys.left_block_is_identity())
        throw std::invalid_argument("parity_check_from_systematic: left block is not identity");
    BitMatrix h(n - k, n);
    for (std::size_t r = 0; r < n - k; ++r) {
        for (std::size_t j = 0; j < k; ++j)
            if (g_sys.get(j, k + r)) h.set(r, j, true);
        h.set(r, k + r, true);
    }
    return h;
}

/// True iff H * c^T == 0 for every row of H.
inline bool is_codeword(const BitMatrix& h, const BitVec& c) {
    for (std::size_t r = 0; r < h.rows(); ++r)
        if (dot(h.row(r), c)) return false;
    return true;
}

}  // namespace osd
