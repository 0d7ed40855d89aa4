#include <catch_amalgamated.hpp>

#include <random>

#include "osd/gf2.hpp"
#include "test_oracles.hpp"

using namespace osd;

TEST_CASE("mat_vec_mul basics", "[gf2]") {
    const auto m = BitMatrix::from_rows({BitVec::from_string("110"), BitVec::from_string("011")});

    SECTION("zero vector annihilates") {
        CHECK(mat_vec_mul(m, BitVec(2)) == BitVec(3));
    }
    SECTION("identity passes through") {
        const auto id = BitMatrix::identity(3);
        const auto v = BitVec::from_string("101");
        CHECK(mat_vec_mul(id, v) == v);
    }
    SECTION("hand XOR of rows") {
        CHECK(mat_vec_mul(m, BitVec::from_string("11")) == BitVec::from_string("101"));
    }
    SECTION("dimension mismatch is a hard error") {
        CHECK_THROWS_AS(mat_vec_mul(m, BitVec(3)), std::invalid_argument);
    }
}

TEST_CASE("BitVec xor with itself is zero", "[gf2]") {
    std::mt19937_64 rng(1);
    for (int it = 0; it < 50; ++it) {
        auto v = oracle::random_matrix(1, 97, rng).row(0);
        CHECK((v ^ v) == BitVec(97));
        CHECK(!(v ^ v).any());
    }
}

TEST_CASE("mat_vec_mul distributes over xor", "[gf2]") {
    std::mt19937_64 rng(2);
    for (int it = 0; it < 100; ++it) {
        const auto g = oracle::random_matrix(12, 40, rng);
        const auto u = oracle::random_matrix(1, 12, rng).row(0);
        const auto v = oracle::random_matrix(1, 12, rng).row(0);
        CHECK(mat_vec_mul(g, u ^ v) == (mat_vec_mul(g, u) ^ mat_vec_mul(g, v)));
    }
}

TEST_CASE("systematic_ge on an already systematic matrix is the identity transform", "[gf2]") {
    const auto m = BitMatrix::from_rows({BitVec::from_string("10011"), BitVec::from_string("01010")});
    const auto sys = systematic_ge(m);
    CHECK(sys.g_sys == m);
    CHECK(sys.pi2.is_identity());
    CHECK(sys.row_ops == BitMatrix::identity(2));
}

TEST_CASE("systematic_ge 2x3 hand case", "[gf2]") {
    const auto m = BitMatrix::from_rows({BitVec::from_string("011"), BitVec::from_string("110")});
    const auto sys = systematic_ge(m);
    CHECK(sys.g_sys.left_block_is_identity());
    // reconstruction: g_sys == row_ops * pi2(m)
    const auto permuted = sys.pi2.apply_columns(m);
    for (std::size_t r = 0; r < 2; ++r)
        CHECK(sys.g_sys.row(r) == mat_vec_mul(permuted, sys.row_ops.row(r)));
}

TEST_CASE("systematic_ge factorization holds on random full-rank matrices", "[gf2]") {
    std::mt19937_64 rng(3);
    const std::size_t ks[] = {8, 16, 24, 36};
    const std::size_t ns[] = {16, 32, 64};
    int count = 0;
    for (auto k : ks) {
        for (auto n : ns) {
            if (k > n) continue;
            for (int it = 0; it < 112; ++it) {
                const auto m = oracle::random_full_rank(k, n, rng);
                const auto sys = systematic_ge(m);
                REQUIRE(sys.g_sys.left_block_is_identity());
                const auto permuted = sys.pi2.apply_columns(m);
                for (std::size_t r = 0; r < k; ++r)
                    REQUIRE(sys.g_sys.row(r) == mat_vec_mul(permuted, sys.row_ops.row(r)));
                ++count;
            }
        }
    }
    CHECK(count >= 1000);
}

TEST_CASE("systematic_ge preserves the row space", "[gf2]") {
    std::mt19937_64 rng(4);
    for (int it = 0; it < 60; ++it) {
        const auto m = oracle::random_full_rank(10, 24, rng);
        const auto sys = systematic_ge(m);
        const auto inv = sys.pi2.inverse();
        auto rows = oracle::to_rows(m);
        const auto base_rank = oracle::rank(rows);
        for (std::size_t r = 0; r < 10; ++r) {
            // undo the column permutation, then check membership by rank
            const BitVec back = inv.apply(sys.g_sys.row(r));
            auto augmented = rows;
            std::vector<int> extra(24, 0);
            for (std::size_t j = 0; j < 24; ++j) extra[j] = back.get(j);
            augmented.push_back(extra);
            REQUIRE(oracle::rank(augmented) == base_rank);
        }
    }
}

TEST_CASE("systematic_ge reports the failing row on rank deficiency", "[gf2]") {
    const auto m = BitMatrix::from_rows({BitVec::from_string("110"), BitVec::from_string("110")});
    try {
        systematic_ge(m);
        FAIL("expected RankDeficientError");
    } catch (const RankDeficientError& e) {
        CHECK(e.row() == 1);
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
}

TEST_CASE("parity check from systematic generator", "[gf2]") {
    SECTION("(3,2) single parity check") {
        const auto g = BitMatrix::from_rows({BitVec::from_string("101"), BitVec::from_string("011")});
        const auto h = parity_check_from_systematic(g);
        REQUIRE(h.rows() == 1);
        CHECK(h.row(0) == BitVec::from_string("111"));
    }
    SECTION("(3,1) repetition-style code") {
        const auto g = BitMatrix::from_rows({BitVec::from_string("111")});
        const auto h = parity_check_from_systematic(g);
        REQUIRE(h.rows() == 2);
        CHECK(h.row(0) == BitVec::from_string("110"));
        CHECK(h.row(1) == BitVec::from_string("101"));
    }
    SECTION("defining property on random systematic matrices") {
        std::mt19937_64 rng(5);
        for (int it = 0; it < 50; ++it) {
            auto g = BitMatrix::identity(9);
            auto wide = BitMatrix(9, 20);
            for (std::size_t i = 0; i < 9; ++i) {
                wide.row(i).set(i, true);
                for (std::size_t j = 9; j < 20; ++j)
                    if (rng() & 1) wide.set(i, j, true);
            }
            const auto h = parity_check_from_systematic(wide);
            for (std::size_t i = 0; i < 9; ++i) REQUIRE(is_codeword(h, wide.row(i)));
        }
    }
    SECTION("non-identity left block is a hard error") {
        const auto g = BitMatrix::from_rows({BitVec::from_string("011")});
        CHECK_THROWS_AS(parity_check_from_systematic(g), std::invalid_argument);
    }
}

TEST_CASE("permutation apply, inverse and compose", "[gf2]") {
    std::mt19937_64 rng(6);
    std::vector<std::uint32_t> map(17);
    for (std::size_t i = 0; i < map.size(); ++i) map[i] = static_cast<std::uint32_t>(i);
    std::shuffle(map.begin(), map.end(), rng);
    const Permutation p(map);
    const auto v = oracle::random_matrix(1, 17, rng).row(0);
    CHECK(p.inverse().apply(p.apply(v)) == v);
    CHECK(p.apply(p.inverse().apply(v)) == v);
    CHECK(Permutation::compose(p, p.inverse()).is_identity());

    std::vector<double> reals(17);
    for (auto& x : reals) x = std::uniform_real_distribution<>(0, 1)(rng);
    const auto pr = p.apply(reals);
    for (std::size_t i = 0; i < 17; ++i) CHECK(pr[i] == reals[p[i]]);
}
