#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ospca/block_decomp.hpp"
#include "ospca/certify.hpp"

using namespace ospca;

namespace {

// Random unit vector supported on p random coordinates.
std::vector<double> random_sparse_unit(int n, int p, SplitMix64& rng) {
    std::vector<int> idx;
    while (static_cast<int>(idx.size()) < p) {
        const int j = rng.below(n);
        bool seen = false;
        for (int t : idx) seen = seen || t == j;
        if (!seen) idx.push_back(j);
    }
    std::sort(idx.begin(), idx.end());
    auto w = test::random_unit(p, rng);
    return embed(w, IndexSet(idx, n));
}

SpcaSolution full_block_solution(const SymMatrix& block, int p) {
    return solve_sequence(block, std::min(p, block.dim()), block.dim());
}

}  // namespace

TEST_CASE("threshold_matrix keeps entries at or above delta") {
    auto q = test::make_sym({{4, 0.05}, {0.05, 3}});
    SymMatrix qd = threshold_matrix(q, 0.1);
    CHECK(qd(0, 0) == 4.0);
    CHECK(qd(1, 1) == 3.0);
    CHECK(qd(0, 1) == 0.0);

    SUBCASE("delta = 0 is the identity transform") {
        auto q2 = test::random_symmetric(5, 3);
        SymMatrix same = threshold_matrix(q2, 0.0);
        CHECK(same.data() == q2.data());
    }
    SUBCASE("boundary entries are kept") {
        auto q3 = test::make_sym({{1.0, 0.1}, {0.1, 1.0}});
        SymMatrix qd3 = threshold_matrix(q3, 0.1);
        CHECK(qd3(0, 1) == 0.1);
    }
    SUBCASE("the diagonal is thresholded too") {
        auto q4 = test::make_sym({{5, 0}, {0, 2}});
        SymMatrix qd4 = threshold_matrix(q4, 3.0);
        CHECK(qd4(0, 0) == 5.0);
        CHECK(qd4(1, 1) == 0.0);
    }
}

TEST_CASE("max-norm and sparse quadratic error bounds") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + rng.below(8);
        auto q = test::random_symmetric(n, 1000 + trial, 2.0);
        const double delta = rng.uniform(0.0, 2.0);
        SymMatrix qd = threshold_matrix(q, delta);
        double max_err = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) max_err = std::max(max_err, std::abs(q(i, j) - qd(i, j)));
        CHECK(max_err <= delta);

        const int p = 1 + rng.below(n);
        auto u = random_sparse_unit(n, p, rng);
        CHECK(std::abs(q.quad_form(u) - qd.quad_form(u)) <= p * delta + 1e-12);
    }
}

TEST_CASE("connected components") {
    SUBCASE("one edge") {
        auto q = test::make_sym({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}});
        auto comps = connected_components(q);
        REQUIRE(comps.size() == 2);
        CHECK(comps[0].indices == std::vector<int>{0, 1});
        CHECK(comps[1].indices == std::vector<int>{2});
    }
    SUBCASE("diagonal matrix gives singletons") {
        auto q = test::make_sym({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
        CHECK(connected_components(q).size() == 3);
    }
    SUBCASE("dense matrix is one component") {
        auto q = test::random_psd(4, 8);
        auto comps = connected_components(q);
        REQUIRE(comps.size() == 1);
        CHECK(comps[0].size() == 4);
    }
}

TEST_CASE("block_diagonalize structure and permutation") {
    SUBCASE("decoupled 2x2") {
        auto q = test::make_sym({{4, 0.05}, {0.05, 3}});
        BlockStructure s = block_diagonalize(q, 0.1);
        REQUIRE(s.block_count() == 2);
        CHECK(s.permutation == std::vector<int>{0, 1});
        CHECK(s.blocks[0](0, 0) == 4.0);
        CHECK(s.blocks[1](0, 0) == 3.0);
    }
    SUBCASE("interleaved couplings reorder as (0,2,1,3)") {
        auto q = test::make_sym({{2, 0, 1, 0}, {0, 3, 0, 1}, {1, 0, 2, 0}, {0, 1, 0, 3}});
        BlockStructure s = block_diagonalize(q, 0.5);
        REQUIRE(s.block_count() == 2);
        CHECK(s.permutation == std::vector<int>{0, 2, 1, 3});
        CHECK(s.components[0].indices == std::vector<int>{0, 2});
        CHECK(s.components[1].indices == std::vector<int>{1, 3});
        CHECK(s.blocks[0](0, 1) == 1.0);
        CHECK(s.blocks[1](0, 1) == 1.0);
    }
    SUBCASE("permuting the thresholded matrix matches the assembled blocks bit-exactly") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            SplitMix64 rng(seed);
            const int n = 4 + rng.below(6);
            auto q = test::random_symmetric(n, seed + 40, 1.0);
            const double delta = rng.uniform(0.2, 0.9);
            BlockStructure s = block_diagonalize(q, delta);
            SymMatrix qd = threshold_matrix(q, delta);
            SymMatrix a = s.assemble();
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    CHECK(a(r, c) == qd(s.permutation[r], s.permutation[c]));
        }
    }
}

TEST_CASE("merge_sorted interleaves block solutions by variance") {
    auto b0 = test::make_sym({{2, 1}, {1, 2}});
    auto b1 = test::make_sym({{5, 0}, {0, 1}});
    BlockStructure s;
    s.n = 4;
    s.delta = 0.0;
    s.permutation = {0, 1, 2, 3};
    s.components = {IndexSet({0, 1}, 4), IndexSet({2, 3}, 4)};
    s.blocks = {b0, b1};
    s.offsets = {0, 2};

    std::vector<SpcaSolution> per_block{full_block_solution(s.blocks[0], 2),
                                        full_block_solution(s.blocks[1], 2)};
    SpcaSolution merged = merge_sorted(per_block, s);
    REQUIRE(merged.components.size() == 4);
    CHECK(merged.components[0].variance == doctest::Approx(5.0));
    CHECK(merged.components[1].variance == doctest::Approx(3.0));
    CHECK(merged.components[2].variance == doctest::Approx(1.0));
    CHECK(merged.components[3].variance == doctest::Approx(1.0));
    // The tied pair resolves by block index: block 0's second component first.
    CHECK(merged.components[2].support.indices == std::vector<int>{0, 1});
    CHECK(merged.components[3].support.indices == std::vector<int>{2, 3});

    SUBCASE("a single block merges to itself") {
        auto q = test::random_psd(3, 5);
        BlockStructure one = block_diagonalize(q, 0.0);
        REQUIRE(one.block_count() == 1);
        SpcaSolution sol = full_block_solution(one.blocks[0], 2);
        SpcaSolution same = merge_sorted({sol}, one);
        REQUIRE(same.components.size() == sol.components.size());
        for (std::size_t i = 0; i < sol.components.size(); ++i) {
            CHECK(same.components[i].values == sol.components[i].values);
            CHECK(same.components[i].variance == sol.components[i].variance);
        }
    }
    SUBCASE("block count mismatch is an input error") {
        CHECK_THROWS_AS(merge_sorted({per_block[0]}, s), std::invalid_argument);
    }
}

TEST_CASE("threshold_spca on an exactly block-diagonal matrix equals the merge path") {
    SymMatrix q(6);
    auto b0 = test::random_psd(2, 21);
    auto b1 = test::random_psd(3, 22);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) q.set(i, j, b0(i, j));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) q.set(2 + i, 2 + j, b1(i, j));
    q.set(5, 5, 0.75);

    BlockStructure s = block_diagonalize(q, 1e-9);
    REQUIRE(s.block_count() == 3);

    std::vector<SpcaSolution> per_block;
    for (const auto& blk : s.blocks) per_block.push_back(full_block_solution(blk, 2));
    SpcaSolution merged = merge_sorted(per_block, s);
    SpcaSolution threshold = threshold_spca(q, 2, 1e-9, 0.0, 6, BlockSolver::Exact);

    REQUIRE(merged.components.size() == threshold.components.size());
    for (std::size_t i = 0; i < merged.components.size(); ++i) {
        CHECK(threshold.components[i].variance ==
              doctest::Approx(merged.components[i].variance).epsilon(1e-12));
    }
}

TEST_CASE("threshold_spca severing all couplings on the fixture") {
    auto q = test::coupled3();
    SolveStats stats;
    SpcaSolution sol = threshold_spca(q, 1, 3.0, 0.0, 3, BlockSolver::Exact, &stats);
    REQUIRE(sol.components.size() == 3);
    CHECK(sol.components[0].variance == doctest::Approx(5.0));
    CHECK(sol.components[1].variance == doctest::Approx(5.0));
    CHECK(sol.components[2].variance == doctest::Approx(2.0));
    CHECK(sol.components[0].support.indices == std::vector<int>{0});
    CHECK(sol.components[1].support.indices == std::vector<int>{1});
    CHECK(sol.components[2].support.indices == std::vector<int>{2});
    CHECK(sol.eps == doctest::Approx(2.0 * 1 * 3.0));

    // Each step honors the prefix-conditional guarantee.
    std::vector<SparseComponent> prefix;
    for (const auto& c : sol.components) {
        OracleResult opt = oracle_kth_optimum(q, 1, prefix);
        REQUIRE(opt.feasible);
        CHECK(c.variance >= opt.value - sol.eps - 1e-8);
        prefix.push_back(c);
    }
}

TEST_CASE("threshold_spca with delta 0 on a dense matrix matches the flat solver") {
    auto q = test::random_psd(5, 33);
    SpcaSolution flat = solve_sequence(q, 2, 5);
    SpcaSolution via_blocks = threshold_spca(q, 2, 0.0, 0.0, 5, BlockSolver::Exact);
    REQUIRE(via_blocks.components.size() == flat.components.size());
    for (std::size_t i = 0; i < flat.components.size(); ++i) {
        CHECK(via_blocks.components[i].support.indices == flat.components[i].support.indices);
        CHECK(via_blocks.components[i].variance ==
              doctest::Approx(flat.components[i].variance).epsilon(1e-12));
    }
}

TEST_CASE("pool keeps emitting when blocks exhaust at different times") {
    SymMatrix q(5);
    auto b0 = test::random_psd(1, 61);
    auto b1 = test::random_psd(4, 62);
    q.set(0, 0, b0(0, 0));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) q.set(1 + i, 1 + j, b1(i, j));
    SpcaSolution sol = threshold_spca(q, 2, 1e-12, 0.0, 5, BlockSolver::Exact);
    CHECK(sol.components.size() == 5);
    CHECK(std::abs(sol.total_variance() - q.trace()) <= 1e-8 * std::max(1.0, q.trace()));
}

TEST_CASE("predicted_cost") {
    SymMatrix q(20);
    for (int b = 0; b < 4; ++b)
        for (int i = 0; i < 5; ++i)
            for (int j = i; j < 5; ++j) q.set(5 * b + i, 5 * b + j, i == j ? 2.0 : 1.0);
    BlockStructure s = block_diagonalize(q, 0.5);
    REQUIRE(s.block_count() == 4);
    auto [full, decomposed] = predicted_cost(s, 3);
    CHECK(full.str() == "1140");
    CHECK(decomposed.str() == "40");

    SUBCASE("single block collapses both counts") {
        auto dense = test::random_psd(6, 9);
        BlockStructure one = block_diagonalize(dense, 0.0);
        auto [f, d] = predicted_cost(one, 2);
        CHECK(f.str() == d.str());
        CHECK(f.str() == "15");
    }
    SUBCASE("p = 1 counts coordinates") {
        auto [f, d] = predicted_cost(s, 1);
        CHECK(f.str() == "20");
        CHECK(d.str() == "20");
    }
}

TEST_CASE("binomials stay exact far beyond 64 bits") {
    CHECK(BigUInt::binomial(100, 50).str() == "100891344545564193334812497256");
    CHECK(BigUInt::binomial(64, 32).str() == "1832624140942590534");
    CHECK(BigUInt::binomial(5, 0).str() == "1");
    CHECK(BigUInt::binomial(5, 6).str() == "0");
}
