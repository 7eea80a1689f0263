#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ospca/certify.hpp"
#include "ospca/spca_bnb.hpp"

using namespace ospca;

namespace {

// Exhaustive optimum over the supports admitted by a node, via the
// independent per-support oracle.
OracleResult node_oracle(const SymMatrix& q, int p, const std::vector<SparseComponent>& previous,
                         const SupportBounds& node) {
    const int n = q.dim();
    std::vector<std::vector<double>> prev;
    for (const auto& c : previous) prev.push_back(c.embedded());

    OracleResult best;
    std::vector<int> combo(p);
    for (int i = 0; i < p; ++i) combo[i] = i;
    do {
        bool ok = true;
        std::vector<std::uint8_t> chosen(n, 0);
        for (int i : combo) {
            chosen[i] = 1;
            if (node.u[i] == 0) ok = false;
        }
        for (int j = 0; j < n && ok; ++j)
            if (node.l[j] == 1 && chosen[j] == 0) ok = false;
        if (ok) {
            OracleResult r = oracle_support_optimum(q, IndexSet(combo, n), prev);
            if (r.feasible && (!best.feasible || r.value > best.value)) best = r;
        }
    } while (next_combination(combo, n));
    return best;
}

SupportBounds random_node(int n, int p, SplitMix64& rng) {
    while (true) {
        SupportBounds node = SupportBounds::root(n);
        for (int j = 0; j < n; ++j) {
            const int roll = rng.below(4);
            if (roll == 0) node.l[j] = node.u[j] = 1;
            if (roll == 1) node.u[j] = 0;
        }
        if (node.l_count() <= p && node.u_count() >= p) return node;
    }
}

}  // namespace

TEST_CASE("upper bound at the root dominates the known optimum") {
    auto q = test::coupled3();
    double ub = upper_bound(q, 2, {}, SupportBounds::root(3));
    CHECK(ub >= 6.0 - 1e-9);
    CHECK(ub == doctest::Approx(oracle_lambda_max(q.data(), 3)).epsilon(1e-9));
}

TEST_CASE("upper bound on a determined node equals the reduced eigenvalue") {
    auto q = test::coupled3();
    SupportBounds node = SupportBounds::root(3);
    node.u = {1, 1, 0};
    node.l = {1, 1, 0};
    const double ub = upper_bound(q, 2, {}, node);
    ReducedPca r = reduced_pca_on_support(q, IndexSet({0, 1}, 3), std::vector<SparseComponent>{});
    CHECK(ub == doctest::Approx(r.lambda).epsilon(1e-12));
}

TEST_CASE("upper bound on the identity is 1, or 0 once spanned") {
    auto q = test::make_sym({{1, 0}, {0, 1}});
    CHECK(upper_bound(q, 1, {}, SupportBounds::root(2)) == doctest::Approx(1.0));

    SparseComponent e0;
    e0.support = IndexSet({0}, 2);
    e0.values = {1.0};
    e0.variance = 1.0;
    SparseComponent e1;
    e1.support = IndexSet({1}, 2);
    e1.values = {1.0};
    e1.variance = 1.0;
    CHECK(upper_bound(q, 1, {e0, e1}, SupportBounds::root(2)) == doctest::Approx(0.0));
}

TEST_CASE("lower bound at the root of the fixture is 6 on the diagonal-max support") {
    auto q = test::coupled3();
    LowerBoundResult lb = lower_bound(q, 2, {}, SupportBounds::root(3));
    REQUIRE(lb.feasible);
    CHECK(lb.value == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(lb.witness.support.indices == std::vector<int>{0, 1});
}

TEST_CASE("lower bound on a determined node matches the reduced solve") {
    auto q = test::coupled3();
    SupportBounds node = SupportBounds::root(3);
    node.l = {0, 1, 1};
    node.u = {0, 1, 1};
    LowerBoundResult lb = lower_bound(q, 2, {}, node);
    REQUIRE(lb.feasible);
    ReducedPca r = reduced_pca_on_support(q, IndexSet({1, 2}, 3), std::vector<SparseComponent>{});
    CHECK(lb.value == doctest::Approx(r.lambda).epsilon(1e-10));
    CHECK(lb.witness.values[0] == doctest::Approx(r.z[0]));
}

TEST_CASE("lower bound signals nodes whose restrictions span") {
    auto q = test::random_psd(3, 1);
    std::vector<SparseComponent> previous;
    for (int i = 0; i < 2; ++i) {
        SparseComponent c;
        c.support = IndexSet({i}, 3);
        c.values = {1.0};
        c.variance = q(i, i);
        previous.push_back(c);
    }
    SupportBounds node = SupportBounds::root(3);
    node.l = {1, 1, 0};
    node.u = {1, 1, 0};
    LowerBoundResult lb = lower_bound(q, 2, previous, node);
    CHECK_FALSE(lb.feasible);
}

TEST_CASE("bounds are sound on random nodes") {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 4 + rng.below(4);  // 4..7
        const int p = 1 + rng.below(3);
        auto q = test::random_psd(n, 500 + trial);

        std::vector<SparseComponent> previous;
        const int k_prev = rng.below(3);
        for (int k = 0; k < k_prev; ++k)
            previous.push_back(solve_kth_exact(q, p, previous));

        SupportBounds node = random_node(n, p, rng);
        OracleResult opt = node_oracle(q, p, previous, node);
        const double ub = upper_bound(q, p, previous, node);
        LowerBoundResult lb = lower_bound(q, p, previous, node);

        if (opt.feasible) {
            CHECK(ub >= opt.value - 1e-9);
            if (lb.feasible) CHECK(lb.value <= opt.value + 1e-9);
        }
        if (lb.feasible) {
            CHECK(lb.value <= ub + 1e-9);
            auto x = lb.witness.embedded();
            CHECK(std::abs(vec_norm(x) - 1.0) <= 1e-9);
            for (const auto& c : previous)
                CHECK(std::abs(vec_dot(x, c.embedded())) <= 1e-9);
        }
    }
}

TEST_CASE("bnb on the fixture finds the optimum with a tight certificate") {
    auto q = test::coupled3();
    BnbResult r = solve_kth_bnb(q, 2, {}, 0.0);
    CHECK(r.component.variance == doctest::Approx(6.0).epsilon(1e-9));
    CHECK(r.certificate.upper_bound - r.certificate.lower_bound <= 1e-9);
    CHECK(std::abs(r.certificate.lower_bound - r.component.variance) <= 1e-10);
}

TEST_CASE("a tolerance as large as lambda_max stops at the root") {
    auto q = test::coupled3();
    const double lambda = upper_bound(q, 2, {}, SupportBounds::root(3));
    BnbResult r = solve_kth_bnb(q, 2, {}, lambda);
    CHECK(r.component.variance >= lambda - r.certificate.eps - 1e-9);
    CHECK(r.certificate.nodes_explored <= 2);
    CHECK(r.certificate.upper_bound - r.certificate.lower_bound <= lambda);
}

TEST_CASE("eps = 0 reduces to the exhaustive optimum") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto q = test::random_psd(8, seed * 13);
        for (int p : {2, 3}) {
            SparseComponent exact = solve_kth_exact(q, p, {});
            BnbResult bnb = solve_kth_bnb(q, p, {}, 0.0);
            CHECK(bnb.component.variance == doctest::Approx(exact.variance).epsilon(1e-9));
        }
    }
}

TEST_CASE("sequences stay eps-close to the oracle at every step") {
    for (double eps : {0.0, 0.01, 0.1}) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            auto q = test::random_psd(6, 777 + seed);
            const int p = 2;
            std::vector<BnbCertificate> certs;
            SpcaSolution sol = solve_sequence_bnb(q, p, 6, eps, nullptr, &certs);
            REQUIRE(certs.size() == 6);

            std::vector<SparseComponent> prefix;
            for (int k = 0; k < 6; ++k) {
                OracleResult opt = oracle_kth_optimum(q, p, prefix);
                const auto& c = sol.components[k];
                if (opt.feasible && !c.sparsity_relaxed) {
                    CHECK(opt.value - c.variance <= eps + 1e-9);
                    CHECK(c.variance <= opt.value + 1e-9);
                }
                CHECK(certs[k].upper_bound - certs[k].lower_bound <= eps + 1e-15);
                prefix.push_back(c);
            }

            std::vector<std::vector<double>> xs;
            for (const auto& c : sol.components) xs.push_back(c.embedded());
            for (std::size_t i = 0; i < xs.size(); ++i)
                for (std::size_t j = i + 1; j < xs.size(); ++j)
                    CHECK(std::abs(vec_dot(xs[i], xs[j])) <= 1e-9);
        }
    }
}

TEST_CASE("single-index problems terminate without branching") {
    SymMatrix q(1);
    q.set(0, 0, 4.0);
    BnbResult r = solve_kth_bnb(q, 1, {}, 0.0);
    CHECK(r.component.variance == doctest::Approx(4.0));
    CHECK(r.component.support.indices == std::vector<int>{0});
}
