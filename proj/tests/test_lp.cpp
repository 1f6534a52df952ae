#include <catch2/catch_amalgamated.hpp>

#include "nupbr/generator.hpp"
#include "nupbr/lp.hpp"

using namespace nupbr;

TEST_CASE("simplex solves a textbook maximum") {
    // max 3x + 2y s.t. x + y + s1 = 4, x + 3y + s2 = 6, all >= 0
    const LpResult res = lp_solve_max(
        {{rat(1), rat(1), rat(1), rat(0)}, {rat(1), rat(3), rat(0), rat(1)}},
        {rat(4), rat(6)}, {rat(3), rat(2), rat(0), rat(0)});
    REQUIRE(res.status == LpStatus::optimal);
    CHECK(res.objective == 12);
    CHECK(res.x[0] == 4);
    CHECK(res.x[1] == 0);
}

TEST_CASE("simplex detects infeasibility") {
    // x + y = -1 with x, y >= 0
    const LpResult res = lp_solve_max({{rat(1), rat(1)}}, {rat(-1)}, {rat(0), rat(0)});
    CHECK(res.status == LpStatus::infeasible);
}

TEST_CASE("simplex detects unboundedness") {
    // max x s.t. x - y = 0 (ray x = y -> infinity)
    const LpResult res = lp_solve_max({{rat(1), rat(-1)}}, {rat(0)}, {rat(1), rat(0)});
    CHECK(res.status == LpStatus::unbounded);
}

TEST_CASE("simplex handles redundant rows and negative rhs") {
    // duplicated constraint plus a sign flip: x + y = 2 twice, -x - y = -2
    const LpResult res = lp_solve_max(
        {{rat(1), rat(1)}, {rat(1), rat(1)}, {rat(-1), rat(-1)}},
        {rat(2), rat(2), rat(-2)}, {rat(1), rat(0)});
    REQUIRE(res.status == LpStatus::optimal);
    CHECK(res.objective == 2);
}

TEST_CASE("degenerate pivoting terminates (Bland)") {
    // A classic degenerate configuration: several zero-rhs rows.
    const LpResult res = lp_solve_max(
        {{rat(1), rat(-1), rat(1), rat(0)},
         {rat(1), rat(1), rat(0), rat(1)},
         {rat(1), rat(0), rat(0), rat(0)}},
        {rat(0), rat(0), rat(0)}, {rat(1), rat(1), rat(0), rat(0)});
    REQUIRE(res.status == LpStatus::optimal);
    CHECK(res.objective == 0);
}

TEST_CASE("random feasibility problems: solutions verify exactly") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng rng(seed);
        const int m = rng.uniform(1, 4);
        const int n = rng.uniform(m, m + 5);
        std::vector<RatVec> a(static_cast<std::size_t>(m),
                              RatVec(static_cast<std::size_t>(n)));
        RatVec c(static_cast<std::size_t>(n));
        for (auto& row : a)
            for (auto& v : row) v = rat(rng.uniform(-3, 3));
        for (auto& v : c) v = rat(rng.uniform(-2, 2));
        // build b from a known nonnegative point so the LP is feasible
        RatVec x0(static_cast<std::size_t>(n));
        for (auto& v : x0) v = rat(rng.uniform(0, 3));
        RatVec b(static_cast<std::size_t>(m), Rational(0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                b[static_cast<std::size_t>(i)] +=
                    a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                    x0[static_cast<std::size_t>(j)];

        const LpResult res = lp_solve_max(a, b, c);
        REQUIRE(res.status != LpStatus::infeasible);
        if (res.status != LpStatus::optimal) continue;
        // exact feasibility of the reported optimum
        for (int i = 0; i < m; ++i) {
            Rational lhs = 0;
            for (int j = 0; j < n; ++j)
                lhs += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                       res.x[static_cast<std::size_t>(j)];
            REQUIRE(lhs == b[static_cast<std::size_t>(i)]);
        }
        for (const auto& v : res.x) REQUIRE(v >= 0);
        // optimality sanity: at least as good as the seed point
        Rational seed_obj = 0, opt_obj = 0;
        for (int j = 0; j < n; ++j) {
            seed_obj += c[static_cast<std::size_t>(j)] * x0[static_cast<std::size_t>(j)];
            opt_obj += c[static_cast<std::size_t>(j)] * res.x[static_cast<std::size_t>(j)];
        }
        REQUIRE(opt_obj == res.objective);
        REQUIRE(opt_obj >= seed_obj);
    }
}
