#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "nupbr/generator.hpp"
#include "nupbr/nupbr.hpp"
#include "nupbr/suites.hpp"

using namespace nupbr;
using nupbr::testing::e1;

TEST_CASE("martingales pass, trending processes fail with a witness") {
    const Model model = e1();
    const Process& s = model.assets.front();

    const NupbrVerdict ok = nupbr_check(s, model.filt, model.space);
    REQUIRE(ok.holds);
    REQUIRE(ok.densities.size() == 1);
    CHECK(ok.densities.front().q.at(0) == 1);
    CHECK(ok.densities.front().q.at(1) == 1);

    // strictly positive increment on a full atom
    Process up(1, 2);
    up.at(1, 0) = 1;
    up.at(1, 1) = 2;
    const NupbrVerdict bad = nupbr_check(up, model.filt, model.space);
    REQUIRE(!bad.holds);
    REQUIRE(bad.witness);
    CHECK(bad.witness->t == 1);
    CHECK(verify_witness(*bad.witness, {up}, Measure::from_space(model.space)).ok);
}

TEST_CASE("worked model: stopped asset arbitrages the enlarged filtration") {
    const Model model = e1();
    const Filtration g = enlarge(model.filt, model.tau);
    const Process stopped = stop(model.assets.front(), model.tau.tau);

    const NupbrVerdict verdict = nupbr_check(stopped, g, model.space);
    REQUIRE(!verdict.holds);
    REQUIRE(verdict.witness);
    CHECK(verdict.witness->t == 1);
    CHECK(verdict.witness->atom == std::vector<int>{0});
    REQUIRE(verdict.witness->h.size() == 1);
    CHECK(verdict.witness->h.front() > 0);

    // under F the asset is fine
    CHECK(nupbr_check(model.assets.front(), model.filt, model.space).holds);
}

TEST_CASE("certificates assemble into an exact deflator") {
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        ModelGenParams params;
        params.max_outcomes = 9;
        params.max_horizon = 3;
        params.n_assets = 2;
        params.seed = seed;
        const Model m = gen_model(params);
        const Measure p = Measure::from_space(m.space);
        const NupbrVerdict verdict = nupbr_check(m.assets, m.filt, p);
        if (verdict.holds) {
            CHECK(verify_holds_certificate(verdict, m.assets, m.filt, p).ok);
            const Deflator defl = deflator_from_densities(verdict, m.assets, m.filt, p);
            REQUIRE(is_martingale(defl.y, m.filt, m.space).ok);
            for (int t = 0; t <= defl.theta.horizon(); ++t)
                for (int w = 0; w < defl.theta.n_outcomes(); ++w) {
                    REQUIRE(defl.theta.at(t, w) > 0);
                    REQUIRE(defl.theta.at(t, w) <= 1);
                }
            REQUIRE(is_predictable(defl.theta, m.filt));
        } else {
            CHECK(verify_witness(*verdict.witness, m.assets, p).ok);
        }
    }
}

TEST_CASE("verdict invariant under outcome permutation") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        ModelGenParams params;
        params.max_outcomes = 7;
        params.max_horizon = 3;
        params.seed = seed;
        const Model m = gen_model(params);
        const bool original = nupbr_check(m.assets, m.filt, m.space).holds;

        // relabel outcomes by a rotation
        const int n = m.space.n_outcomes();
        std::vector<int> perm(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w) perm[static_cast<std::size_t>(w)] = (w + 1) % n;

        RatVec probs(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w)
            probs[static_cast<std::size_t>(perm[static_cast<std::size_t>(w)])] = m.space.prob(w);
        FiniteProbSpace space2(std::move(probs));

        std::vector<Partition> levels;
        for (int t = 0; t <= m.filt.horizon(); ++t) {
            std::vector<std::vector<int>> blocks;
            for (const auto& block : m.filt.at(t).blocks()) {
                std::vector<int> mapped;
                for (int w : block) mapped.push_back(perm[static_cast<std::size_t>(w)]);
                blocks.push_back(std::move(mapped));
            }
            levels.emplace_back(n, std::move(blocks));
        }
        Filtration filt2(std::move(levels));

        VectorProcess assets2;
        for (const auto& comp : m.assets) {
            Process mapped(comp.horizon(), n);
            for (int t = 0; t <= comp.horizon(); ++t)
                for (int w = 0; w < n; ++w)
                    mapped.at(t, perm[static_cast<std::size_t>(w)]) = comp.at(t, w);
            assets2.push_back(std::move(mapped));
        }
        const bool permuted = nupbr_check(assets2, filt2, space2).holds;
        REQUIRE(original == permuted);
    }
}

TEST_CASE("verdict invariant under equivalent reweighting") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        ModelGenParams params;
        params.max_outcomes = 7;
        params.max_horizon = 3;
        params.seed = seed;
        const Model m = gen_model(params);
        Rng rng(seed + 101);
        const int n = m.space.n_outcomes();
        RatVec density(static_cast<std::size_t>(n));
        Rational total = 0;
        for (int w = 0; w < n; ++w) {
            density[static_cast<std::size_t>(w)] = rat(rng.uniform(1, 6));
            total += density[static_cast<std::size_t>(w)] * m.space.prob(w);
        }
        for (auto& d : density) d /= total;
        const Measure q = reweight(m.space, density);
        REQUIRE(q.equivalent());

        const bool under_p = nupbr_check(m.assets, m.filt, m.space).holds;
        const bool under_q = nupbr_check(m.assets, m.filt, q).holds;
        REQUIRE(under_p == under_q);
    }
}

TEST_CASE("absolutely continuous measures restrict the check to their support") {
    // Kill the losing outcome: the surviving one-point market trends upward.
    const Model model = e1();
    const Measure point = reweight(model.space, {rat(2), rat(0)});
    const NupbrVerdict verdict = nupbr_check(model.assets.front(), model.filt, point);
    REQUIRE(!verdict.holds);
    CHECK(verdict.witness->atom == std::vector<int>{0});

    // Killing the winning outcome instead also breaks it (downward trend).
    const Measure other = reweight(model.space, {rat(0), rat(2)});
    CHECK(!nupbr_check(model.assets.front(), model.filt, other).holds);
}

TEST_CASE("predictable FV lemma agrees with the LP on random staircases") {
    int constant_count = 0, moving_count = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        ModelGenParams params;
        params.max_outcomes = 8;
        params.max_horizon = 4;
        params.seed = seed;
        const Model m = gen_model(params);
        Rng rng(seed + 1);
        const Process stair = random_predictable_staircase(rng, m.filt, m.space);
        const PredictableFvCheck check = predictable_fv_check(stair, m.filt, m.space);
        REQUIRE(check.agree());
        (check.constant ? constant_count : moving_count)++;
    }
    // both branches must actually occur
    CHECK(constant_count > 0);
    CHECK(moving_count > 0);

    const Model model = e1();
    CHECK_THROWS(predictable_fv_check(model.assets.front(), model.filt, model.space));
}
