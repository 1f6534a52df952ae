#include <catch2/catch_amalgamated.hpp>

#include "nupbr/generator.hpp"
#include "nupbr/model_io.hpp"

using namespace nupbr;

TEST_CASE("generation is reproducible byte for byte") {
    ModelGenParams params;
    params.max_outcomes = 10;
    params.max_horizon = 4;
    params.n_assets = 2;
    params.seed = 12345;
    const Model a = gen_model(params);
    const Model b = gen_model(params);
    CHECK(emit_model(a) == emit_model(b));
    CHECK(model_digest(a) == model_digest(b));

    params.seed = 12346;
    const Model c = gen_model(params);
    CHECK(emit_model(a) != emit_model(c));
}

TEST_CASE("generated models are structurally valid") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        ModelGenParams params;
        params.max_outcomes = 12;
        params.max_horizon = 4;
        params.n_assets = 2;
        params.seed = seed;
        const Model m = gen_model(params);
        REQUIRE(m.space.n_outcomes() >= 2);
        REQUIRE(m.filt.horizon() >= 1);
        REQUIRE(is_adapted(m.assets, m.filt));
        REQUIRE(static_cast<int>(m.tau.tau.size()) == m.space.n_outcomes());
    }
}

TEST_CASE("honest-only generation always yields honest times") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        ModelGenParams params;
        params.max_outcomes = 10;
        params.honest_only = true;
        params.seed = seed;
        const Model m = gen_model(params);
        REQUIRE(is_honest(m.tau, m.filt).honest);
        REQUIRE(m.tau.finite_on(m.filt.horizon()));
    }
}

TEST_CASE("forcing flags bias the critical sets") {
    int before_hits = 0, after_hits = 0;
    const int trials = 150;
    for (std::uint64_t seed = 0; seed < trials; ++seed) {
        ModelGenParams params;
        params.max_outcomes = 8;
        params.seed = seed;
        params.force_before_set = true;
        const Model m = gen_model(params);
        const ExceptionalSets sets = exceptional_sets(azema(m.tau, m.filt, m.space));
        if (!sets.before.empty()) ++before_hits;

        ModelGenParams hp;
        hp.max_outcomes = 8;
        hp.seed = seed;
        hp.honest_only = true;
        hp.force_after_set = true;
        const Model hm = gen_model(hp);
        const ExceptionalSets hsets = exceptional_sets(azema(hm.tau, hm.filt, hm.space));
        if (!hsets.after.empty()) ++after_hits;
    }
    CHECK(before_hits == trials);  // forcing is a hard filter, not a bias
    CHECK(after_hits == trials);
}

TEST_CASE("unsatisfiable constraints surface as a bounded-rejection error") {
    ModelGenParams params;
    params.max_outcomes = 2;
    params.max_horizon = 1;
    params.honest_only = true;
    params.force_before_set = true;  // stopped-side set needs Ztilde = 0 < Z_-;
    params.split_percent = 0;        // with a never-splitting filtration the
    params.f0_split_percent = 0;     // conditioning can never isolate dead outcomes
    params.max_rejections = 60;
    params.seed = 7;
    CHECK_THROWS_AS(gen_model(params), GenerationError);
}

TEST_CASE("helper processes have their stated properties") {
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        ModelGenParams params;
        params.max_outcomes = 9;
        params.max_horizon = 4;
        params.seed = seed;
        const Model m = gen_model(params);
        Rng rng(seed);

        const Process mart = random_martingale(rng, m.filt, m.space);
        REQUIRE(is_adapted(mart, m.filt));
        REQUIRE(is_martingale(mart, m.filt, m.space).ok);

        const Process stair = random_predictable_staircase(rng, m.filt, m.space);
        REQUIRE(is_predictable(stair, m.filt));

        const AzemaData az = azema(m.tau, m.filt, m.space);
        const auto mask = [&](int t, int w) {
            return az.Ztilde.at(t, w) == 0 && az.Z.at(t - 1, w) > 0;
        };
        const Process masked = random_martingale_vanishing_on(rng, m.filt, m.space, mask, true);
        REQUIRE(is_martingale(masked, m.filt, m.space).ok);
        for (int t = 1; t <= m.filt.horizon(); ++t) {
            RatVec vals(static_cast<std::size_t>(m.space.n_outcomes()), Rational(0));
            for (int w = 0; w < m.space.n_outcomes(); ++w)
                if (mask(t, w)) vals[static_cast<std::size_t>(w)] = masked.delta(t, w);
            for (const auto& v : cond_exp(vals, m.filt.at(t - 1), m.space)) REQUIRE(v == 0);
        }
    }
}
