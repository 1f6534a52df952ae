#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "nupbr/deflator.hpp"
#include "nupbr/generator.hpp"

using namespace nupbr;
using nupbr::testing::e1;
using nupbr::testing::honest3;

namespace {

struct Built {
    Model model;
    AzemaData az;
    Filtration g;
};

Built build(Model model) {
    AzemaData az = azema(model.tau, model.filt, model.space);
    Filtration g = enlarge(model.filt, model.tau);
    return {std::move(model), std::move(az), std::move(g)};
}

Model honest_model(std::uint64_t seed, bool force_after = false) {
    ModelGenParams params;
    params.max_outcomes = 9;
    params.max_horizon = 4;
    params.honest_only = true;
    params.force_after_set = force_after;
    params.seed = seed;
    return gen_model(params);
}

}  // namespace

TEST_CASE("before-tau deflator on the worked model") {
    const Built b = build(e1());
    const BeforeTauDeflator defl = build_before(b.az, b.model.tau, b.model.filt, b.g, b.model.space);

    // K^G_1(omega_0) = (1/4 * 1) / (1/4 + 1/4) = 1/2; zero where tau has passed
    CHECK(defl.kg.at(1, 0) == rat(1, 2));
    CHECK(defl.kg.at(1, 1) == 0);
    // DV^G_1 = P(Ztilde_1 = 0 | F_0) = 1/2 on {1 <= tau}
    CHECK(defl.vg.at(1, 0) == rat(1, 2));
    CHECK(defl.vg.at(1, 1) == 0);
    // Dmhat_1 = Dm_1 - Z_0^{-1} D<m>_1 = 1/2 - 2 * 1/4 = 0 on omega_0
    CHECK(defl.m_hat.at(1, 0) == defl.m_hat.at(0, 0));
    // and the resulting exponential is identically 1 here
    CHECK(defl.ltilde.at(1, 0) == 1);
    CHECK(defl.ltilde.at(1, 1) == 1);
}

TEST_CASE("tau never happening gives the unit deflator") {
    Model model = e1();
    model.tau = RandomTime{{kInfiniteTime, kInfiniteTime}};
    const Built b = build(std::move(model));
    const BeforeTauDeflator defl = build_before(b.az, b.model.tau, b.model.filt, b.g, b.model.space);
    CHECK(defl.kg.at(1, 0) == 1);  // Z == 1, bracket == 0
    CHECK(defl.vg.at(1, 0) == 0);
    CHECK(defl.ltilde.at(1, 0) == 1);
    CHECK(defl.ltilde.at(1, 1) == 1);
}

TEST_CASE("before-tau deflator: positive martingale on random models") {
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        ModelGenParams params;
        params.max_outcomes = 10;
        params.max_horizon = 4;
        params.seed = seed;
        params.force_before_set = (seed % 2 == 1);
        const Built b = build(gen_model(params));
        const BeforeTauDeflator defl =
            build_before(b.az, b.model.tau, b.model.filt, b.g, b.model.space);
        for (int t = 0; t <= b.model.filt.horizon(); ++t)
            for (int w = 0; w < b.model.space.n_outcomes(); ++w)
                REQUIRE(defl.ltilde.at(t, w) > 0);
        REQUIRE(is_martingale(defl.ltilde, b.g, b.model.space).ok);
        // DV^G < 1 pathwise
        for (int t = 1; t <= b.model.filt.horizon(); ++t)
            for (int w = 0; w < b.model.space.n_outcomes(); ++w)
                REQUIRE(defl.vg.at(t, w) - defl.vg.at(t - 1, w) < 1);
        // mhat is a G-martingale
        REQUIRE(is_martingale(defl.m_hat, b.g, b.model.space).ok);
    }
}

TEST_CASE("deflation theorem, stopped side") {
    // Worked model: condition fails for the asset, and deflation fails with it
    const Built b = build(e1());
    const BeforeTauDeflator defl = build_before(b.az, b.model.tau, b.model.filt, b.g, b.model.space);
    const DeflationCheck check = verify_deflation_before(b.model.assets.front(), defl, b.az,
                                                         b.model.tau, b.model.filt, b.g,
                                                         b.model.space);
    CHECK(!check.condition_holds);
    CHECK(!check.deflated);
    CHECK(check.theorem_respected());

    // constants always deflate
    const DeflationCheck trivial = verify_deflation_before(
        constant_process(1, 2, rat(3)), defl, b.az, b.model.tau, b.model.filt, b.g, b.model.space);
    CHECK(trivial.condition_holds);
    CHECK(trivial.deflated);

    // non-martingale inputs are rejected
    Process drift(1, 2);
    drift.at(1, 0) = 1;
    drift.at(1, 1) = 2;
    CHECK_THROWS(verify_deflation_before(drift, defl, b.az, b.model.tau, b.model.filt, b.g,
                                         b.model.space));

    // random martingales honouring the condition always deflate; ones that
    // charge the critical set are reported without expectation
    int condition_cases = 0, charged_cases = 0;
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        ModelGenParams params;
        params.max_outcomes = 9;
        params.max_horizon = 4;
        params.seed = seed;
        params.force_before_set = (seed % 2 == 1);
        const Built m = build(gen_model(params));
        const BeforeTauDeflator d = build_before(m.az, m.model.tau, m.model.filt, m.g, m.model.space);
        Rng rng(seed + 31);

        const auto mask = [&](int t, int w) {
            return m.az.Ztilde.at(t, w) == 0 && m.az.Z.at(t - 1, w) > 0;
        };
        const Process good = random_martingale_vanishing_on(rng, m.model.filt, m.model.space, mask,
                                                            rng.chance(50));
        const DeflationCheck ok = verify_deflation_before(good, d, m.az, m.model.tau, m.model.filt,
                                                          m.g, m.model.space);
        REQUIRE(ok.condition_holds);
        REQUIRE(ok.deflated);
        ++condition_cases;

        const Process any = random_martingale(rng, m.model.filt, m.model.space);
        const DeflationCheck raw = verify_deflation_before(any, d, m.az, m.model.tau, m.model.filt,
                                                           m.g, m.model.space);
        REQUIRE(raw.theorem_respected());
        if (!raw.condition_holds) ++charged_cases;
    }
    CHECK(condition_cases > 0);
    CHECK(charged_cases > 0);
}

TEST_CASE("after-tau deflator requires its preconditions") {
    const Built b = build(e1());
    // dishonest time on a three-outcome space
    FiniteProbSpace space({rat(1, 3), rat(1, 3), rat(1, 3)});
    Filtration filt({Partition::trivial(3), Partition(3, {{0}, {1, 2}})});
    RandomTime dishonest{{1, 0, 1}};
    const AzemaData az = azema(dishonest, filt, space);
    const Filtration g = enlarge(filt, dishonest);
    CHECK_THROWS_AS(build_after(az, dishonest, filt, g, space), std::invalid_argument);

    RandomTime never{{kInfiniteTime, kInfiniteTime}};
    const AzemaData az2 = azema(never, b.model.filt, b.model.space);
    const Filtration g2 = enlarge(b.model.filt, never);
    CHECK_THROWS(build_after(az2, never, b.model.filt, g2, b.model.space));
}

TEST_CASE("after-tau deflator: positive martingale on honest models") {
    int with_wg_jump = 0;
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        const Built b = build(honest_model(seed, seed % 2 == 1));
        const AfterTauDeflator defl =
            build_after(b.az, b.model.tau, b.model.filt, b.g, b.model.space);
        for (int t = 0; t <= b.model.filt.horizon(); ++t)
            for (int w = 0; w < b.model.space.n_outcomes(); ++w)
                REQUIRE(defl.ltilde.at(t, w) > 0);
        REQUIRE(is_martingale(defl.ltilde, b.g, b.model.space).ok);
        REQUIRE(is_martingale(defl.m_hat, b.g, b.model.space).ok);
        for (int t = 1; t <= b.model.filt.horizon(); ++t)
            for (int w = 0; w < b.model.space.n_outcomes(); ++w) {
                const Rational dw = defl.wg.at(t, w) - defl.wg.at(t - 1, w);
                REQUIRE(dw < 1);
                REQUIRE(dw >= 0);
                if (dw > 0) ++with_wg_jump;
            }
    }
    CHECK(with_wg_jump > 0);  // the (1 - DW^G)^{-1} branch is actually exercised
}

TEST_CASE("deflation theorem, after side") {
    int charged = 0;
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        const Built b = build(honest_model(seed, seed % 2 == 1));
        const AfterTauDeflator defl =
            build_after(b.az, b.model.tau, b.model.filt, b.g, b.model.space);
        Rng rng(seed + 77);

        const auto mask = [&](int t, int w) {
            return b.az.Ztilde.at(t, w) == 1 && b.az.Z.at(t - 1, w) < 1;
        };
        const Process good = random_martingale_vanishing_on(rng, b.model.filt, b.model.space, mask,
                                                            rng.chance(50));
        const DeflationCheck ok = verify_deflation_after(good, defl, b.az, b.model.tau,
                                                         b.model.filt, b.g, b.model.space);
        REQUIRE(ok.condition_holds);
        REQUIRE(ok.deflated);

        const Process any = random_martingale(rng, b.model.filt, b.model.space);
        const DeflationCheck raw = verify_deflation_after(any, defl, b.az, b.model.tau,
                                                          b.model.filt, b.g, b.model.space);
        REQUIRE(raw.theorem_respected());
        if (!raw.condition_holds) ++charged;
    }
    CHECK(charged > 0);
}

TEST_CASE("jump-ratio identities hold at every grid point") {
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        const Built b = build(honest_model(seed, seed % 2 == 1));
        const BeforeTauDeflator before =
            build_before(b.az, b.model.tau, b.model.filt, b.g, b.model.space);
        const AfterTauDeflator after_defl =
            build_after(b.az, b.model.tau, b.model.filt, b.g, b.model.space);
        const JumpRatioCheck check = jump_ratio_identities(before, after_defl, b.az, b.model.tau,
                                                           b.model.filt, b.model.space);
        REQUIRE(check.ok);
    }

    // hand check on the worked model, stopped side at (t=1, omega_0):
    const Built b = build(e1());
    const BeforeTauDeflator defl = build_before(b.az, b.model.tau, b.model.filt, b.g, b.model.space);
    const Rational lhs = b.az.Z.at(0, 0) / b.az.Ztilde.at(1, 0);
    const Rational dv = defl.vg.at(1, 0) - defl.vg.at(0, 0);
    const Rational rhs = (1 - dv) * defl.ltilde.at(1, 0) / defl.ltilde.at(0, 0);
    CHECK(lhs == rat(1, 2));
    CHECK(lhs == rhs);
}
