#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "nupbr/generator.hpp"
#include "nupbr/jumps.hpp"
#include "nupbr/nupbr.hpp"
#include "nupbr/random_time.hpp"

using namespace nupbr;
using nupbr::testing::e1;

TEST_CASE("jump measure of a constant process is empty") {
    const Model model = e1();
    const Process flat = constant_process(1, 2, rat(7));
    CHECK(jump_measure({flat}, model.filt, model.space).empty());
}

TEST_CASE("jump measure of the worked model") {
    const Model model = e1();
    const JumpMeasureView nu = jump_measure(model.assets, model.filt, model.space);
    const auto* law = nu.find(1, 0, model.filt);
    REQUIRE(law);
    CHECK(law->law.at({rat(1)}) == rat(1, 2));
    CHECK(law->law.at({rat(-1)}) == rat(1, 2));
}

TEST_CASE("conditional jump expectation: unit functional, undefined off-support") {
    const Model model = e1();
    const auto one = [](int, int, const JumpValue&) { return rat(1); };
    const auto at_one = mp_mu_conditional(one, model.assets, model.filt, model.space, 1, 0,
                                          {rat(1)});
    REQUIRE(at_one);
    CHECK(*at_one == 1);

    // value never attained: explicitly undefined, not zero
    CHECK(!mp_mu_conditional(one, model.assets, model.filt, model.space, 1, 0, {rat(5)}));
    // zero jump is off the jump measure by definition
    CHECK(!mp_mu_conditional(one, model.assets, model.filt, model.space, 1, 0, {rat(0)}));
}

TEST_CASE("jump coefficient of the fundamental martingale") {
    const Model model = e1();
    const AzemaData az = azema(model.tau, model.filt, model.space);
    // E[Dm_1 1_{DS_1 = 1}] / P(DS_1 = 1) = (1/2) on the trivial atom
    const auto fm = jump_coefficient(az.m, model.assets, model.filt, model.space, 1, 0, {rat(1)});
    REQUIRE(fm);
    CHECK(*fm == rat(1, 2));
}

TEST_CASE("sigma-density criterion cross-checks the product martingale test") {
    const Model model = e1();
    const Process& s = model.assets.front();
    const Process one = constant_process(1, 2, rat(1));
    CHECK(sigma_density_jump_condition(one, {s}, model.filt, model.space).ok);

    Process drift(1, 2);
    drift.at(1, 0) = 1;
    drift.at(1, 1) = 2;
    CHECK(!sigma_density_jump_condition(one, {drift}, model.filt, model.space).ok);

    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        ModelGenParams params;
        params.max_outcomes = 8;
        params.max_horizon = 3;
        params.n_assets = 2;
        params.seed = seed;
        const Model m = gen_model(params);
        const Measure p = Measure::from_space(m.space);
        const NupbrVerdict verdict = nupbr_check(m.assets, m.filt, p);
        if (!verdict.holds) continue;
        const Deflator defl = deflator_from_densities(verdict, m.assets, m.filt, p);
        // deflators produced by the LP satisfy the jump-density equation...
        REQUIRE(sigma_density_jump_condition(defl.y, m.assets, m.filt, m.space).ok);
        // ...and the two routes agree: Y * S^k is a martingale per component.
        for (const auto& comp : m.assets)
            REQUIRE(is_martingale(pointwise_product(defl.y, comp), m.filt, m.space).ok);
    }
}
