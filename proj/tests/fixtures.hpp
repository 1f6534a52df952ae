// Hand-computed models shared across the test suites. The two-outcome model
// `e1` is worked end to end by hand: every expected value asserted against it
// was derived with pencil-and-paper conditional expectations over the two
// outcomes.
#pragma once

#include "nupbr/generator.hpp"
#include "nupbr/random_time.hpp"

namespace nupbr::testing {

// Two outcomes, uniform, horizon 1, F_1 discrete, tau = (1, 0),
// single asset with S_0 = 0 and DS_1 = (1, -1).
inline Model e1() {
    FiniteProbSpace space({rat(1, 2), rat(1, 2)});
    Filtration filt({Partition::trivial(2), Partition::discrete(2)});
    Process s(1, 2);
    s.at(1, 0) = 1;
    s.at(1, 1) = -1;
    RandomTime tau{{1, 0}};
    return {std::move(space), std::move(filt), {std::move(s)}, std::move(tau)};
}

// Three outcomes over two steps with a non-uniform law; tau is the last
// visit time of an adapted set, hence honest.
inline Model honest3() {
    FiniteProbSpace space({rat(1, 2), rat(1, 4), rat(1, 4)});
    Filtration filt({Partition::trivial(3), Partition(3, {{0}, {1, 2}}), Partition::discrete(3)});
    Process s(2, 3);
    s.at(1, 0) = 1;
    s.at(1, 1) = -1;
    s.at(1, 2) = -1;
    s.at(2, 0) = 1;
    s.at(2, 1) = 0;
    s.at(2, 2) = -2;
    RandomTime tau{{1, 0, 2}};
    return {std::move(space), std::move(filt), {std::move(s)}, std::move(tau)};
}

}  // namespace nupbr::testing
