// Deterministic random-model generation. Identical (seed, params) reproduce
// the identical model byte for byte: the engine is std::mt19937_64 (whose
// output sequence is fixed by the standard) and every draw goes through the
// modulo reduction below, never through implementation-defined distributions.
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nupbr/measures.hpp"
#include "nupbr/random_time.hpp"

namespace nupbr {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Inclusive bounds. Modulo bias is irrelevant here; cross-platform
    // reproducibility is what matters.
    int uniform(int lo, int hi) {
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    bool chance(int percent) { return uniform(1, 100) <= percent; }

    Rational small_rational(int max_abs_num, int max_den) {
        const int num = uniform(-max_abs_num, max_abs_num);
        const int den = uniform(1, max_den);
        return rat(num, den);
    }

private:
    std::mt19937_64 eng_;
};

struct ModelGenParams {
    int max_outcomes = 12;
    int max_horizon = 4;
    int n_assets = 1;
    int split_percent = 70;      // branching profile: chance a block splits per step
    int f0_split_percent = 20;   // chance of a nontrivial F_0
    int martingale_percent = 40; // chance an asset is drift-free by construction
    int infinite_tau_percent = 15;  // only without honest_only
    bool honest_only = false;
    bool force_before_set = false;
    bool force_after_set = false;
    std::uint64_t seed = 0;
    int max_rejections = 4000;
};

struct Model {
    FiniteProbSpace space;
    Filtration filt;
    VectorProcess assets;
    RandomTime tau;
};

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline FiniteProbSpace random_space(Rng& rng, int n) {
    std::vector<int> weights(static_cast<std::size_t>(n));
    long long total = 0;
    for (auto& w : weights) {
        w = rng.uniform(1, 6);
        total += w;
    }
    RatVec p(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = rat(weights[i], total);
    return FiniteProbSpace(std::move(p));
}

inline Partition random_refinement(Rng& rng, const Partition& coarse, int split_percent) {
    std::vector<std::vector<int>> blocks;
    for (const auto& block : coarse.blocks()) {
        if (block.size() < 2 || !rng.chance(split_percent)) {
            blocks.push_back(block);
            continue;
        }
        std::vector<int> left, right;
        for (int omega : block) (rng.chance(50) ? left : right).push_back(omega);
        if (left.empty() || right.empty()) {
            // forced two-sided split: move one element across
            if (left.empty()) {
                left.push_back(right.back());
                right.pop_back();
            } else {
                right.push_back(left.back());
                left.pop_back();
            }
        }
        blocks.push_back(std::move(left));
        blocks.push_back(std::move(right));
    }
    return Partition(coarse.n_outcomes(), std::move(blocks));
}

inline Filtration random_filtration(Rng& rng, int n, int horizon, int split_percent,
                                    int f0_split_percent) {
    std::vector<Partition> levels;
    Partition current = Partition::trivial(n);
    if (n >= 2 && rng.chance(f0_split_percent))
        current = random_refinement(rng, current, 100);
    levels.push_back(current);
    for (int t = 1; t <= horizon; ++t) {
        current = random_refinement(rng, current, split_percent);
        levels.push_back(current);
    }
    return Filtration(std::move(levels));
}

// Value table constant on the given partition's atoms.
inline RatVec random_measurable(Rng& rng, const Partition& pi, int max_abs_num, int max_den) {
    RatVec out(static_cast<std::size_t>(pi.n_outcomes()));
    for (const auto& block : pi.blocks()) {
        const Rational v = rng.small_rational(max_abs_num, max_den);
        for (int omega : block) out[static_cast<std::size_t>(omega)] = v;
    }
    return out;
}

inline Process random_adapted_process(Rng& rng, const Filtration& filt,
                                      const FiniteProbSpace& space, bool drift_free) {
    const int T = filt.horizon();
    const int n = filt.n_outcomes();
    Process out(T, n);
    out.level(0) = random_measurable(rng, filt.at(0), 3, 2);
    for (int t = 1; t <= T; ++t) {
        RatVec incr = random_measurable(rng, filt.at(t), 2, 2);
        if (drift_free) {
            const RatVec mean = cond_exp(incr, filt.at(t - 1), space);
            for (std::size_t w = 0; w < incr.size(); ++w) incr[w] -= mean[w];
        }
        for (int w = 0; w < n; ++w)
            out.at(t, w) = out.at(t - 1, w) + incr[static_cast<std::size_t>(w)];
    }
    return out;
}

inline RandomTime random_tau(Rng& rng, const Filtration& filt, int infinite_percent) {
    const int n = filt.n_outcomes();
    RandomTime out{std::vector<int>(static_cast<std::size_t>(n))};
    for (int w = 0; w < n; ++w)
        out.tau[static_cast<std::size_t>(w)] =
            rng.chance(infinite_percent) ? kInfiniteTime : rng.uniform(0, filt.horizon());
    return out;
}

// Last visit time of a randomly chosen adapted set: the canonical honest-time
// construction (sup of the empty set is 0).
inline RandomTime random_honest_tau(Rng& rng, const Filtration& filt) {
    const int n = filt.n_outcomes();
    RandomTime out{std::vector<int>(static_cast<std::size_t>(n), 0)};
    for (int t = 0; t <= filt.horizon(); ++t)
        for (const auto& block : filt.at(t).blocks())
            if (rng.chance(45))
                for (int omega : block) out.tau[static_cast<std::size_t>(omega)] = t;
    return out;
}

}  // namespace detail

inline Model gen_model(const ModelGenParams& params) {
    if (params.max_outcomes < 2) throw GenerationError("gen_model: need at least 2 outcomes");
    Rng rng(params.seed);
    for (int attempt = 0; attempt < params.max_rejections; ++attempt) {
        const int n = rng.uniform(2, params.max_outcomes);
        const int horizon = rng.uniform(1, params.max_horizon);
        FiniteProbSpace space = detail::random_space(rng, n);
        Filtration filt = detail::random_filtration(rng, n, horizon, params.split_percent,
                                                    params.f0_split_percent);
        RandomTime tau = params.honest_only
                             ? detail::random_honest_tau(rng, filt)
                             : detail::random_tau(rng, filt, params.infinite_tau_percent);

        const AzemaData az = azema(tau, filt, space);
        if (params.honest_only && !z_tau_less_one(tau, az)) continue;
        if (params.force_before_set || params.force_after_set) {
            const ExceptionalSets sets = exceptional_sets(az);
            if (params.force_before_set && sets.before.empty()) continue;
            if (params.force_after_set && sets.after.empty()) continue;
        }

        VectorProcess assets;
        for (int k = 0; k < params.n_assets; ++k)
            assets.push_back(detail::random_adapted_process(
                rng, filt, space, rng.chance(params.martingale_percent)));
        return {std::move(space), std::move(filt), std::move(assets), std::move(tau)};
    }
    throw GenerationError("gen_model: constraints unsatisfied after " +
                          std::to_string(params.max_rejections) + " rejections (seed " +
                          std::to_string(params.seed) + ")");
}

// xi - E[xi | F_{T-}]: conditionally centered payoff for single-jump tests.
inline RatVec center_before_time(const RatVec& xi, const PredictableTime& time,
                                 const Filtration& filt, const FiniteProbSpace& space) {
    const RatVec mean = cond_exp_before_time(xi, time, filt, space);
    RatVec out(xi.size());
    for (std::size_t w = 0; w < xi.size(); ++w) out[w] = xi[w] - mean[w];
    return out;
}

inline Process random_martingale(Rng& rng, const Filtration& filt, const FiniteProbSpace& space) {
    return detail::random_adapted_process(rng, filt, space, true);
}

inline Process random_adapted(Rng& rng, const Filtration& filt, const FiniteProbSpace& space) {
    return detail::random_adapted_process(rng, filt, space, false);
}

// Martingale whose increments satisfy E[DM 1_mask | F_{t-1}] = 0 exactly:
// either DM vanishes on the masked outcomes, or (with allow_cancelling and
// at least two masked F_t-atoms in the same F_{t-1}-atom) the masked values
// cancel among themselves. The mask must be constant on F_t-atoms.
inline Process random_martingale_vanishing_on(Rng& rng, const Filtration& filt,
                                              const FiniteProbSpace& space,
                                              const std::function<bool(int t, int omega)>& mask,
                                              bool allow_cancelling = false) {
    const int T = filt.horizon();
    const int n = filt.n_outcomes();
    Process out(T, n);
    out.level(0) = detail::random_measurable(rng, filt.at(0), 2, 2);
    for (int t = 1; t <= T; ++t) {
        RatVec incr(static_cast<std::size_t>(n), Rational(0));
        for (const auto& coarse : filt.at(t - 1).blocks()) {
            std::vector<const std::vector<int>*> masked, unmasked;
            for (const auto& fine : filt.at(t).blocks()) {
                if (filt.at(t - 1).block_index_of(fine.front()) !=
                    filt.at(t - 1).block_index_of(coarse.front()))
                    continue;
                (mask(t, fine.front()) ? masked : unmasked).push_back(&fine);
            }
            const auto fill_centered = [&](const std::vector<const std::vector<int>*>& part) {
                Rational mass = 0, weighted = 0;
                for (const auto* fine : part) {
                    const Rational v = rng.small_rational(2, 2);
                    for (int omega : *fine) {
                        incr[static_cast<std::size_t>(omega)] = v;
                        mass += space.prob(omega);
                        weighted += space.prob(omega) * v;
                    }
                }
                if (mass == 0) return;
                const Rational mean = weighted / mass;
                for (const auto* fine : part)
                    for (int omega : *fine) incr[static_cast<std::size_t>(omega)] -= mean;
            };
            fill_centered(unmasked);
            if (allow_cancelling && masked.size() >= 2) fill_centered(masked);
        }
        for (int w = 0; w < n; ++w) out.at(t, w) = out.at(t - 1, w) + incr[static_cast<std::size_t>(w)];
    }
    return out;
}

// Predictable staircase: X_0 is F_0-measurable, each later increment is
// F_{t-1}-measurable (often zero).
inline Process random_predictable_staircase(Rng& rng, const Filtration& filt,
                                            const FiniteProbSpace& space) {
    (void)space;
    const int T = filt.horizon();
    const int n = filt.n_outcomes();
    Process out(T, n);
    out.level(0) = detail::random_measurable(rng, filt.at(0), 2, 2);
    for (int t = 1; t <= T; ++t) {
        RatVec incr = rng.chance(50)
                          ? RatVec(static_cast<std::size_t>(n), Rational(0))
                          : detail::random_measurable(rng, filt.at(t - 1), 2, 2);
        for (int w = 0; w < n; ++w)
            out.at(t, w) = out.at(t - 1, w) + incr[static_cast<std::size_t>(w)];
    }
    return out;
}

inline RatVec random_payoff(Rng& rng, const Filtration& filt, const PredictableTime& time) {
    // F_T-measurable for a predictable time T: constant on F_{T(omega)}-atoms.
    const int n = filt.n_outcomes();
    RatVec out(static_cast<std::size_t>(n));
    std::vector<bool> done(static_cast<std::size_t>(n), false);
    for (int w = 0; w < n; ++w) {
        if (done[static_cast<std::size_t>(w)]) continue;
        const auto& block = filt.at(time.at(w)).block_of(w);
        const Rational v = rng.small_rational(2, 2);
        for (int omega : block) {
            out[static_cast<std::size_t>(omega)] = v;
            done[static_cast<std::size_t>(omega)] = true;
        }
    }
    return out;
}

}  // namespace nupbr
