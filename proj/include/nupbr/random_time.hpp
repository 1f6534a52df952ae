// Random times, their Azema supermartingales Z and Z~, the fundamental
// martingale m = Z + D^{o,F}, honesty, the progressive enlargement of the
// base filtration, and the two exceptional sets
//   {Z~ = 0, Z_- > 0}   (breaks arbitrage-freeness of stopped models) and
//   {Z~ = 1, Z_- < 1}   (breaks it for the part after an honest time).
// On a discrete grid every stopping time is predictable, so "totally
// inaccessible" and "evanescent" both collapse to these sets being empty.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nupbr/process.hpp"

namespace nupbr {

// tau(omega) in {0..T} or kInfiniteTime. Any outcome->time map qualifies;
// honesty and Z_tau < 1 are properties checked by operations, not assumed.
struct RandomTime {
    std::vector<int> tau;

    int at(int omega) const { return tau[static_cast<std::size_t>(omega)]; }
    bool finite_on(int horizon) const {
        for (int v : tau)
            if (v > horizon) return false;
        return true;
    }
};

struct AzemaData {
    Process Z;       // Z_t = P(tau > t | F_t)
    Process Ztilde;  // Z~_t = P(tau >= t | F_t)
    Process DoF;     // dual optional projection of D = 1_{[tau, infty)}
    Process m;       // Z + D^{o,F}
};

inline AzemaData azema(const RandomTime& time, const Filtration& filt,
                       const FiniteProbSpace& space) {
    const int T = filt.horizon();
    const int n = filt.n_outcomes();
    Process Z(T, n), Zt(T, n), D(T, n);
    for (int t = 0; t <= T; ++t) {
        std::vector<bool> gt(static_cast<std::size_t>(n)), ge(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w) {
            gt[static_cast<std::size_t>(w)] = time.at(w) > t;
            ge[static_cast<std::size_t>(w)] = time.at(w) >= t;
            D.at(t, w) = time.at(w) <= t ? 1 : 0;
        }
        Z.level(t) = cond_prob(gt, filt.at(t), space);
        Zt.level(t) = cond_prob(ge, filt.at(t), space);
    }
    Process dof = dual_optional_projection(D, filt, space);
    Process m = linear_combination(Rational(1), Z, Rational(1), dof);
    return {std::move(Z), std::move(Zt), std::move(dof), std::move(m)};
}

// Progressive enlargement: the atom of G_t containing omega is
// A cap {tau = s} for s <= t, or A cap {tau > t}, with A the F_t-atom.
// This is the smallest filtration containing F that makes tau a stopping
// time; every F-adapted process stays adapted to it.
inline Filtration enlarge(const Filtration& filt, const RandomTime& time) {
    const int n = filt.n_outcomes();
    std::vector<Partition> levels;
    levels.reserve(static_cast<std::size_t>(filt.horizon() + 1));
    for (int t = 0; t <= filt.horizon(); ++t) {
        std::vector<std::vector<int>> blocks;
        for (const auto& block : filt.at(t).blocks()) {
            std::vector<std::vector<int>> split(static_cast<std::size_t>(t + 2));
            for (int omega : block) {
                const int s = time.at(omega);
                if (s > t)
                    split[static_cast<std::size_t>(t + 1)].push_back(omega);
                else
                    split[static_cast<std::size_t>(s)].push_back(omega);
            }
            for (auto& piece : split)
                if (!piece.empty()) blocks.push_back(std::move(piece));
        }
        levels.emplace_back(n, std::move(blocks));
    }
    return Filtration(std::move(levels));
}

struct HonestyCheck {
    bool honest = true;
    int t = -1;               // first violating time
    std::vector<int> atom;    // F_t-atom on which tau takes two values within {tau <= t}
};

// Discrete honesty criterion: for every t and every atom A of F_t, tau is
// constant on A cap {tau <= t}.
inline HonestyCheck is_honest(const RandomTime& time, const Filtration& filt) {
    for (int t = 0; t <= filt.horizon(); ++t) {
        for (const auto& block : filt.at(t).blocks()) {
            std::optional<int> seen;
            for (int omega : block) {
                if (time.at(omega) > t) continue;
                if (!seen)
                    seen = time.at(omega);
                else if (*seen != time.at(omega))
                    return {false, t, block};
            }
        }
    }
    return {};
}

// Z_{tau(omega)}(omega) < 1 for every omega. Requires tau finite on the grid.
inline bool z_tau_less_one(const RandomTime& time, const AzemaData& az) {
    const int T = az.Z.horizon();
    if (!time.finite_on(T))
        throw std::invalid_argument("z_tau_less_one: tau is infinite on some outcome");
    for (int w = 0; w < az.Z.n_outcomes(); ++w)
        if (az.Z.at(time.at(w), w) >= 1) return false;
    return true;
}

struct ExceptionalSets {
    // Grid points (t, omega) with t in {1..T}: jumps live there only, and
    // Z~_0 == 1 identically, so t = 0 can never charge either set.
    std::vector<std::pair<int, int>> before;  // Z~_t = 0 and Z_{t-1} > 0
    std::vector<std::pair<int, int>> after;   // Z~_t = 1 and Z_{t-1} < 1
};

inline ExceptionalSets exceptional_sets(const AzemaData& az) {
    ExceptionalSets out;
    for (int t = 1; t <= az.Z.horizon(); ++t)
        for (int w = 0; w < az.Z.n_outcomes(); ++w) {
            const Rational& zt = az.Ztilde.at(t, w);
            const Rational& zprev = az.Z.at(t - 1, w);
            if (zt == 0 && zprev > 0) out.before.emplace_back(t, w);
            if (zt == 1 && zprev < 1) out.after.emplace_back(t, w);
        }
    return out;
}

}  // namespace nupbr
