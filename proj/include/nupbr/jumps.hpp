// Discrete jump measure of a (possibly vector-valued) process and the
// conditional expectation operator on jump space. For each t >= 1 and each
// atom A of F_{t-1} the jump compensator is the finite map
//   nu({t}, dx)(A) : x -> P(DS_t = x, DS_t != 0 | A).
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nupbr/process.hpp"

namespace nupbr {

using JumpValue = RatVec;  // one entry per asset component

inline JumpValue jump_at(const VectorProcess& s, int t, int omega) {
    JumpValue x;
    x.reserve(s.size());
    for (const auto& comp : s) x.push_back(comp.delta(t, omega));
    return x;
}

inline bool is_zero_jump(const JumpValue& x) {
    for (const auto& c : x)
        if (c != 0) return false;
    return true;
}

class JumpMeasureView {
public:
    struct AtomLaw {
        int t = 0;
        std::vector<int> atom;                 // the F_{t-1}-atom
        std::map<JumpValue, Rational> law;     // x -> P(DS_t = x != 0 | atom)
    };

    explicit JumpMeasureView(std::vector<AtomLaw> laws) : laws_(std::move(laws)) {}

    const std::vector<AtomLaw>& laws() const { return laws_; }

    const AtomLaw* find(int t, int omega, const Filtration& filt) const {
        const int bi = filt.at(t - 1).block_index_of(omega);
        for (const auto& l : laws_)
            if (l.t == t && l.atom == filt.at(t - 1).block(bi)) return &l;
        return nullptr;
    }

    bool empty() const {
        for (const auto& l : laws_)
            if (!l.law.empty()) return false;
        return true;
    }

private:
    std::vector<AtomLaw> laws_;
};

// nu({t}, dx) per F_{t-1}-atom; total mass per (t, atom) is <= 1, with the
// deficit sitting on {DS_t = 0}.
inline JumpMeasureView jump_measure(const VectorProcess& s, const Filtration& filt,
                                    const FiniteProbSpace& space) {
    if (s.empty()) throw std::invalid_argument("jump_measure: empty process");
    std::vector<JumpMeasureView::AtomLaw> laws;
    for (int t = 1; t <= s.front().horizon(); ++t) {
        for (const auto& block : filt.at(t - 1).blocks()) {
            JumpMeasureView::AtomLaw entry;
            entry.t = t;
            entry.atom = block;
            Rational atom_mass = 0;
            for (int omega : block) atom_mass += space.prob(omega);
            for (int omega : block) {
                const JumpValue x = jump_at(s, t, omega);
                if (is_zero_jump(x)) continue;
                entry.law[x] += space.prob(omega) / atom_mass;
            }
            laws.push_back(std::move(entry));
        }
    }
    return JumpMeasureView(std::move(laws));
}

// M^P_mu(W | P~)(t, atom, x) = E[W(t,.,x) 1_{DS_t = x != 0} | atom] / P(DS_t = x != 0 | atom).
// Undefined (nullopt) where the denominator vanishes; never a silent 0.
using JumpFunctional = std::function<Rational(int t, int omega, const JumpValue& x)>;

inline std::optional<Rational> mp_mu_conditional(const JumpFunctional& w, const VectorProcess& s,
                                                 const Filtration& filt,
                                                 const FiniteProbSpace& space, int t,
                                                 int omega_in_atom, const JumpValue& x) {
    if (t < 1 || t > s.front().horizon())
        throw std::invalid_argument("mp_mu_conditional: t outside jump grid");
    if (is_zero_jump(x)) return std::nullopt;
    const auto& block = filt.at(t - 1).block_of(omega_in_atom);
    Rational numer = 0, denom = 0;
    for (int omega : block) {
        if (jump_at(s, t, omega) != x) continue;
        denom += space.prob(omega);
        numer += space.prob(omega) * w(t, omega, x);
    }
    if (denom == 0) return std::nullopt;
    return numer / denom;
}

// The jump coefficient f_m of a martingale m relative to mu_S:
// f_m(t, atom, x) = M^P_mu(Dm | P~)(t, atom, x).
inline std::optional<Rational> jump_coefficient(const Process& m, const VectorProcess& s,
                                                const Filtration& filt,
                                                const FiniteProbSpace& space, int t,
                                                int omega_in_atom, const JumpValue& x) {
    return mp_mu_conditional(
        [&m](int tt, int omega, const JumpValue&) { return m.delta(tt, omega); }, s, filt, space,
        t, omega_in_atom, x);
}

struct SigmaDensityCheck {
    bool ok = true;
    int t = -1;
    std::vector<int> atom;
    Rational residual;  // sum_x x (1 + f_t(x)) nu({t}, dx) on the failing component
    int component = -1;
};

// Exact sigma-martingale-density criterion for a positive martingale Y and
// price process S: per (t, atom), sum_x x (1 + f_t(x)) nu({t}, dx) = 0 where
// 1 + f_t(x) is the conditional mean of Y_t / Y_{t-1} on {DS_t = x}. On a
// finite grid this is equivalent to Y S being a martingale; callers
// cross-check the two routes.
inline SigmaDensityCheck sigma_density_jump_condition(const Process& y, const VectorProcess& s,
                                                      const Filtration& filt,
                                                      const FiniteProbSpace& space) {
    for (int t = 1; t <= s.front().horizon(); ++t) {
        for (const auto& block : filt.at(t - 1).blocks()) {
            // Collect the conditional law of the jump on this atom.
            std::map<JumpValue, Rational> mass, ratio_weighted;
            Rational atom_mass = 0;
            for (int omega : block) atom_mass += space.prob(omega);
            for (int omega : block) {
                const JumpValue x = jump_at(s, t, omega);
                if (is_zero_jump(x)) continue;
                const Rational w = space.prob(omega) / atom_mass;
                mass[x] += w;
                ratio_weighted[x] += w * (y.at(t, omega) / y.at(t - 1, omega));
            }
            const std::size_t dim = s.size();
            for (std::size_t k = 0; k < dim; ++k) {
                Rational residual = 0;
                for (const auto& [x, nu_mass] : mass) {
                    const Rational one_plus_f = ratio_weighted[x] / nu_mass;
                    residual += x[k] * one_plus_f * nu_mass;
                }
                if (residual != 0)
                    return {false, t, block, residual, static_cast<int>(k)};
            }
        }
    }
    return {};
}

}  // namespace nupbr
