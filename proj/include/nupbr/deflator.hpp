// Explicit deflators in the enlarged filtration, built from the Azema data
// of the random time.
//
// Stopped side (any random time): with z = Z_{t-1}, c = D<m>_t,
//   K^G_t = z^2 / (Ztilde_t (z^2 + c))            on {t <= tau}, else 0,
//   DV^G_t = P(Ztilde_t = 0 | F_{t-1})            on {t <= tau}, else 0,
//   mhat   = m^tau - sum_{s <= . ^ tau} Z_{s-1}^{-1} D<m>_s,
//   L^(b)  = E( -(K^G / (1 - DV^G)) (.) mhat )    (optional integral in G).
//
// Part-after side (honest tau with Z_tau < 1): mirror formulas with 1 - z,
// {Ztilde = 1}, the interval ]tau, infty) and a + sign in the exponential.
//
// Both exponentials have conditionally mean-zero increments by construction,
// so they are G-martingales; strict positivity is the theorem being
// machine-checked, and a violation aborts loudly instead of being patched.
#pragma once

#include <stdexcept>
#include <string>

#include "nupbr/random_time.hpp"

namespace nupbr {

struct DeflatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BeforeTauDeflator {
    Process kg;      // K^G, G-optional, 0 off {t <= tau}
    Process vg;      // V^G, nondecreasing, DV^G < 1 pathwise
    Process m_hat;   // G-martingale part of m^tau
    Process ltilde;  // strictly positive G-martingale
};

struct AfterTauDeflator {
    Process ka;      // K^(a), 0 off {t > tau}
    Process wg;      // W^G, nondecreasing, DW^G < 1 pathwise
    Process m_hat;   // mhat^(a) = m - m^tau + correction
    Process ltilde;  // strictly positive G-martingale
};

namespace detail {

inline void require_positive_martingale(const StochasticExponential& exp_result,
                                        const Process& value, const Filtration& enlarged,
                                        const FiniteProbSpace& space, const char* label) {
    if (!exp_result.positive()) {
        const auto [t, w] = exp_result.nonpositive_factors.front();
        throw DeflatorError(std::string(label) + ": positivity fails at t=" + std::to_string(t) +
                            ", omega=" + std::to_string(w) +
                            " (this would falsify the deflator theorem)");
    }
    const MartingaleCheck check = is_martingale(value, enlarged, space);
    if (!check.ok)
        throw DeflatorError(std::string(label) + ": not a martingale at t=" +
                            std::to_string(check.t));
}

}  // namespace detail

inline BeforeTauDeflator build_before(const AzemaData& az, const RandomTime& time,
                                      const Filtration& filt, const Filtration& enlarged,
                                      const FiniteProbSpace& space) {
    const int T = filt.horizon();
    const int n = filt.n_outcomes();
    const Process bracket = angle_bracket(az.m, filt, space);

    Process kg(T, n), vg(T, n), m_hat(T, n);
    for (int w = 0; w < n; ++w) m_hat.at(0, w) = az.m.at(0, w);
    const Process m_stopped = stop(az.m, time.tau);
    for (int t = 1; t <= T; ++t) {
        std::vector<bool> zt_zero(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w)
            zt_zero[static_cast<std::size_t>(w)] = az.Ztilde.at(t, w) == 0;
        const RatVec p_zero = cond_prob(zt_zero, filt.at(t - 1), space);
        for (int w = 0; w < n; ++w) {
            const bool on_stopped_interval = t <= time.at(w);
            vg.at(t, w) = vg.at(t - 1, w);
            m_hat.at(t, w) = m_hat.at(t - 1, w) + m_stopped.delta(t, w);
            if (!on_stopped_interval) continue;
            const Rational& z = az.Z.at(t - 1, w);
            const Rational& zt = az.Ztilde.at(t, w);
            const Rational c = bracket.delta(t, w);
            if (zt <= 0 || z <= 0)
                throw std::logic_error("build_before: inclusion {t<=tau} in {Ztilde>0} broken");
            kg.at(t, w) = (z * z / zt) / (z * z + c);
            vg.at(t, w) += p_zero[static_cast<std::size_t>(w)];
            m_hat.at(t, w) -= c / z;
            if (vg.at(t, w) - vg.at(t - 1, w) >= 1)
                throw std::logic_error("build_before: DV^G >= 1");
        }
    }

    Process integrand(T, n);
    for (int t = 1; t <= T; ++t)
        for (int w = 0; w < n; ++w)
            integrand.at(t, w) = kg.at(t, w) / (1 - (vg.at(t, w) - vg.at(t - 1, w)));
    const Process compensated = optional_integral(integrand, m_hat, enlarged, space);
    Process n_process(T, n);
    for (int t = 1; t <= T; ++t)
        for (int w = 0; w < n; ++w)
            n_process.at(t, w) = n_process.at(t - 1, w) - compensated.delta(t, w);

    const StochasticExponential exp_result = stochastic_exponential(n_process);
    detail::require_positive_martingale(exp_result, exp_result.value, enlarged, space,
                                        "before-tau deflator");
    return {std::move(kg), std::move(vg), std::move(m_hat), exp_result.value};
}

inline AfterTauDeflator build_after(const AzemaData& az, const RandomTime& time,
                                    const Filtration& filt, const Filtration& enlarged,
                                    const FiniteProbSpace& space) {
    const HonestyCheck honesty = is_honest(time, filt);
    if (!honesty.honest)
        throw std::invalid_argument("build_after: tau is not honest (t=" +
                                    std::to_string(honesty.t) + ")");
    if (!z_tau_less_one(time, az))
        throw std::invalid_argument("build_after: Z_tau < 1 fails");

    const int T = filt.horizon();
    const int n = filt.n_outcomes();
    const Process bracket = angle_bracket(az.m, filt, space);

    Process ka(T, n), wg(T, n), m_hat(T, n);
    for (int t = 1; t <= T; ++t) {
        std::vector<bool> zt_one(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w)
            zt_one[static_cast<std::size_t>(w)] = az.Ztilde.at(t, w) == 1;
        const RatVec p_one = cond_prob(zt_one, filt.at(t - 1), space);
        for (int w = 0; w < n; ++w) {
            const bool after_tau = t > time.at(w);
            wg.at(t, w) = wg.at(t - 1, w);
            m_hat.at(t, w) = m_hat.at(t - 1, w);
            if (!after_tau) continue;
            const Rational one_minus_z = 1 - az.Z.at(t - 1, w);
            const Rational one_minus_zt = 1 - az.Ztilde.at(t, w);
            const Rational c = bracket.delta(t, w);
            if (one_minus_zt <= 0 || one_minus_z <= 0)
                throw std::logic_error("build_after: inclusion {t>tau} in {Ztilde<1} broken");
            ka.at(t, w) = (one_minus_z * one_minus_z / one_minus_zt) /
                          (one_minus_z * one_minus_z + c);
            wg.at(t, w) += p_one[static_cast<std::size_t>(w)];
            m_hat.at(t, w) += az.m.delta(t, w) + c / one_minus_z;
            if (wg.at(t, w) - wg.at(t - 1, w) >= 1)
                throw std::logic_error("build_after: DW^G >= 1");
        }
    }

    Process integrand(T, n);
    for (int t = 1; t <= T; ++t)
        for (int w = 0; w < n; ++w)
            integrand.at(t, w) = ka.at(t, w) / (1 - (wg.at(t, w) - wg.at(t - 1, w)));
    const Process n_process = optional_integral(integrand, m_hat, enlarged, space);

    const StochasticExponential exp_result = stochastic_exponential(n_process);
    detail::require_positive_martingale(exp_result, exp_result.value, enlarged, space,
                                        "after-tau deflator");
    return {std::move(ka), std::move(wg), std::move(m_hat), exp_result.value};
}

// ---------------------------------------------------------------------------
// Deflation theorems
// ---------------------------------------------------------------------------

struct DeflationCheck {
    bool condition_holds = false;  // the predictable-projection condition on DM
    bool deflated = false;         // L * (transformed M) is a G-martingale
    // The theorem asserts condition_holds => deflated; a run with
    // condition_holds && !deflated is a falsification event.
    bool theorem_respected() const { return !condition_holds || deflated; }
};

// Condition: p,F(DM 1_{Ztilde=0, Z_- > 0}) == 0; conclusion: L^(b) M^tau is a
// G-martingale.
inline DeflationCheck verify_deflation_before(const Process& m_process,
                                              const BeforeTauDeflator& defl,
                                              const AzemaData& az, const RandomTime& time,
                                              const Filtration& filt, const Filtration& enlarged,
                                              const FiniteProbSpace& space) {
    if (!is_martingale(m_process, filt, space).ok)
        throw std::invalid_argument("verify_deflation_before: M is not an F-martingale");
    DeflationCheck out;
    out.condition_holds = true;
    const int n = filt.n_outcomes();
    for (int t = 1; t <= m_process.horizon(); ++t) {
        RatVec masked(static_cast<std::size_t>(n), Rational(0));
        for (int w = 0; w < n; ++w)
            if (az.Ztilde.at(t, w) == 0 && az.Z.at(t - 1, w) > 0)
                masked[static_cast<std::size_t>(w)] = m_process.delta(t, w);
        for (const auto& v : cond_exp(masked, filt.at(t - 1), space))
            if (v != 0) out.condition_holds = false;
    }
    const Process stopped = stop(m_process, time.tau);
    out.deflated = is_martingale(pointwise_product(defl.ltilde, stopped), enlarged, space).ok;
    return out;
}

// Mirror statement for the part after an honest time, with {Ztilde=1, Z_- < 1}
// and M - M^tau.
inline DeflationCheck verify_deflation_after(const Process& m_process,
                                             const AfterTauDeflator& defl, const AzemaData& az,
                                             const RandomTime& time, const Filtration& filt,
                                             const Filtration& enlarged,
                                             const FiniteProbSpace& space) {
    if (!is_martingale(m_process, filt, space).ok)
        throw std::invalid_argument("verify_deflation_after: M is not an F-martingale");
    DeflationCheck out;
    out.condition_holds = true;
    const int n = filt.n_outcomes();
    for (int t = 1; t <= m_process.horizon(); ++t) {
        RatVec masked(static_cast<std::size_t>(n), Rational(0));
        for (int w = 0; w < n; ++w)
            if (az.Ztilde.at(t, w) == 1 && az.Z.at(t - 1, w) < 1)
                masked[static_cast<std::size_t>(w)] = m_process.delta(t, w);
        for (const auto& v : cond_exp(masked, filt.at(t - 1), space))
            if (v != 0) out.condition_holds = false;
    }
    const Process part_after = after(m_process, time.tau);
    out.deflated = is_martingale(pointwise_product(defl.ltilde, part_after), enlarged, space).ok;
    return out;
}

// ---------------------------------------------------------------------------
// Jump-ratio identities linking the deflators to the one-jump measure changes
// ---------------------------------------------------------------------------

struct JumpRatioCheck {
    bool ok = true;
    int t = -1;
    int omega = -1;
    std::string which;
};

// On {t <= tau}:  Z_{t-1} / Ztilde_t == (1 - DV^G_t) L^(b)_t / L^(b)_{t-1}.
inline JumpRatioCheck jump_ratio_before(const BeforeTauDeflator& before, const AzemaData& az,
                                        const RandomTime& time, const Filtration& filt) {
    (void)filt;
    for (int t = 1; t <= az.Z.horizon(); ++t)
        for (int w = 0; w < az.Z.n_outcomes(); ++w) {
            if (t > time.at(w)) continue;
            const Rational lhs = az.Z.at(t - 1, w) / az.Ztilde.at(t, w);
            const Rational dv = before.vg.at(t, w) - before.vg.at(t - 1, w);
            const Rational rhs = (1 - dv) * before.ltilde.at(t, w) / before.ltilde.at(t - 1, w);
            if (lhs != rhs) return {false, t, w, "before"};
        }
    return {};
}

// On {t > tau}:   (1 - Z_{t-1}) / ((1 - Ztilde_t) P(Ztilde_t < 1 | F_{t-1}))
//                 == L^(a)_t / L^(a)_{t-1}, and the ratio is 1 on {t <= tau}.
inline JumpRatioCheck jump_ratio_after(const AfterTauDeflator& after_defl, const AzemaData& az,
                                       const RandomTime& time, const Filtration& filt,
                                       const FiniteProbSpace& space) {
    const int n = az.Z.n_outcomes();
    for (int t = 1; t <= az.Z.horizon(); ++t) {
        std::vector<bool> zt_lt_one(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w)
            zt_lt_one[static_cast<std::size_t>(w)] = az.Ztilde.at(t, w) < 1;
        const RatVec p_lt_one = cond_prob(zt_lt_one, filt.at(t - 1), space);
        for (int w = 0; w < n; ++w) {
            if (t <= time.at(w)) {
                if (after_defl.ltilde.at(t, w) != after_defl.ltilde.at(t - 1, w))
                    return {false, t, w, "after (ratio not 1 on {t<=tau})"};
                continue;
            }
            const Rational lhs = (1 - az.Z.at(t - 1, w)) /
                                 ((1 - az.Ztilde.at(t, w)) * p_lt_one[static_cast<std::size_t>(w)]);
            const Rational rhs = after_defl.ltilde.at(t, w) / after_defl.ltilde.at(t - 1, w);
            if (lhs != rhs) return {false, t, w, "after"};
        }
    }
    return {};
}

inline JumpRatioCheck jump_ratio_identities(const BeforeTauDeflator& before,
                                            const AfterTauDeflator& after_defl,
                                            const AzemaData& az, const RandomTime& time,
                                            const Filtration& filt,
                                            const FiniteProbSpace& space) {
    const JumpRatioCheck b = jump_ratio_before(before, az, time, filt);
    if (!b.ok) return b;
    return jump_ratio_after(after_defl, az, time, filt, space);
}

}  // namespace nupbr
