// One-jump measure changes attached to a predictable stopping time T, and
// the exact three-way equivalences they satisfy for single-jump martingales.
// Each density is built atom-wise from the Azema data; the constructors
// assert the self-normalization the formulas promise.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nupbr/random_time.hpp"

namespace nupbr {

// Predictable stopping time on the grid: {T = t} is an F_{t-1}-event, values
// in {1..horizon}. A deterministic grid time is the constant map.
struct PredictableTime {
    std::vector<int> value;

    static PredictableTime deterministic(int t, int n_outcomes) {
        return {std::vector<int>(static_cast<std::size_t>(n_outcomes), t)};
    }
    int at(int omega) const { return value[static_cast<std::size_t>(omega)]; }
};

inline bool is_predictable_time(const PredictableTime& time, const Filtration& filt) {
    for (std::size_t w = 0; w < time.value.size(); ++w)
        if (time.value[w] < 1 || time.value[w] > filt.horizon()) return false;
    // {T = t} must be a union of F_{t-1}-atoms.
    for (int t = 1; t <= filt.horizon(); ++t)
        for (const auto& block : filt.at(t - 1).blocks()) {
            bool any = false, all = true;
            for (int omega : block) {
                const bool here = time.at(omega) == t;
                any = any || here;
                all = all && here;
            }
            if (any && !all) return false;
        }
    return true;
}

// M = xi 1_{[T, infty)} as a path table.
inline Process single_jump_process(const RatVec& xi, const PredictableTime& time, int horizon) {
    const int n = static_cast<int>(xi.size());
    Process out(horizon, n);
    for (int t = 0; t <= horizon; ++t)
        for (int w = 0; w < n; ++w)
            if (t >= time.at(w)) out.at(t, w) = xi[static_cast<std::size_t>(w)];
    return out;
}

// E[xi | F_{T-}] evaluated per outcome: the atom of F_{T(omega)-1} around
// omega. Predictability of T makes this well defined.
inline RatVec cond_exp_before_time(const RatVec& xi, const PredictableTime& time,
                                   const Filtration& filt, const FiniteProbSpace& space) {
    const int n = static_cast<int>(xi.size());
    RatVec out(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
        const auto& block = filt.at(time.at(w) - 1).block_of(w);
        Rational mass = 0, weighted = 0;
        for (int omega : block) {
            mass += space.prob(omega);
            weighted += space.prob(omega) * xi[static_cast<std::size_t>(omega)];
        }
        out[static_cast<std::size_t>(w)] = weighted / mass;
    }
    return out;
}

enum class MeasureTag { qt, qtilde, qprime, qtilde_prime, qg_before, qf_after, qg_after };

inline const char* measure_tag_name(MeasureTag tag) {
    switch (tag) {
        case MeasureTag::qt: return "QT";
        case MeasureTag::qtilde: return "QTILDE";
        case MeasureTag::qprime: return "QPRIME";
        case MeasureTag::qtilde_prime: return "QTILDEPRIME";
        case MeasureTag::qg_before: return "QG_BEFORE";
        case MeasureTag::qf_after: return "QF_AFTER";
        case MeasureTag::qg_after: return "QG_AFTER";
    }
    return "?";
}

struct DensityMeasure {
    MeasureTag tag;
    RatVec density;
    Measure measure;
};

namespace detail {

struct TimeSlices {
    RatVec z_minus;   // Z_{T-} per outcome
    RatVec z_tilde;   // Ztilde_T per outcome
};

inline TimeSlices slices_at(const AzemaData& az, const PredictableTime& time) {
    const int n = az.Z.n_outcomes();
    TimeSlices out{RatVec(static_cast<std::size_t>(n)), RatVec(static_cast<std::size_t>(n))};
    for (int w = 0; w < n; ++w) {
        out.z_minus[static_cast<std::size_t>(w)] = az.Z.at(time.at(w) - 1, w);
        out.z_tilde[static_cast<std::size_t>(w)] = az.Ztilde.at(time.at(w), w);
    }
    return out;
}

inline void assert_atomwise_unit_mean(const RatVec& density, const PredictableTime& time,
                                      const Filtration& filt, const FiniteProbSpace& space,
                                      const char* label) {
    const RatVec mean = cond_exp_before_time(density, time, filt, space);
    for (const auto& v : mean)
        if (v != 1)
            throw std::logic_error(std::string(label) +
                                   ": density is not atom-wise normalized");
}

inline DensityMeasure finish(MeasureTag tag, RatVec density, const FiniteProbSpace& space) {
    Measure measure = reweight(space, density);
    return {tag, std::move(density), std::move(measure)};
}

}  // namespace detail

// dQ~_T/dP = Ztilde_T / Z_{T-} on {Z_{T-} > 0}, 1 elsewhere.
inline DensityMeasure qtilde(const AzemaData& az, const PredictableTime& time,
                             const Filtration& filt, const FiniteProbSpace& space) {
    const auto s = detail::slices_at(az, time);
    RatVec density(s.z_minus.size());
    for (std::size_t w = 0; w < density.size(); ++w)
        density[w] = s.z_minus[w] > 0 ? s.z_tilde[w] / s.z_minus[w] : Rational(1);
    detail::assert_atomwise_unit_mean(density, time, filt, space, "qtilde");
    return detail::finish(MeasureTag::qtilde, std::move(density), space);
}

// dQ_T/dP = 1_{Ztilde_T > 0} / P(Ztilde_T > 0 | F_{T-}) on the good set
// Gamma_0 = {P(Ztilde_T > 0 | F_{T-}) > 0}, 1 off it.
inline DensityMeasure qt(const AzemaData& az, const PredictableTime& time,
                         const Filtration& filt, const FiniteProbSpace& space) {
    const auto s = detail::slices_at(az, time);
    const int n = static_cast<int>(s.z_minus.size());
    RatVec positive_ind(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w)
        positive_ind[static_cast<std::size_t>(w)] = s.z_tilde[static_cast<std::size_t>(w)] > 0 ? 1 : 0;
    const RatVec p_pos = cond_exp_before_time(positive_ind, time, filt, space);
    RatVec density(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
        const std::size_t i = static_cast<std::size_t>(w);
        density[i] = p_pos[i] > 0 ? positive_ind[i] / p_pos[i] : Rational(1);
    }
    detail::assert_atomwise_unit_mean(density, time, filt, space, "qt");
    return detail::finish(MeasureTag::qt, std::move(density), space);
}

// dQ~'_T/dP = (1 - Ztilde_T) / (1 - Z_{T-}) on {Z_{T-} < 1}, 1 elsewhere.
inline DensityMeasure qtilde_prime(const AzemaData& az, const PredictableTime& time,
                                   const Filtration& filt, const FiniteProbSpace& space) {
    const auto s = detail::slices_at(az, time);
    RatVec density(s.z_minus.size());
    for (std::size_t w = 0; w < density.size(); ++w)
        density[w] = s.z_minus[w] < 1 ? (1 - s.z_tilde[w]) / (1 - s.z_minus[w]) : Rational(1);
    detail::assert_atomwise_unit_mean(density, time, filt, space, "qtilde_prime");
    return detail::finish(MeasureTag::qtilde_prime, std::move(density), space);
}

namespace detail {

inline DensityMeasure prime_measure(MeasureTag tag, const AzemaData& az,
                                    const PredictableTime& time, const Filtration& filt,
                                    const FiniteProbSpace& space) {
    const auto s = slices_at(az, time);
    const int n = static_cast<int>(s.z_minus.size());
    RatVec below_ind(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w)
        below_ind[static_cast<std::size_t>(w)] = s.z_tilde[static_cast<std::size_t>(w)] < 1 ? 1 : 0;
    const RatVec p_below = cond_exp_before_time(below_ind, time, filt, space);
    RatVec density(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
        const std::size_t i = static_cast<std::size_t>(w);
        density[i] = p_below[i] > 0 ? below_ind[i] / p_below[i] : Rational(1);
    }
    assert_atomwise_unit_mean(density, time, filt, space, measure_tag_name(tag));
    return finish(tag, std::move(density), space);
}

}  // namespace detail

// dQ'_T/dP = 1_{Ztilde_T < 1} / P(Ztilde_T < 1 | F_{T-}) on Gamma_1, 1 off it.
inline DensityMeasure qprime(const AzemaData& az, const PredictableTime& time,
                             const Filtration& filt, const FiniteProbSpace& space) {
    return detail::prime_measure(MeasureTag::qprime, az, time, filt, space);
}

// D^F of the part-after theorem: same formula as Q'_T.
inline DensityMeasure qf_after(const AzemaData& az, const PredictableTime& time,
                               const Filtration& filt, const FiniteProbSpace& space) {
    return detail::prime_measure(MeasureTag::qf_after, az, time, filt, space);
}

// dQ^G_T/dP = U^G(T) / E[U^G(T) | G_{T-}] with
// U^G(T) = 1_{T > tau} + 1_{T <= tau} Z_{T-} / Ztilde_T.
inline DensityMeasure qg_before(const AzemaData& az, const PredictableTime& time,
                                const RandomTime& tau, const Filtration& filt,
                                const Filtration& enlarged, const FiniteProbSpace& space) {
    const auto s = detail::slices_at(az, time);
    const int n = static_cast<int>(s.z_minus.size());
    RatVec u(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
        const std::size_t i = static_cast<std::size_t>(w);
        u[i] = time.at(w) > tau.at(w) ? Rational(1) : s.z_minus[i] / s.z_tilde[i];
    }
    const RatVec mean = cond_exp_before_time(u, time, enlarged, space);
    RatVec density(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
        const std::size_t i = static_cast<std::size_t>(w);
        density[i] = u[i] / mean[i];
    }
    return detail::finish(MeasureTag::qg_before, std::move(density), space);
}

// dQ^G_T/dP (part after an honest time):
// (1 - Z_{T-}) / ((1 - Ztilde_T) P(Ztilde_T < 1 | F_{T-})) on {T > tau}, 1 on
// {T <= tau}. Honesty makes the density G_{T-}-atom-wise normalized.
inline DensityMeasure qg_after(const AzemaData& az, const PredictableTime& time,
                               const RandomTime& tau, const Filtration& filt,
                               const Filtration& enlarged, const FiniteProbSpace& space) {
    if (!is_honest(tau, filt).honest)
        throw std::invalid_argument("qg_after: tau is not honest");
    if (!z_tau_less_one(tau, az))
        throw std::invalid_argument("qg_after: Z_tau < 1 fails");
    const auto s = detail::slices_at(az, time);
    const int n = static_cast<int>(s.z_minus.size());
    RatVec below_ind(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w)
        below_ind[static_cast<std::size_t>(w)] = s.z_tilde[static_cast<std::size_t>(w)] < 1 ? 1 : 0;
    const RatVec p_below = cond_exp_before_time(below_ind, time, filt, space);
    RatVec density(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
        const std::size_t i = static_cast<std::size_t>(w);
        if (time.at(w) > tau.at(w))
            density[i] = (1 - s.z_minus[i]) / ((1 - s.z_tilde[i]) * p_below[i]);
        else
            density[i] = 1;
    }
    detail::assert_atomwise_unit_mean(density, time, enlarged, space, "qg_after");
    return detail::finish(MeasureTag::qg_after, std::move(density), space);
}

// ---------------------------------------------------------------------------
// Three-way equivalence checks for single-jump martingales
// ---------------------------------------------------------------------------

struct ThreeWayCheck {
    bool a = false;  // martingale under the F-side change of measure
    bool b = false;  // the conditional-expectation identity
    bool c = false;  // martingale of the transformed process under the G-side change
    bool agree() const { return a == b && b == c; }
};

// Stopped side: with M = xi 1_{[T, infty)} an F-martingale,
//   (a) M is an (Q_T, F)-martingale,
//   (b) E[xi 1_{Ztilde_T = 0} | F_{T-}] = 0,
//   (c) M^tau is a (Q^G_T, G)-martingale
// are equivalent; any disagreement is a falsification event.
inline ThreeWayCheck verify_prop_before(const PredictableTime& time, const RatVec& xi,
                                        const AzemaData& az, const RandomTime& tau,
                                        const Filtration& filt, const Filtration& enlarged,
                                        const FiniteProbSpace& space) {
    for (const auto& v : cond_exp_before_time(xi, time, filt, space))
        if (v != 0)
            throw std::invalid_argument("verify_prop_before: xi is not conditionally centered");
    const int horizon = filt.horizon();
    const Process m = single_jump_process(xi, time, horizon);

    ThreeWayCheck out;
    out.a = is_martingale(m, filt, qt(az, time, filt, space).measure).ok;

    const auto s = detail::slices_at(az, time);
    RatVec masked(xi.size(), Rational(0));
    for (std::size_t w = 0; w < xi.size(); ++w)
        if (s.z_tilde[w] == 0) masked[w] = xi[w];
    out.b = true;
    for (const auto& v : cond_exp_before_time(masked, time, filt, space))
        if (v != 0) out.b = false;

    const Process stopped = stop(m, tau.tau);
    out.c = is_martingale(stopped, enlarged,
                          qg_before(az, time, tau, filt, enlarged, space).measure)
                .ok;
    return out;
}

// Part-after side: with M = xi 1_{Z_{T-} < 1} 1_{[T, infty)} and tau honest,
//   (a) M is a (D^F, F)-martingale,
//   (b) E[xi 1_{Ztilde_T < 1} | F_{T-}] = 0 on {Z_{T-} < 1},
//   (c) M - M^tau is a (D^G, G)-martingale.
inline ThreeWayCheck verify_prop_after(const PredictableTime& time, const RatVec& xi,
                                       const AzemaData& az, const RandomTime& tau,
                                       const Filtration& filt, const Filtration& enlarged,
                                       const FiniteProbSpace& space) {
    if (!is_honest(tau, filt).honest)
        throw std::invalid_argument("verify_prop_after: tau is not honest");
    const auto s = detail::slices_at(az, time);
    RatVec xi_cut(xi.size());
    for (std::size_t w = 0; w < xi.size(); ++w)
        xi_cut[w] = s.z_minus[w] < 1 ? xi[w] : Rational(0);
    const Process m = single_jump_process(xi_cut, time, filt.horizon());

    ThreeWayCheck out;
    out.a = is_martingale(m, filt, qf_after(az, time, filt, space).measure).ok;

    RatVec masked(xi.size(), Rational(0));
    for (std::size_t w = 0; w < xi.size(); ++w)
        if (s.z_tilde[w] < 1) masked[w] = xi[w];
    const RatVec mean = cond_exp_before_time(masked, time, filt, space);
    out.b = true;
    for (std::size_t w = 0; w < xi.size(); ++w)
        if (s.z_minus[w] < 1 && mean[w] != 0) out.b = false;

    const Process part_after = after(m, tau.tau);
    out.c = is_martingale(part_after, enlarged,
                          qg_after(az, time, tau, filt, enlarged, space).measure)
                .ok;
    return out;
}

}  // namespace nupbr
