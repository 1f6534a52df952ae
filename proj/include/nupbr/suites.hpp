// Machine verification of the equivalence theorems on randomly generated
// models. Each suite evaluates the assertions of one theorem independently
// and demands the exact agreement pattern the theorem states; a disagreement
// is a falsification event that ships the offending model for audit.
//
// Universal quantifiers ("for any bounded martingale...") are handled
// asymmetrically, as the proofs themselves are: the failing direction is
// witnessed constructively (the witness payoff 1_{critical set} minus its
// predictable compensator), the holding direction is sampled.
#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "nupbr/deflator.hpp"
#include "nupbr/generator.hpp"
#include "nupbr/measures.hpp"
#include "nupbr/nupbr.hpp"

namespace nupbr {

// nupbr_check with mandatory re-verification of whichever certificate it
// produced. Every suite goes through this: densities and witnesses are
// double-entry bookkeeping for the LP.
inline NupbrVerdict nupbr_check_verified(const VectorProcess& x, const Filtration& filt,
                                         const Measure& measure) {
    NupbrVerdict v = nupbr_check(x, filt, measure);
    if (v.holds) {
        const CertificateCheck c = verify_holds_certificate(v, x, filt, measure);
        if (!c.ok) throw std::logic_error("nupbr certificate failed re-check: " + c.detail);
    } else {
        const CertificateCheck c = verify_witness(*v.witness, x, measure);
        if (!c.ok) throw std::logic_error("nupbr witness failed re-check: " + c.detail);
    }
    return v;
}

inline NupbrVerdict nupbr_check_verified(const VectorProcess& x, const Filtration& filt,
                                         const FiniteProbSpace& space) {
    return nupbr_check_verified(x, filt, Measure::from_space(space));
}

inline NupbrVerdict nupbr_check_verified(const Process& x, const Filtration& filt,
                                         const Measure& measure) {
    return nupbr_check_verified(VectorProcess{x}, filt, measure);
}

inline NupbrVerdict nupbr_check_verified(const Process& x, const Filtration& filt,
                                         const FiniteProbSpace& space) {
    return nupbr_check_verified(VectorProcess{x}, filt, Measure::from_space(space));
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct CaseResult {
    std::uint64_t model_seed = 0;
    int time = 0;                 // jump time T of the case, 0 when per-model
    std::vector<int> assertions;  // 0/1, one per assertion name of the suite
    bool agree = true;
};

struct SuiteReport {
    std::string suite;
    std::vector<std::string> assertion_names;
    int models = 0;
    int cases = 0;
    int disagreements = 0;
    std::vector<CaseResult> failures;
    std::vector<std::pair<std::uint64_t, Model>> counterexamples;  // capped

    void absorb_case(const CaseResult& r, const Model& model, std::size_t cap = 10) {
        ++cases;
        if (!r.agree) {
            ++disagreements;
            failures.push_back(r);
            if (counterexamples.size() < cap) counterexamples.emplace_back(r.model_seed, model);
        }
    }
};

inline const std::vector<std::string>& suite_ids() {
    static const std::vector<std::string> ids = {
        "stopped-single-jump", "stopped-transfer",    "stopped-criterion",
        "stopped-thin",        "stopped-preservation", "after-single-jump",
        "after-transfer",      "after-criterion",      "after-thin",
        "after-preservation"};
    return ids;
}

inline bool suite_needs_honest(const std::string& id) { return id.rfind("after-", 0) == 0; }

namespace suites_detail {

struct Env {
    const Model& model;
    const AzemaData az;
    const Filtration enlarged;

    explicit Env(const Model& m)
        : model(m), az(azema(m.tau, m.filt, m.space)), enlarged(enlarge(m.filt, m.tau)) {}
};

// Payoff variants per (model, T): raw, conditionally centered, centered and
// supported on {Ztilde_T > 0} (resp. < 1), and zero.
inline std::vector<RatVec> payoff_variants(Rng& rng, const Env& env, const PredictableTime& time,
                                           int samples) {
    std::vector<RatVec> out;
    const int n = env.model.space.n_outcomes();
    out.emplace_back(static_cast<std::size_t>(n), Rational(0));
    for (int i = 0; i < samples; ++i) {
        RatVec xi = random_payoff(rng, env.model.filt, time);
        out.push_back(xi);
        out.push_back(center_before_time(xi, time, env.model.filt, env.model.space));
    }
    return out;
}

inline RatVec slice_ztilde(const Env& env, const PredictableTime& time) {
    const int n = env.model.space.n_outcomes();
    RatVec out(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) out[static_cast<std::size_t>(w)] = env.az.Ztilde.at(time.at(w), w);
    return out;
}

inline RatVec slice_zminus(const Env& env, const PredictableTime& time) {
    const int n = env.model.space.n_outcomes();
    RatVec out(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) out[static_cast<std::size_t>(w)] = env.az.Z.at(time.at(w) - 1, w);
    return out;
}

// Witness payoff for the critical-set criteria: the indicator of the set
// minus its F_{T-}-compensator. Conditionally centered by construction.
inline RatVec witness_payoff(const Env& env, const PredictableTime& time, bool zero_set) {
    const RatVec zt = slice_ztilde(env, time);
    RatVec ind(zt.size());
    for (std::size_t w = 0; w < zt.size(); ++w)
        ind[w] = (zero_set ? zt[w] == 0 : zt[w] == 1) ? 1 : 0;
    return center_before_time(ind, time, env.model.filt, env.model.space);
}

// Distinct positive realized values of Z_{t-1} (stopped side) or 1 - Z_{t-1}
// (after side), plus one value strictly below the minimum.
inline std::vector<Rational> delta_grid(const Env& env, bool after_side) {
    std::vector<Rational> values;
    for (int t = 1; t <= env.model.filt.horizon(); ++t)
        for (int w = 0; w < env.model.space.n_outcomes(); ++w) {
            const Rational v = after_side ? 1 - env.az.Z.at(t - 1, w) : env.az.Z.at(t - 1, w);
            if (v > 0) values.push_back(v);
        }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (values.empty()) return {Rational(1)};
    values.push_back(values.front() / 2);
    std::sort(values.begin(), values.end());
    return values;
}

// Truncated process: increments kept on {Ztilde_t > 0 (resp. < 1)} and
// {level >= delta}, started at 0.
inline VectorProcess truncated_process(const Env& env, const Rational& delta, bool after_side) {
    const int T = env.model.filt.horizon();
    const int n = env.model.space.n_outcomes();
    VectorProcess out;
    for (const auto& comp : env.model.assets) {
        Process trunc(T, n);
        for (int t = 1; t <= T; ++t)
            for (int w = 0; w < n; ++w) {
                const Rational level =
                    after_side ? 1 - env.az.Z.at(t - 1, w) : env.az.Z.at(t - 1, w);
                const bool keep_zone = after_side ? env.az.Ztilde.at(t, w) < 1
                                                  : env.az.Ztilde.at(t, w) > 0;
                trunc.at(t, w) = trunc.at(t - 1, w);
                if (keep_zone && level >= delta) trunc.at(t, w) += comp.delta(t, w);
            }
        out.push_back(std::move(trunc));
    }
    return out;
}

// The deflator identity a passing truncated check must satisfy:
// E[Y_t DS_t 1_zone | F_{t-1}] = 0 wherever the level clears delta.
inline bool deflator_identity_holds(const Env& env, const NupbrVerdict& verdict,
                                    const VectorProcess& truncated, const Rational& delta,
                                    bool after_side) {
    const Measure p = Measure::from_space(env.model.space);
    const Deflator defl =
        deflator_from_densities(verdict, truncated, env.model.filt, p);
    const int n = env.model.space.n_outcomes();
    for (const auto& comp : env.model.assets) {
        for (int t = 1; t <= env.model.filt.horizon(); ++t) {
            RatVec masked(static_cast<std::size_t>(n), Rational(0));
            for (int w = 0; w < n; ++w) {
                const bool zone = after_side ? env.az.Ztilde.at(t, w) < 1
                                             : env.az.Ztilde.at(t, w) > 0;
                if (zone) masked[static_cast<std::size_t>(w)] = defl.y.at(t, w) * comp.delta(t, w);
            }
            const RatVec proj = cond_exp(masked, env.model.filt.at(t - 1), env.model.space);
            for (int w = 0; w < n; ++w) {
                const Rational level =
                    after_side ? 1 - env.az.Z.at(t - 1, w) : env.az.Z.at(t - 1, w);
                if (level >= delta && proj[static_cast<std::size_t>(w)] != 0) return false;
            }
        }
    }
    return true;
}

}  // namespace suites_detail

// ---------------------------------------------------------------------------
// Case evaluators (one model each)
// ---------------------------------------------------------------------------

using CaseSink = std::function<void(const CaseResult&)>;

// Four-way equivalence for a single jump at T, stopped side:
//   (a) S^tau has NUPBR in the enlarged filtration,
//   (b) the {Ztilde>0}-tilted jump has NUPBR in F,
//   (c) NUPBR under the tilted measure, (d) NUPBR under the normalized one.
inline void run_stopped_single_jump(const suites_detail::Env& env, Rng& rng, int samples,
                                    std::uint64_t model_seed, const CaseSink& sink) {
    for (int T = 1; T <= env.model.filt.horizon(); ++T) {
        const PredictableTime time = PredictableTime::deterministic(T, env.model.space.n_outcomes());
        const RatVec zm = suites_detail::slice_zminus(env, time);
        const RatVec zt = suites_detail::slice_ztilde(env, time);
        for (const RatVec& xi : suites_detail::payoff_variants(rng, env, time, samples)) {
            RatVec xi_cut(xi.size()), xi_tilde(xi.size());
            for (std::size_t w = 0; w < xi.size(); ++w) {
                xi_cut[w] = zm[w] > 0 ? xi[w] : Rational(0);
                xi_tilde[w] = zt[w] > 0 ? xi[w] : Rational(0);
            }
            const Process s = single_jump_process(xi_cut, time, env.model.filt.horizon());
            const Process s_tilde = single_jump_process(xi_tilde, time, env.model.filt.horizon());

            CaseResult r;
            r.model_seed = model_seed;
            r.time = T;
            const bool a =
                nupbr_check_verified(stop(s, env.model.tau.tau), env.enlarged, env.model.space)
                    .holds;
            const bool b = nupbr_check_verified(s_tilde, env.model.filt, env.model.space).holds;
            const bool c =
                nupbr_check_verified(s, env.model.filt,
                                     qtilde(env.az, time, env.model.filt, env.model.space).measure)
                    .holds;
            const bool d =
                nupbr_check_verified(s, env.model.filt,
                                     qt(env.az, time, env.model.filt, env.model.space).measure)
                    .holds;
            r.assertions = {a, b, c, d};
            r.agree = (a == b && b == c && c == d);
            sink(r);
        }
    }
}

// Three-way martingale transfer for the stopped side.
inline void run_stopped_transfer(const suites_detail::Env& env, Rng& rng, int samples,
                                 std::uint64_t model_seed, const CaseSink& sink) {
    for (int T = 1; T <= env.model.filt.horizon(); ++T) {
        const PredictableTime time = PredictableTime::deterministic(T, env.model.space.n_outcomes());
        for (int i = 0; i < samples; ++i) {
            const RatVec xi = center_before_time(random_payoff(rng, env.model.filt, time), time,
                                                 env.model.filt, env.model.space);
            const ThreeWayCheck check = verify_prop_before(time, xi, env.az, env.model.tau,
                                                           env.model.filt, env.enlarged,
                                                           env.model.space);
            CaseResult r;
            r.model_seed = model_seed;
            r.time = T;
            r.assertions = {check.a, check.b, check.c};
            r.agree = check.agree();
            sink(r);
        }
    }
}

// Zero-set criterion, stopped side: {Ztilde_T = 0} inside {Z_{T-} = 0} iff
// every centered bounded single jump at T keeps NUPBR after stopping.
inline void run_stopped_criterion(const suites_detail::Env& env, Rng& rng, int samples,
                                  std::uint64_t model_seed, const CaseSink& sink) {
    for (int T = 1; T <= env.model.filt.horizon(); ++T) {
        const PredictableTime time = PredictableTime::deterministic(T, env.model.space.n_outcomes());
        const RatVec zm = suites_detail::slice_zminus(env, time);
        const RatVec zt = suites_detail::slice_ztilde(env, time);
        bool inclusion = true;
        for (std::size_t w = 0; w < zm.size(); ++w)
            if (zt[w] == 0 && zm[w] != 0) inclusion = false;

        const RatVec xi_star = suites_detail::witness_payoff(env, time, /*zero_set=*/true);
        const Process m_star = single_jump_process(xi_star, time, env.model.filt.horizon());
        const Process m_star_stopped = stop(m_star, env.model.tau.tau);
        const bool witness_preserves =
            nupbr_check_verified(m_star_stopped, env.enlarged, env.model.space).holds;

        // The stopped witness is a predictable finite-variation process in the
        // enlarged filtration; the FV lemma must agree with the LP on it.
        if (!is_predictable(m_star_stopped, env.enlarged))
            throw std::logic_error("stopped-criterion: witness is not G-predictable");
        if (!predictable_fv_check(m_star_stopped, env.enlarged, env.model.space).agree())
            throw std::logic_error("stopped-criterion: FV lemma disagrees with the LP");

        bool samples_preserve = true;
        for (int i = 0; i < samples; ++i) {
            const RatVec xi = center_before_time(random_payoff(rng, env.model.filt, time), time,
                                                 env.model.filt, env.model.space);
            const Process m = single_jump_process(xi, time, env.model.filt.horizon());
            if (!nupbr_check_verified(stop(m, env.model.tau.tau), env.enlarged, env.model.space)
                     .holds)
                samples_preserve = false;
        }

        CaseResult r;
        r.model_seed = model_seed;
        r.time = T;
        r.assertions = {inclusion, witness_preserves, samples_preserve};
        r.agree = inclusion ? (witness_preserves && samples_preserve) : !witness_preserves;
        sink(r);
    }
}

// Thin-process criterion, stopped side: NUPBR of S^tau in G iff the
// truncations of S have NUPBR in F for every realized truncation level; a
// passing truncation must ship a deflator satisfying the projection identity.
inline void run_stopped_thin(const suites_detail::Env& env, Rng&, int, std::uint64_t model_seed,
                             const CaseSink& sink) {
    const bool a = nupbr_check_verified(stop(env.model.assets, env.model.tau.tau), env.enlarged,
                                        env.model.space)
                       .holds;
    bool all_truncations = true;
    bool identity_ok = true;
    for (const Rational& delta : suites_detail::delta_grid(env, /*after_side=*/false)) {
        const VectorProcess trunc = suites_detail::truncated_process(env, delta, false);
        const NupbrVerdict verdict = nupbr_check_verified(trunc, env.model.filt, env.model.space);
        if (!verdict.holds) {
            all_truncations = false;
            continue;
        }
        if (!suites_detail::deflator_identity_holds(env, verdict, trunc, delta, false))
            identity_ok = false;
    }
    CaseResult r;
    r.model_seed = model_seed;
    r.assertions = {a, all_truncations, identity_ok};
    r.agree = (a == all_truncations) && identity_ok;
    sink(r);
}

// Global preservation, stopped side: the before-set is empty iff stopping
// preserves NUPBR for every process that has it (witness + sampling).
inline void run_stopped_preservation(const suites_detail::Env& env, Rng& rng, int samples,
                                     std::uint64_t model_seed, const CaseSink& sink) {
    const ExceptionalSets sets = exceptional_sets(env.az);
    const bool empty = sets.before.empty();
    bool preserved = true;
    if (empty) {
        for (int i = 0; i < samples; ++i) {
            const Process x = random_martingale(rng, env.model.filt, env.model.space);
            if (!nupbr_check_verified(x, env.model.filt, env.model.space).holds)
                throw std::logic_error("stopped-preservation: martingale fails NUPBR(F)");
            if (!nupbr_check_verified(stop(x, env.model.tau.tau), env.enlarged, env.model.space)
                     .holds)
                preserved = false;
        }
    } else {
        const int T = sets.before.front().first;
        const PredictableTime time = PredictableTime::deterministic(T, env.model.space.n_outcomes());
        const RatVec xi_star = suites_detail::witness_payoff(env, time, /*zero_set=*/true);
        const Process m_star = single_jump_process(xi_star, time, env.model.filt.horizon());
        if (!nupbr_check_verified(m_star, env.model.filt, env.model.space).holds)
            throw std::logic_error("stopped-preservation: witness fails NUPBR(F)");
        preserved = nupbr_check_verified(stop(m_star, env.model.tau.tau), env.enlarged,
                                         env.model.space)
                        .holds;
    }
    CaseResult r;
    r.model_seed = model_seed;
    r.assertions = {empty, preserved};
    r.agree = (empty == preserved);
    sink(r);
}

// Four-way equivalence for a single jump at T, part after an honest time.
inline void run_after_single_jump(const suites_detail::Env& env, Rng& rng, int samples,
                                  std::uint64_t model_seed, const CaseSink& sink) {
    for (int T = 1; T <= env.model.filt.horizon(); ++T) {
        const PredictableTime time = PredictableTime::deterministic(T, env.model.space.n_outcomes());
        const RatVec zm = suites_detail::slice_zminus(env, time);
        const RatVec zt = suites_detail::slice_ztilde(env, time);
        for (const RatVec& xi : suites_detail::payoff_variants(rng, env, time, samples)) {
            RatVec xi_cut(xi.size()), xi_tilde(xi.size());
            for (std::size_t w = 0; w < xi.size(); ++w) {
                xi_cut[w] = zm[w] < 1 ? xi[w] : Rational(0);
                xi_tilde[w] = zt[w] < 1 ? xi[w] : Rational(0);
            }
            const Process s = single_jump_process(xi_cut, time, env.model.filt.horizon());
            const Process s_tilde = single_jump_process(xi_tilde, time, env.model.filt.horizon());

            CaseResult r;
            r.model_seed = model_seed;
            r.time = T;
            const bool a = nupbr_check_verified(after(s, env.model.tau.tau), env.enlarged,
                                                env.model.space)
                               .holds;
            const bool b =
                nupbr_check_verified(
                    s, env.model.filt,
                    qtilde_prime(env.az, time, env.model.filt, env.model.space).measure)
                    .holds;
            const bool c =
                nupbr_check_verified(s, env.model.filt,
                                     qprime(env.az, time, env.model.filt, env.model.space).measure)
                    .holds;
            const bool d = nupbr_check_verified(s_tilde, env.model.filt, env.model.space).holds;
            r.assertions = {a, b, c, d};
            r.agree = (a == b && b == c && c == d);
            sink(r);
        }
    }
}

inline void run_after_transfer(const suites_detail::Env& env, Rng& rng, int samples,
                               std::uint64_t model_seed, const CaseSink& sink) {
    for (int T = 1; T <= env.model.filt.horizon(); ++T) {
        const PredictableTime time = PredictableTime::deterministic(T, env.model.space.n_outcomes());
        for (const RatVec& xi : suites_detail::payoff_variants(rng, env, time, samples)) {
            const ThreeWayCheck check = verify_prop_after(time, xi, env.az, env.model.tau,
                                                          env.model.filt, env.enlarged,
                                                          env.model.space);
            CaseResult r;
            r.model_seed = model_seed;
            r.time = T;
            r.assertions = {check.a, check.b, check.c};
            r.agree = check.agree();
            sink(r);
        }
    }
}

// One-set criterion, part after an honest time: {Ztilde_T = 1} inside
// {Z_{T-} = 1} iff every centered single jump at T keeps NUPBR after tau.
inline void run_after_criterion(const suites_detail::Env& env, Rng& rng, int samples,
                                std::uint64_t model_seed, const CaseSink& sink) {
    for (int T = 1; T <= env.model.filt.horizon(); ++T) {
        const PredictableTime time = PredictableTime::deterministic(T, env.model.space.n_outcomes());
        const RatVec zm = suites_detail::slice_zminus(env, time);
        const RatVec zt = suites_detail::slice_ztilde(env, time);
        bool inclusion = true;
        for (std::size_t w = 0; w < zm.size(); ++w)
            if (zt[w] == 1 && zm[w] != 1) inclusion = false;

        const RatVec xi_star = suites_detail::witness_payoff(env, time, /*zero_set=*/false);
        const Process m_star = single_jump_process(xi_star, time, env.model.filt.horizon());
        const Process m_star_after = after(m_star, env.model.tau.tau);
        const bool witness_preserves =
            nupbr_check_verified(m_star_after, env.enlarged, env.model.space).holds;

        if (!is_predictable(m_star_after, env.enlarged))
            throw std::logic_error("after-criterion: witness part is not G-predictable");
        if (!predictable_fv_check(m_star_after, env.enlarged, env.model.space).agree())
            throw std::logic_error("after-criterion: FV lemma disagrees with the LP");

        bool samples_preserve = true;
        for (int i = 0; i < samples; ++i) {
            const RatVec xi = center_before_time(random_payoff(rng, env.model.filt, time), time,
                                                 env.model.filt, env.model.space);
            const Process m = single_jump_process(xi, time, env.model.filt.horizon());
            if (!nupbr_check_verified(after(m, env.model.tau.tau), env.enlarged, env.model.space)
                     .holds)
                samples_preserve = false;
        }

        CaseResult r;
        r.model_seed = model_seed;
        r.time = T;
        r.assertions = {inclusion, witness_preserves, samples_preserve};
        r.agree = inclusion ? (witness_preserves && samples_preserve) : !witness_preserves;
        sink(r);
    }
}

inline void run_after_thin(const suites_detail::Env& env, Rng&, int, std::uint64_t model_seed,
                           const CaseSink& sink) {
    const bool a = nupbr_check_verified(after(env.model.assets, env.model.tau.tau), env.enlarged,
                                        env.model.space)
                       .holds;
    bool all_truncations = true;
    bool identity_ok = true;
    for (const Rational& delta : suites_detail::delta_grid(env, /*after_side=*/true)) {
        const VectorProcess trunc = suites_detail::truncated_process(env, delta, true);
        const NupbrVerdict verdict = nupbr_check_verified(trunc, env.model.filt, env.model.space);
        if (!verdict.holds) {
            all_truncations = false;
            continue;
        }
        if (!suites_detail::deflator_identity_holds(env, verdict, trunc, delta, true))
            identity_ok = false;
    }
    CaseResult r;
    r.model_seed = model_seed;
    r.assertions = {a, all_truncations, identity_ok};
    r.agree = (a == all_truncations) && identity_ok;
    sink(r);
}

inline void run_after_preservation(const suites_detail::Env& env, Rng& rng, int samples,
                                   std::uint64_t model_seed, const CaseSink& sink) {
    const ExceptionalSets sets = exceptional_sets(env.az);
    const bool empty = sets.after.empty();
    bool preserved = true;
    if (empty) {
        for (int i = 0; i < samples; ++i) {
            const Process x = random_martingale(rng, env.model.filt, env.model.space);
            if (!nupbr_check_verified(x, env.model.filt, env.model.space).holds)
                throw std::logic_error("after-preservation: martingale fails NUPBR(F)");
            if (!nupbr_check_verified(after(x, env.model.tau.tau), env.enlarged, env.model.space)
                     .holds)
                preserved = false;
        }
    } else {
        const int T = sets.after.front().first;
        const PredictableTime time = PredictableTime::deterministic(T, env.model.space.n_outcomes());
        const RatVec xi_star = suites_detail::witness_payoff(env, time, /*zero_set=*/false);
        const Process m_star = single_jump_process(xi_star, time, env.model.filt.horizon());
        if (!nupbr_check_verified(m_star, env.model.filt, env.model.space).holds)
            throw std::logic_error("after-preservation: witness fails NUPBR(F)");
        preserved = nupbr_check_verified(after(m_star, env.model.tau.tau), env.enlarged,
                                         env.model.space)
                        .holds;
    }
    CaseResult r;
    r.model_seed = model_seed;
    r.assertions = {empty, preserved};
    r.agree = (empty == preserved);
    sink(r);
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

struct SuiteRunParams {
    int n_models = 1000;
    std::uint64_t seed = 42;
    ModelGenParams gen;       // bounds; seed/force flags are set per model
    int samples = 3;
    int jobs = 1;
    bool force_half = true;   // odd model indices force a nonempty critical set
};

namespace suites_detail {

inline void dispatch(const std::string& id, const Env& env, Rng& rng, int samples,
                     std::uint64_t model_seed, const CaseSink& sink) {
    if (id == "stopped-single-jump") return run_stopped_single_jump(env, rng, samples, model_seed, sink);
    if (id == "stopped-transfer") return run_stopped_transfer(env, rng, samples, model_seed, sink);
    if (id == "stopped-criterion") return run_stopped_criterion(env, rng, samples, model_seed, sink);
    if (id == "stopped-thin") return run_stopped_thin(env, rng, samples, model_seed, sink);
    if (id == "stopped-preservation")
        return run_stopped_preservation(env, rng, samples, model_seed, sink);
    if (id == "after-single-jump") return run_after_single_jump(env, rng, samples, model_seed, sink);
    if (id == "after-transfer") return run_after_transfer(env, rng, samples, model_seed, sink);
    if (id == "after-criterion") return run_after_criterion(env, rng, samples, model_seed, sink);
    if (id == "after-thin") return run_after_thin(env, rng, samples, model_seed, sink);
    if (id == "after-preservation")
        return run_after_preservation(env, rng, samples, model_seed, sink);
    throw std::invalid_argument("unknown suite id: " + id);
}

inline std::vector<std::string> assertion_names(const std::string& id) {
    if (id == "stopped-single-jump") return {"stopped_G", "tilted_F", "measure_tilde", "measure_norm"};
    if (id == "after-single-jump") return {"after_G", "measure_tilde", "measure_norm", "tilted_F"};
    if (id == "stopped-transfer" || id == "after-transfer")
        return {"F_side_measure", "conditional_identity", "G_side_measure"};
    if (id == "stopped-criterion" || id == "after-criterion")
        return {"inclusion", "witness_preserves", "samples_preserve"};
    if (id == "stopped-thin" || id == "after-thin")
        return {"enlarged_nupbr", "truncations_nupbr", "deflator_identity"};
    return {"critical_set_empty", "nupbr_preserved"};
}

template <class Fn>
inline void parallel_for(int n, int jobs, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const int workers = std::min(jobs, n);
    pool.reserve(static_cast<std::size_t>(workers));
    for (int j = 0; j < workers; ++j)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace suites_detail

inline SuiteReport run_suite(const std::string& id, const SuiteRunParams& run) {
    SuiteReport report;
    report.suite = id;
    report.assertion_names = suites_detail::assertion_names(id);

    struct PerModel {
        std::vector<CaseResult> cases;
        std::shared_ptr<Model> owned;
    };
    std::vector<PerModel> slots(static_cast<std::size_t>(run.n_models));

    suites_detail::parallel_for(run.n_models, run.jobs, [&](int i) {
        ModelGenParams params = run.gen;
        params.seed = run.seed + static_cast<std::uint64_t>(i);
        params.honest_only = suite_needs_honest(id);
        if (run.force_half && i % 2 == 1) {
            if (suite_needs_honest(id))
                params.force_after_set = true;
            else
                params.force_before_set = true;
        }
        auto model = std::make_shared<Model>(gen_model(params));
        suites_detail::Env env(*model);
        Rng rng(params.seed ^ 0x9e3779b97f4a7c15ull);
        auto& slot = slots[static_cast<std::size_t>(i)];
        slot.owned = model;
        suites_detail::dispatch(id, env, rng, run.samples, params.seed,
                                [&slot](const CaseResult& r) { slot.cases.push_back(r); });
    });

    for (auto& slot : slots) {
        ++report.models;
        for (const auto& r : slot.cases) report.absorb_case(r, *slot.owned);
    }
    return report;
}

}  // namespace nupbr
