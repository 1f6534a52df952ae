// Discrete-time process calculus on a finite filtered space.
//
// Dictionary, fixed once and used everywhere:
//   X_{t-} := X_{t-1} with X_{0-} := X_0;
//   predictable at t >= 1 means F_{t-1}-measurable, at 0 means F_0-measurable;
//   DX_t := X_t - X_{t-1}, so jumps live at t in {1..T} only;
//   a local martingale on a finite space with finite horizon is a true
//   martingale, so every "local" identity is tested as the plain one.
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nupbr/space.hpp"

namespace nupbr {

// Time value for random times; kInfiniteTime encodes "never happens".
inline constexpr int kInfiniteTime = 1 << 29;

// A scalar time x outcome table. Vector-valued processes are handled as one
// Process per component (see VectorProcess).
class Process {
public:
    Process(int horizon, int n_outcomes, Rational init = Rational(0))
        : v_(static_cast<std::size_t>(horizon + 1),
             RatVec(static_cast<std::size_t>(n_outcomes), init)) {}
    Process(std::vector<RatVec> table) : v_(std::move(table)) {
        if (v_.empty()) throw std::invalid_argument("process: empty time axis");
        for (const auto& row : v_)
            if (row.size() != v_.front().size())
                throw std::invalid_argument("process: ragged outcome axis");
    }

    int horizon() const { return static_cast<int>(v_.size()) - 1; }
    int n_outcomes() const { return static_cast<int>(v_.front().size()); }

    const Rational& at(int t, int omega) const {
        return v_[static_cast<std::size_t>(t)][static_cast<std::size_t>(omega)];
    }
    Rational& at(int t, int omega) {
        return v_[static_cast<std::size_t>(t)][static_cast<std::size_t>(omega)];
    }
    const RatVec& level(int t) const { return v_[static_cast<std::size_t>(t)]; }
    RatVec& level(int t) { return v_[static_cast<std::size_t>(t)]; }

    // X_{t-} with X_{0-} := X_0.
    const Rational& left(int t, int omega) const { return at(t > 0 ? t - 1 : 0, omega); }
    // DX_t; zero at t = 0.
    Rational delta(int t, int omega) const {
        return t == 0 ? Rational(0) : at(t, omega) - at(t - 1, omega);
    }

    bool operator==(const Process& other) const = default;

private:
    std::vector<RatVec> v_;  // v_[t][omega]
};

using VectorProcess = std::vector<Process>;  // one entry per asset/component

inline Process constant_process(int horizon, int n_outcomes, const Rational& value) {
    return Process(horizon, n_outcomes, value);
}

// Pointwise product, used for deflated processes L * M.
inline Process pointwise_product(const Process& a, const Process& b) {
    Process out(a.horizon(), a.n_outcomes());
    for (int t = 0; t <= a.horizon(); ++t)
        for (int w = 0; w < a.n_outcomes(); ++w) out.at(t, w) = a.at(t, w) * b.at(t, w);
    return out;
}

inline Process linear_combination(const Rational& ca, const Process& a, const Rational& cb,
                                  const Process& b) {
    Process out(a.horizon(), a.n_outcomes());
    for (int t = 0; t <= a.horizon(); ++t)
        for (int w = 0; w < a.n_outcomes(); ++w)
            out.at(t, w) = ca * a.at(t, w) + cb * b.at(t, w);
    return out;
}

// ---------------------------------------------------------------------------
// Measurability checks
// ---------------------------------------------------------------------------

inline bool values_constant_on_blocks(const RatVec& x, const Partition& pi) {
    for (const auto& block : pi.blocks()) {
        const auto& ref = x[static_cast<std::size_t>(block.front())];
        for (int omega : block)
            if (x[static_cast<std::size_t>(omega)] != ref) return false;
    }
    return true;
}

inline bool is_adapted(const Process& x, const Filtration& filt) {
    for (int t = 0; t <= x.horizon(); ++t)
        if (!values_constant_on_blocks(x.level(t), filt.at(t))) return false;
    return true;
}

inline bool is_adapted(const VectorProcess& x, const Filtration& filt) {
    for (const auto& comp : x)
        if (!is_adapted(comp, filt)) return false;
    return true;
}

// values(t) constant on atoms of F_{t-1}; values(0) constant on atoms of F_0.
inline bool is_predictable(const Process& x, const Filtration& filt) {
    for (int t = 0; t <= x.horizon(); ++t)
        if (!values_constant_on_blocks(x.level(t), filt.before(t))) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Projections
// ---------------------------------------------------------------------------

// ^p X with (^p X)_t = E[X_t | F_{t-1}] for t >= 1 and E[X_0 | F_0] at t = 0.
inline Process predictable_projection(const Process& x, const Filtration& filt,
                                      const FiniteProbSpace& space) {
    Process out(x.horizon(), x.n_outcomes());
    for (int t = 0; t <= x.horizon(); ++t) out.level(t) = cond_exp(x.level(t), filt.before(t), space);
    return out;
}

// ^p applied to the jump: E[DX_t | F_{t-1}] per outcome, zero at t = 0.
inline RatVec predictable_jump_projection(const Process& x, int t, const Filtration& filt,
                                          const FiniteProbSpace& space) {
    RatVec jump(static_cast<std::size_t>(x.n_outcomes()));
    for (int w = 0; w < x.n_outcomes(); ++w) jump[static_cast<std::size_t>(w)] = x.delta(t, w);
    return cond_exp(jump, filt.before(t), space);
}

// Dual optional projection of a nondecreasing K, with the time-0 mass
// convention DK_0 := K_0:  K^{o,F}_t = sum_{s<=t} E[DK_s | F_s].
inline Process dual_optional_projection(const Process& k, const Filtration& filt,
                                        const FiniteProbSpace& space) {
    const int n = k.n_outcomes();
    Process out(k.horizon(), n);
    RatVec running(static_cast<std::size_t>(n), Rational(0));
    for (int t = 0; t <= k.horizon(); ++t) {
        RatVec jump(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w) {
            jump[static_cast<std::size_t>(w)] = (t == 0) ? k.at(0, w) : k.delta(t, w);
            if (jump[static_cast<std::size_t>(w)] < 0)
                throw std::invalid_argument("dual_optional_projection: input decreases at t=" +
                                            std::to_string(t));
        }
        const RatVec projected = cond_exp(jump, filt.at(t), space);
        for (int w = 0; w < n; ++w) running[static_cast<std::size_t>(w)] += projected[static_cast<std::size_t>(w)];
        out.level(t) = running;
    }
    return out;
}

// Dual predictable projection: conditioning on F_{s-1} instead (F_0 at s=0).
inline Process dual_predictable_projection(const Process& k, const Filtration& filt,
                                           const FiniteProbSpace& space) {
    const int n = k.n_outcomes();
    Process out(k.horizon(), n);
    RatVec running(static_cast<std::size_t>(n), Rational(0));
    for (int t = 0; t <= k.horizon(); ++t) {
        RatVec jump(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w) {
            jump[static_cast<std::size_t>(w)] = (t == 0) ? k.at(0, w) : k.delta(t, w);
            if (jump[static_cast<std::size_t>(w)] < 0)
                throw std::invalid_argument("dual_predictable_projection: input decreases at t=" +
                                            std::to_string(t));
        }
        const RatVec projected = cond_exp(jump, filt.before(t), space);
        for (int w = 0; w < n; ++w) running[static_cast<std::size_t>(w)] += projected[static_cast<std::size_t>(w)];
        out.level(t) = running;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Martingale test
// ---------------------------------------------------------------------------

struct MartingaleCheck {
    bool ok = true;
    // First failure, when !ok: E[X_t | atom] != X_{t-1} on that atom.
    int t = -1;
    std::vector<int> atom;
    Rational lhs;  // conditional expectation of X_t on the atom
    Rational rhs;  // X_{t-1} there
};

// Exact martingale test under an arbitrary (possibly only absolutely
// continuous) measure: atoms of zero mass carry no constraint.
inline MartingaleCheck is_martingale(const Process& x, const Filtration& filt,
                                     const Measure& measure) {
    for (int t = 1; t <= x.horizon(); ++t) {
        const Partition& pi = filt.at(t - 1);
        for (const auto& block : pi.blocks()) {
            Rational mass = 0, weighted = 0;
            for (int omega : block) {
                mass += measure.mass(omega);
                weighted += measure.mass(omega) * x.at(t, omega);
            }
            if (mass == 0) continue;
            const Rational expected = weighted / mass;
            // X_{t-1} is F_{t-1}-measurable for adapted X, but under an a.c.
            // measure it only needs to be constant on the surviving part.
            std::optional<Rational> prev;
            bool prev_constant = true;
            for (int omega : block) {
                if (measure.mass(omega) == 0) continue;
                if (!prev)
                    prev = x.at(t - 1, omega);
                else if (*prev != x.at(t - 1, omega))
                    prev_constant = false;
            }
            if (!prev_constant || expected != *prev) {
                MartingaleCheck fail;
                fail.ok = false;
                fail.t = t;
                fail.atom = block;
                fail.lhs = expected;
                fail.rhs = prev_constant ? *prev : Rational(0);
                return fail;
            }
        }
    }
    return {};
}

inline MartingaleCheck is_martingale(const Process& x, const Filtration& filt,
                                     const FiniteProbSpace& space) {
    return is_martingale(x, filt, Measure::from_space(space));
}

// ---------------------------------------------------------------------------
// Brackets
// ---------------------------------------------------------------------------

// [M,N]_t = sum_{s<=t} DM_s DN_s (no continuous part on a grid).
inline Process square_bracket(const Process& m, const Process& n) {
    const int T = m.horizon(), nw = m.n_outcomes();
    Process out(T, nw);
    for (int t = 1; t <= T; ++t)
        for (int w = 0; w < nw; ++w)
            out.at(t, w) = out.at(t - 1, w) + m.delta(t, w) * n.delta(t, w);
    return out;
}

// <M,N>_t = sum_{s<=t} E[DM_s DN_s | F_{s-1}]: the dual predictable
// projection of [M,N]. Predictable by construction.
inline Process angle_bracket(const Process& m, const Process& n, const Filtration& filt,
                             const FiniteProbSpace& space) {
    const int T = m.horizon(), nw = m.n_outcomes();
    Process out(T, nw);
    for (int t = 1; t <= T; ++t) {
        RatVec prod(static_cast<std::size_t>(nw));
        for (int w = 0; w < nw; ++w)
            prod[static_cast<std::size_t>(w)] = m.delta(t, w) * n.delta(t, w);
        const RatVec projected = cond_exp(prod, filt.at(t - 1), space);
        for (int w = 0; w < nw; ++w)
            out.at(t, w) = out.at(t - 1, w) + projected[static_cast<std::size_t>(w)];
    }
    return out;
}

inline Process angle_bracket(const Process& m, const Filtration& filt,
                             const FiniteProbSpace& space) {
    return angle_bracket(m, m, filt, space);
}

// ---------------------------------------------------------------------------
// Stochastic exponential
// ---------------------------------------------------------------------------

struct StochasticExponential {
    Process value;
    // Grid points where 1 + DN_t <= 0. Positivity failures are detected and
    // reported, never silently absorbed: several theorems assert they cannot
    // occur, so the engine must be able to see them when they do.
    std::vector<std::pair<int, int>> nonpositive_factors;  // (t, omega)
    bool positive() const { return nonpositive_factors.empty(); }
};

// E(N)_t = prod_{s<=t} (1 + DN_s), E(N)_0 = 1.
inline StochasticExponential stochastic_exponential(const Process& n) {
    StochasticExponential out{Process(n.horizon(), n.n_outcomes(), Rational(1)), {}};
    for (int t = 1; t <= n.horizon(); ++t)
        for (int w = 0; w < n.n_outcomes(); ++w) {
            const Rational factor = 1 + n.delta(t, w);
            if (factor <= 0) out.nonpositive_factors.emplace_back(t, w);
            out.value.at(t, w) = out.value.at(t - 1, w) * factor;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Integrals
// ---------------------------------------------------------------------------

// (H . X)_t = sum_{s<=t} H_s DX_s for scalar H, X.
inline Process predictable_integral(const Process& h, const Process& x) {
    const int T = x.horizon(), nw = x.n_outcomes();
    if (h.horizon() != T || h.n_outcomes() != nw)
        throw std::invalid_argument("predictable_integral: shape mismatch");
    Process out(T, nw);
    for (int t = 1; t <= T; ++t)
        for (int w = 0; w < nw; ++w)
            out.at(t, w) = out.at(t - 1, w) + h.at(t, w) * x.delta(t, w);
    return out;
}

// Inner-product form for d assets: (H . X)_t = sum_k sum_{s<=t} H^k_s DX^k_s.
inline Process predictable_integral(const VectorProcess& h, const VectorProcess& x) {
    if (h.size() != x.size())
        throw std::invalid_argument("predictable_integral: dimension mismatch");
    if (x.empty()) throw std::invalid_argument("predictable_integral: empty integrand");
    Process out(x.front().horizon(), x.front().n_outcomes());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const Process part = predictable_integral(h[k], x[k]);
        out = linear_combination(Rational(1), out, Rational(1), part);
    }
    return out;
}

// Optional stochastic integral: D(K (.) N)_t = K_t DN_t - E[K_t DN_t | H_{t-1}],
// (K (.) N)_0 = 0. The compensation makes the result an H-martingale by
// construction whatever the optional integrand K does.
inline Process optional_integral(const Process& k, const Process& n, const Filtration& filt,
                                 const FiniteProbSpace& space) {
    const int T = n.horizon(), nw = n.n_outcomes();
    Process out(T, nw);
    for (int t = 1; t <= T; ++t) {
        RatVec incr(static_cast<std::size_t>(nw));
        for (int w = 0; w < nw; ++w)
            incr[static_cast<std::size_t>(w)] = k.at(t, w) * n.delta(t, w);
        const RatVec comp = cond_exp(incr, filt.at(t - 1), space);
        for (int w = 0; w < nw; ++w)
            out.at(t, w) = out.at(t - 1, w) + incr[static_cast<std::size_t>(w)] -
                           comp[static_cast<std::size_t>(w)];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stopping
// ---------------------------------------------------------------------------

// tau given per outcome, values in {0..T} or kInfiniteTime.
inline Process stop(const Process& x, const std::vector<int>& tau) {
    Process out(x.horizon(), x.n_outcomes());
    for (int t = 0; t <= x.horizon(); ++t)
        for (int w = 0; w < x.n_outcomes(); ++w)
            out.at(t, w) = x.at(std::min(t, tau[static_cast<std::size_t>(w)]), w);
    return out;
}

// X - X^tau; zero up to tau, then accumulates the post-tau moves.
inline Process after(const Process& x, const std::vector<int>& tau) {
    const Process stopped = stop(x, tau);
    return linear_combination(Rational(1), x, Rational(-1), stopped);
}

inline VectorProcess stop(const VectorProcess& x, const std::vector<int>& tau) {
    VectorProcess out;
    out.reserve(x.size());
    for (const auto& comp : x) out.push_back(stop(comp, tau));
    return out;
}

inline VectorProcess after(const VectorProcess& x, const std::vector<int>& tau) {
    VectorProcess out;
    out.reserve(x.size());
    for (const auto& comp : x) out.push_back(after(comp, tau));
    return out;
}

}  // namespace nupbr
