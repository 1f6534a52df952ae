// Finite probability spaces, partitions and refining filtrations, plus the
// conditional-expectation kernel that every projection in the engine is
// built from. Outcomes are dense indices 0..n-1; a partition is the atom
// list of a sigma-field on that index set, in canonical sorted form so
// structural equality is decidable.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nupbr/rational.hpp"

namespace nupbr {

class FiniteProbSpace {
public:
    FiniteProbSpace(RatVec probs) : p_(std::move(probs)) {
        if (p_.empty()) throw std::invalid_argument("space: needs at least one outcome");
        Rational total = 0;
        for (std::size_t i = 0; i < p_.size(); ++i) {
            if (p_[i] <= 0)
                throw std::invalid_argument("space: outcome " + std::to_string(i) +
                                            " has non-positive probability");
            total += p_[i];
        }
        if (total != 1) throw std::invalid_argument("space: probabilities sum to " +
                                                    rat_to_string(total) + ", expected 1");
    }

    int n_outcomes() const { return static_cast<int>(p_.size()); }
    const Rational& prob(int omega) const { return p_[static_cast<std::size_t>(omega)]; }
    const RatVec& probs() const { return p_; }

    bool operator==(const FiniteProbSpace& other) const = default;

private:
    RatVec p_;
};

// Atoms stored as sorted index lists; blocks ordered by first element.
class Partition {
public:
    Partition(int n_outcomes, std::vector<std::vector<int>> blocks)
        : n_(n_outcomes), blocks_(std::move(blocks)), block_of_(static_cast<std::size_t>(n_outcomes), -1) {
        for (auto& b : blocks_) {
            if (b.empty()) throw std::invalid_argument("partition: empty block");
            std::sort(b.begin(), b.end());
        }
        std::sort(blocks_.begin(), blocks_.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
            for (int omega : blocks_[bi]) {
                if (omega < 0 || omega >= n_)
                    throw std::invalid_argument("partition: outcome index out of range");
                if (block_of_[static_cast<std::size_t>(omega)] != -1)
                    throw std::invalid_argument("partition: blocks overlap at outcome " +
                                                std::to_string(omega));
                block_of_[static_cast<std::size_t>(omega)] = static_cast<int>(bi);
            }
        }
        for (int omega = 0; omega < n_; ++omega)
            if (block_of_[static_cast<std::size_t>(omega)] == -1)
                throw std::invalid_argument("partition: outcome " + std::to_string(omega) +
                                            " not covered");
    }

    static Partition trivial(int n_outcomes) {
        std::vector<int> all(static_cast<std::size_t>(n_outcomes));
        for (int i = 0; i < n_outcomes; ++i) all[static_cast<std::size_t>(i)] = i;
        return Partition(n_outcomes, {all});
    }

    static Partition discrete(int n_outcomes) {
        std::vector<std::vector<int>> blocks;
        blocks.reserve(static_cast<std::size_t>(n_outcomes));
        for (int i = 0; i < n_outcomes; ++i) blocks.push_back({i});
        return Partition(n_outcomes, std::move(blocks));
    }

    int n_outcomes() const { return n_; }
    int n_blocks() const { return static_cast<int>(blocks_.size()); }
    const std::vector<int>& block(int i) const { return blocks_[static_cast<std::size_t>(i)]; }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    int block_index_of(int omega) const { return block_of_[static_cast<std::size_t>(omega)]; }
    const std::vector<int>& block_of(int omega) const {
        return blocks_[static_cast<std::size_t>(block_index_of(omega))];
    }

    // True iff every block of *this is contained in one block of coarser.
    bool refines(const Partition& coarser) const {
        if (n_ != coarser.n_) return false;
        for (const auto& b : blocks_) {
            const int target = coarser.block_index_of(b.front());
            for (int omega : b)
                if (coarser.block_index_of(omega) != target) return false;
        }
        return true;
    }

    bool operator==(const Partition& other) const {
        return n_ == other.n_ && blocks_ == other.blocks_;
    }

private:
    int n_;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> block_of_;
};

struct RefinementFailure {
    int time = -1;  // first t with partitions(t+1) not refining partitions(t)
};

class Filtration {
public:
    Filtration(std::vector<Partition> levels) : levels_(std::move(levels)) {
        if (levels_.empty()) throw std::invalid_argument("filtration: needs at least time 0");
        const auto failure = check_refinement(levels_);
        if (failure)
            throw std::invalid_argument("filtration: partitions coarsen from t=" +
                                        std::to_string(failure->time) + " to t=" +
                                        std::to_string(failure->time + 1));
    }

    static std::optional<RefinementFailure> check_refinement(const std::vector<Partition>& levels) {
        for (std::size_t t = 0; t + 1 < levels.size(); ++t)
            if (!levels[t + 1].refines(levels[t]))
                return RefinementFailure{static_cast<int>(t)};
        return std::nullopt;
    }

    int horizon() const { return static_cast<int>(levels_.size()) - 1; }
    int n_outcomes() const { return levels_.front().n_outcomes(); }
    const Partition& at(int t) const { return levels_[static_cast<std::size_t>(t)]; }
    // Convention: the sigma-field "just before" time t; at t=0 this is F_0.
    const Partition& before(int t) const { return levels_[static_cast<std::size_t>(t > 0 ? t - 1 : 0)]; }

    bool operator==(const Filtration& other) const = default;

private:
    std::vector<Partition> levels_;
};

// ---------------------------------------------------------------------------
// Conditional expectation kernels. The mass-vector overloads support measures
// that are only absolutely continuous: atoms of zero total mass are skipped
// by callers (their conditional values are undefined).
// ---------------------------------------------------------------------------

// E[X | pi] under the masses vector; atoms with zero mass get value 0 and are
// reported through `defined` when the caller passes one.
inline RatVec cond_exp(const RatVec& x, const Partition& pi, const RatVec& masses,
                       std::vector<bool>* defined = nullptr) {
    RatVec out(x.size(), Rational(0));
    if (defined) defined->assign(x.size(), false);
    for (const auto& block : pi.blocks()) {
        Rational mass = 0, weighted = 0;
        for (int omega : block) {
            mass += masses[static_cast<std::size_t>(omega)];
            weighted += masses[static_cast<std::size_t>(omega)] * x[static_cast<std::size_t>(omega)];
        }
        if (mass == 0) continue;
        const Rational value = weighted / mass;
        for (int omega : block) {
            out[static_cast<std::size_t>(omega)] = value;
            if (defined) (*defined)[static_cast<std::size_t>(omega)] = true;
        }
    }
    return out;
}

inline RatVec cond_exp(const RatVec& x, const Partition& pi, const FiniteProbSpace& space) {
    return cond_exp(x, pi, space.probs());
}

// E[1_A | pi]; A given as outcome indicator.
inline RatVec cond_prob(const std::vector<bool>& event, const Partition& pi,
                        const FiniteProbSpace& space) {
    RatVec ind(event.size());
    for (std::size_t i = 0; i < event.size(); ++i) ind[i] = event[i] ? 1 : 0;
    return cond_exp(ind, pi, space);
}

// ---------------------------------------------------------------------------
// Measure changes. A density with zeros produces an absolutely continuous
// measure; the null set is kept (outcomes retain their index) but flagged.
// ---------------------------------------------------------------------------

class Measure {
public:
    // masses(omega) = density(omega) * p(omega); must be >= 0 and sum to 1.
    Measure(RatVec masses) : masses_(std::move(masses)) {
        Rational total = 0;
        for (std::size_t i = 0; i < masses_.size(); ++i) {
            if (masses_[i] < 0)
                throw std::invalid_argument("measure: negative mass at outcome " + std::to_string(i));
            total += masses_[i];
        }
        if (total != 1)
            throw std::invalid_argument("measure: total mass " + rat_to_string(total) +
                                        ", expected 1");
        for (const auto& m : masses_) support_.push_back(m > 0);
    }

    static Measure from_space(const FiniteProbSpace& space) { return Measure(space.probs()); }

    int n_outcomes() const { return static_cast<int>(masses_.size()); }
    const Rational& mass(int omega) const { return masses_[static_cast<std::size_t>(omega)]; }
    const RatVec& masses() const { return masses_; }
    bool in_support(int omega) const { return support_[static_cast<std::size_t>(omega)]; }
    bool equivalent() const {
        for (bool s : support_)
            if (!s) return false;
        return true;
    }
    std::vector<int> null_set() const {
        std::vector<int> out;
        for (int i = 0; i < n_outcomes(); ++i)
            if (!in_support(i)) out.push_back(i);
        return out;
    }

    bool operator==(const Measure& other) const { return masses_ == other.masses_; }

private:
    RatVec masses_;
    std::vector<bool> support_;
};

// Applies a density dQ/dP. Requires density >= 0 with E[density] = 1; the
// result is equivalent iff density > 0 everywhere.
inline Measure reweight(const FiniteProbSpace& space, const RatVec& density) {
    if (static_cast<int>(density.size()) != space.n_outcomes())
        throw std::invalid_argument("reweight: density size mismatch");
    RatVec masses(density.size());
    for (std::size_t i = 0; i < density.size(); ++i) {
        if (density[i] < 0)
            throw std::invalid_argument("reweight: negative density at outcome " + std::to_string(i));
        masses[i] = density[i] * space.prob(static_cast<int>(i));
    }
    return Measure(std::move(masses));  // Measure ctor enforces total mass 1
}

}  // namespace nupbr
