// Exact two-phase primal simplex over the rationals, standard form
//   maximize c.x  subject to  A x = b, x >= 0.
// Pivoting uses Bland's rule (lowest eligible index in, lowest basic index
// out on ratio ties), which terminates without any numerical tie-breaking.
// Problem sizes here are tiny (one LP per time step and atom), so the plain
// dense tableau is the right tool.
#pragma once

#include <stdexcept>
#include <vector>

#include "nupbr/rational.hpp"

namespace nupbr {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Rational objective;
    RatVec x;  // primal solution (original variables), when optimal
};

namespace detail {

// Tableau rows are [coefficients | rhs]; row `m` is the reduced-cost row
// with rhs = -objective.
class SimplexTableau {
public:
    SimplexTableau(std::vector<RatVec> rows, std::vector<int> basis, int n_cols)
        : rows_(std::move(rows)), basis_(std::move(basis)), n_cols_(n_cols) {}

    int n_rows() const { return static_cast<int>(basis_.size()); }
    const std::vector<int>& basis() const { return basis_; }
    const Rational& rhs(int i) const { return rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(n_cols_)]; }
    const Rational& coeff(int i, int j) const { return rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
    const RatVec& cost_row() const { return rows_.back(); }

    void set_cost_row(const RatVec& costs) {
        // Rebuild reduced costs consistent with the current basis.
        RatVec& r = rows_.back();
        r.assign(static_cast<std::size_t>(n_cols_ + 1), Rational(0));
        for (int j = 0; j < n_cols_; ++j)
            r[static_cast<std::size_t>(j)] = j < static_cast<int>(costs.size()) ? costs[static_cast<std::size_t>(j)] : Rational(0);
        for (int i = 0; i < n_rows(); ++i) {
            const int bj = basis_[static_cast<std::size_t>(i)];
            const Rational cb = r[static_cast<std::size_t>(bj)];
            if (cb == 0) continue;
            for (int j = 0; j <= n_cols_; ++j)
                r[static_cast<std::size_t>(j)] -= cb * coeff(i, j);
        }
    }

    void pivot(int row, int col) {
        RatVec& pr = rows_[static_cast<std::size_t>(row)];
        const Rational inv = Rational(1) / pr[static_cast<std::size_t>(col)];
        for (auto& v : pr) v *= inv;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (static_cast<int>(i) == row) continue;
            const Rational factor = rows_[i][static_cast<std::size_t>(col)];
            if (factor == 0) continue;
            for (std::size_t j = 0; j < rows_[i].size(); ++j)
                rows_[i][j] -= factor * pr[j];
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    // Runs primal simplex with Bland's rule on columns < col_limit.
    // Returns false on unboundedness.
    bool maximize(int col_limit) {
        for (;;) {
            const RatVec& r = rows_.back();
            int entering = -1;
            for (int j = 0; j < col_limit; ++j)
                if (r[static_cast<std::size_t>(j)] > 0) {
                    entering = j;
                    break;
                }
            if (entering == -1) return true;
            int leaving = -1;
            Rational best_ratio;
            for (int i = 0; i < n_rows(); ++i) {
                const Rational& a = coeff(i, entering);
                if (a <= 0) continue;
                const Rational ratio = rhs(i) / a;
                if (leaving == -1 || ratio < best_ratio ||
                    (ratio == best_ratio &&
                     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)])) {
                    leaving = i;
                    best_ratio = ratio;
                }
            }
            if (leaving == -1) return false;
            pivot(leaving, entering);
        }
    }

    // Drops artificial columns after phase 1, removing redundant rows.
    void eliminate_artificials(int n_real) {
        for (int i = 0; i < n_rows(); ++i) {
            if (basis_[static_cast<std::size_t>(i)] < n_real) continue;
            int col = -1;
            for (int j = 0; j < n_real; ++j)
                if (coeff(i, j) != 0) {
                    col = j;
                    break;
                }
            if (col != -1) {
                pivot(i, col);
            } else {
                rows_.erase(rows_.begin() + i);
                basis_.erase(basis_.begin() + i);
                --i;
            }
        }
        for (auto& row : rows_) row.erase(row.begin() + n_real, row.begin() + n_cols_);
        n_cols_ = n_real;
    }

private:
    std::vector<RatVec> rows_;
    std::vector<int> basis_;
    int n_cols_;
};

}  // namespace detail

inline LpResult lp_solve_max(const std::vector<RatVec>& a, const RatVec& b, const RatVec& c) {
    const int m = static_cast<int>(a.size());
    const int n = m > 0 ? static_cast<int>(a.front().size()) : static_cast<int>(c.size());
    for (const auto& row : a)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("lp: ragged matrix");
    if (static_cast<int>(b.size()) != m || static_cast<int>(c.size()) != n)
        throw std::invalid_argument("lp: shape mismatch");

    // Phase 1 tableau: [A | I | b] with nonnegative rhs, artificial basis.
    std::vector<RatVec> rows;
    std::vector<int> basis;
    for (int i = 0; i < m; ++i) {
        RatVec row(static_cast<std::size_t>(n + m + 1), Rational(0));
        const bool flip = b[static_cast<std::size_t>(i)] < 0;
        for (int j = 0; j < n; ++j)
            row[static_cast<std::size_t>(j)] = flip ? -a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                                                    : a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        row[static_cast<std::size_t>(n + i)] = 1;
        row[static_cast<std::size_t>(n + m)] = flip ? -b[static_cast<std::size_t>(i)] : b[static_cast<std::size_t>(i)];
        rows.push_back(std::move(row));
        basis.push_back(n + i);
    }
    rows.emplace_back(static_cast<std::size_t>(n + m + 1), Rational(0));
    detail::SimplexTableau tab(std::move(rows), std::move(basis), n + m);

    RatVec phase1_costs(static_cast<std::size_t>(n + m), Rational(0));
    for (int j = n; j < n + m; ++j) phase1_costs[static_cast<std::size_t>(j)] = -1;
    tab.set_cost_row(phase1_costs);
    if (!tab.maximize(n + m)) throw std::logic_error("lp: phase 1 unbounded");
    if (tab.cost_row().back() != 0) return {LpStatus::infeasible, Rational(0), {}};

    tab.eliminate_artificials(n);
    tab.set_cost_row(c);
    if (!tab.maximize(n)) return {LpStatus::unbounded, Rational(0), {}};

    LpResult out;
    out.status = LpStatus::optimal;
    out.objective = -tab.cost_row().back();
    out.x.assign(static_cast<std::size_t>(n), Rational(0));
    for (int i = 0; i < tab.n_rows(); ++i)
        out.x[static_cast<std::size_t>(tab.basis()[static_cast<std::size_t>(i)])] = tab.rhs(i);
    return out;
}

}  // namespace nupbr
