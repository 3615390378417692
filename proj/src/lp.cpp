#include "busched/lp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "busched/error.hpp"

namespace busched {

namespace {

constexpr double kCostTolerance = 1e-10;

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0), basis_(rows, 0) {}

    double& at(std::size_t i, std::size_t j) { return data_[i * (cols_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * (cols_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, cols_); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t r, std::size_t c, std::vector<double>& cost) {
        const double inv = 1.0 / at(r, c);
        for (std::size_t j = 0; j <= cols_; ++j) at(r, j) *= inv;
        at(r, c) = 1.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
            at(i, c) = 0.0;
        }
        const double f = cost[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= cols_; ++j) cost[j] -= f * at(r, j);
            cost[c] = 0.0;
        }
        basis_[r] = c;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::vector<std::size_t> basis_;
};

// Reduced-cost row for the current basis; the last entry is -objective.
std::vector<double> reduced_costs(Tableau& t, const std::vector<double>& c) {
    std::vector<double> cost(t.cols() + 1, 0.0);
    for (std::size_t j = 0; j < t.cols(); ++j) cost[j] = c[j];
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const double cb = c[t.basis()[i]];
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= t.cols(); ++j) cost[j] -= cb * t.at(i, j);
    }
    return cost;
}

enum class PhaseOutcome { Optimal, Unbounded };

constexpr std::size_t kDegenerateRunLimit = 8;

PhaseOutcome run_phase(Tableau& t, std::vector<double>& cost, std::size_t enter_limit, PivotRule rule) {
    const std::size_t cap = 50 * (t.rows() + t.cols()) + 100;
    std::size_t degenerate_run = 0;
    for (std::size_t iter = 0; iter < cap; ++iter) {
        const bool bland = rule == PivotRule::Bland || degenerate_run >= kDegenerateRunLimit;
        std::size_t enter = enter_limit;
        double most_negative = -kCostTolerance;
        for (std::size_t j = 0; j < enter_limit; ++j)
            if (cost[j] < most_negative) {
                enter = j;
                if (bland) break;
                most_negative = cost[j];
            }
        if (enter == enter_limit) return PhaseOutcome::Optimal;

        std::size_t leave = t.rows();
        double best_ratio = std::numeric_limits<double>::infinity();
        bool tiny_only = false;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a <= kPivotTolerance) {
                if (a > 0.0) tiny_only = true;
                continue;
            }
            const double ratio = t.rhs(i) / a;
            if (ratio < best_ratio - 1e-14 ||
                (std::abs(ratio - best_ratio) <= 1e-14 && leave < t.rows() && t.basis()[i] < t.basis()[leave])) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave == t.rows()) {
            if (tiny_only) throw DegeneracyError("simplex pivot below tolerance");
            return PhaseOutcome::Unbounded;
        }
        degenerate_run = best_ratio <= 1e-14 ? degenerate_run + 1 : 0;
        t.pivot(leave, enter, cost);
    }
    throw DegeneracyError("simplex iteration cap reached");
}

} // namespace

LpResult solve_lp(const LinearProgram& lp, PivotRule rule) {
    const std::size_t m = lp.rows.size();
    const std::size_t n = lp.num_vars;

    // Normalize to non-negative right-hand sides.
    std::vector<RowSense> sense = lp.senses;
    std::vector<double> sign(m, 1.0);
    for (std::size_t i = 0; i < m; ++i)
        if (lp.rhs[i] < 0.0) {
            sign[i] = -1.0;
            if (sense[i] == RowSense::LessEqual) sense[i] = RowSense::GreaterEqual;
            else if (sense[i] == RowSense::GreaterEqual) sense[i] = RowSense::LessEqual;
        }

    std::size_t slack_count = 0;
    std::size_t artificial_count = 0;
    for (RowSense s : sense) {
        if (s != RowSense::Equal) ++slack_count;
        if (s != RowSense::LessEqual) ++artificial_count;
    }
    const std::size_t first_artificial = n + slack_count;
    const std::size_t cols = first_artificial + artificial_count;

    Tableau t(m, cols);
    std::size_t next_slack = n;
    std::size_t next_artificial = first_artificial;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign[i] * lp.rows[i][j];
        t.rhs(i) = sign[i] * lp.rhs[i];
        switch (sense[i]) {
        case RowSense::LessEqual:
            t.at(i, next_slack) = 1.0;
            t.basis()[i] = next_slack++;
            break;
        case RowSense::GreaterEqual:
            t.at(i, next_slack++) = -1.0;
            t.at(i, next_artificial) = 1.0;
            t.basis()[i] = next_artificial++;
            break;
        case RowSense::Equal:
            t.at(i, next_artificial) = 1.0;
            t.basis()[i] = next_artificial++;
            break;
        }
    }

    LpResult result;
    if (artificial_count > 0) {
        std::vector<double> phase1(cols, 0.0);
        for (std::size_t j = first_artificial; j < cols; ++j) phase1[j] = 1.0;
        auto cost = reduced_costs(t, phase1);
        run_phase(t, cost, cols, rule);
        double infeasibility = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (t.basis()[i] >= first_artificial) infeasibility += t.rhs(i);
        double scale = 1.0;
        for (double b : lp.rhs) scale = std::max(scale, std::abs(b));
        if (infeasibility > 1e-9 * scale) {
            result.status = LpStatus::Infeasible;
            return result;
        }
        // Drive artificials still in the basis (at zero) out where possible;
        // rows with no usable entry are redundant and left alone.
        for (std::size_t i = 0; i < m; ++i) {
            if (t.basis()[i] < first_artificial) continue;
            for (std::size_t j = 0; j < first_artificial; ++j)
                if (std::abs(t.at(i, j)) > 1e-9) {
                    t.pivot(i, j, cost);
                    break;
                }
        }
    }

    std::vector<double> phase2(cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) phase2[j] = lp.objective[j];
    auto cost = reduced_costs(t, phase2);
    if (run_phase(t, cost, first_artificial, rule) == PhaseOutcome::Unbounded) {
        result.status = LpStatus::Unbounded;
        return result;
    }

    result.status = LpStatus::Optimal;
    result.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis()[i] < n) result.x[t.basis()[i]] = std::max(0.0, t.rhs(i));
    result.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) result.objective += lp.objective[j] * result.x[j];
    return result;
}

} // namespace busched
