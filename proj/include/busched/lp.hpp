#pragma once

#include <cstddef>
#include <vector>

namespace busched {

enum class RowSense { LessEqual, Equal, GreaterEqual };

// min c'x  s.t.  rows (<=, =, >=) rhs,  x >= 0.  Dense storage: the
// problems solved here have a handful of rows and columns.
struct LinearProgram {
    std::size_t num_vars = 0;
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<RowSense> senses;
    std::vector<double> rhs;

    explicit LinearProgram(std::size_t n = 0) : num_vars(n), objective(n, 0.0) {}

    void add_row(std::vector<double> coeffs, RowSense sense, double b) {
        coeffs.resize(num_vars, 0.0);
        rows.push_back(std::move(coeffs));
        senses.push_back(sense);
        rhs.push_back(b);
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
};

inline constexpr double kPivotTolerance = 1e-12;

enum class PivotRule {
    Bland,    // lowest-index improving column; never cycles
    Dantzig,  // most negative reduced cost, falling back to Bland after a run of degenerate pivots
};

// Two-phase tableau simplex. Throws DegeneracyError when no pivot element
// exceeds kPivotTolerance or the iteration cap is hit.
LpResult solve_lp(const LinearProgram& lp, PivotRule rule = PivotRule::Bland);

} // namespace busched
