#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "busched/configspace.hpp"
#include "busched/exact.hpp"
#include "busched/instance.hpp"
#include "busched/lp.hpp"
#include "busched/schedule.hpp"

namespace busched {

inline constexpr std::size_t kDefaultMilpVariableCap = 2'000'000;

struct MilpOptions {
    int event_points = 0;  // maximal event index e; 0 means 2m
    // Emit the ordering constraint exactly as printed (big-M over every pair
    // of event points) instead of the pairwise-conflict form. The printed
    // form makes predecessors unschedulable; kept for comparison only.
    bool literal_order = false;
    std::size_t variable_cap = kDefaultMilpVariableCap;
};

enum class VarKind { Continuous, Binary };

struct MilpVariable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = 0.0;  // ignored for unbounded continuous variables
    bool bounded_above = false;
};

struct LinearTerm {
    std::size_t var = 0;
    double coef = 0.0;
};

struct MilpConstraint {
    std::string name;
    std::vector<LinearTerm> terms;
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
};

// Event-point model over a fixed configuration space. Variables are laid
// out as t_n_k, then d_n_k (both n-major), then y_p_n (p-major).
class MilpModel {
public:
    int jobs() const { return jobs_; }
    int cores() const { return cores_; }
    int event_points() const { return e_; }
    double t_max() const { return t_max_; }
    bool literal_order() const { return literal_order_; }
    const std::vector<Configuration>& configs() const { return configs_; }

    std::size_t t(int n, std::size_t k) const { return static_cast<std::size_t>(n) * configs_.size() + k; }
    std::size_t d(int n, std::size_t k) const { return block() + t(n, k); }
    std::size_t y(JobId p, int n) const {
        return 2 * block() + static_cast<std::size_t>(p - 1) * static_cast<std::size_t>(e_ + 1) + static_cast<std::size_t>(n);
    }

    const std::vector<MilpVariable>& variables() const { return vars_; }
    const std::vector<MilpConstraint>& constraints() const { return rows_; }
    const std::vector<LinearTerm>& objective() const { return objective_; }

    std::size_t count(VarKind kind) const;
    std::size_t variable_index(const std::string& name) const;  // ParseError if unknown

private:
    friend MilpModel build_milp(const Instance& inst, const ConfigSpace& space, const MilpOptions& options);

    std::size_t block() const { return static_cast<std::size_t>(e_ + 1) * configs_.size(); }

    int jobs_ = 0;
    int cores_ = 0;
    int e_ = 0;
    double t_max_ = 0.0;
    bool literal_order_ = false;
    std::vector<Configuration> configs_;
    std::vector<MilpVariable> vars_;
    std::vector<MilpConstraint> rows_;
    std::vector<LinearTerm> objective_;
};

// Throws CapacityError when (e + 1)|K| exceeds options.variable_cap.
MilpModel build_milp(const Instance& inst, const ConfigSpace& space, const MilpOptions& options = {});

// CPLEX LP text. Coefficients use %.17g; output depends only on the model.
void write_lp(const MilpModel& model, std::ostream& out);
void export_lp(const MilpModel& model, const std::filesystem::path& path);

// Variable name -> (kind, event point, configuration job set or job).
nlohmann::json milp_metadata(const MilpModel& model);
void export_metadata(const MilpModel& model, const std::filesystem::path& path);

struct MilpSolution {
    std::vector<double> values;  // indexed like MilpModel::variables()
    double objective = 0.0;      // sum of t
};

// "name value" per line; blank lines and lines starting with '#' are
// skipped; variables not listed are 0.
MilpSolution parse_solution(const MilpModel& model, std::istream& in);
MilpSolution load_solution(const MilpModel& model, const std::filesystem::path& path);

// Bound, integrality and row violations of a solution, as readable messages.
std::vector<std::string> solution_violations(const MilpModel& model, const MilpSolution& sol, double tol = 1e-6);

// Event points with positive duration become steps in event order; Algorithm
// 2 assigns cores. Throws ValidationError for fractional binaries, an event
// point without exactly one configuration, a job whose event points are not
// contiguous, idle time inside the schedule, or a makespan that disagrees
// with the objective.
Schedule schedule_from_solution(const MilpModel& model, const MilpSolution& sol, double tol = 1e-6);

// Embeds a configuration sequence: step i at event point i + 1, the zero
// configuration at every other point. Throws InvalidArgument when the
// sequence is longer than e.
MilpSolution solution_from_sequence(const MilpModel& model, const ConfigSpace& space, const ConfigSequence& seq,
                                    std::span<const double> durations);

} // namespace busched
