#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "busched/busmodel.hpp"
#include "busched/instance.hpp"
#include "busched/schedule.hpp"

namespace busched {

struct NoiseOptions {
    double amplitude = 0.0;  // delta in [0, 1)
    std::uint64_t seed = 0;
    bool slowdown_only = false;  // factors in [1 - delta, 1] instead of [1 - delta, 1 + delta]
};

// Speeds used as "reality" during replay: bus demands (evaluated with the
// fair-share allocation for whatever set is running) or an explicit table,
// times a seeded per-(job, configuration) factor, clamped to (0, 1].
class GroundTruthModel {
public:
    static GroundTruthModel from_demands(std::vector<double> demands, NoiseOptions noise = {});
    static GroundTruthModel from_table(SpeedTable table, NoiseOptions noise = {});
    // The model the instance was planned under: its demands for F2, its
    // table for F1.
    static GroundTruthModel planning_model(const Instance& inst, NoiseOptions noise = {});

    // Aligned with config.jobs(). ModelCoverageError for an uncovered
    // configuration.
    std::vector<double> speeds(const Configuration& config) const;
    double noise_factor(JobId p, const Configuration& config) const;
    const NoiseOptions& noise() const { return noise_; }

private:
    GroundTruthModel() = default;

    std::optional<std::vector<double>> demands_;
    std::optional<SpeedTable> table_;
    NoiseOptions noise_;
};

struct JobTiming {
    JobId job = 0;
    int core = 0;
    double start = 0.0;
    double finish = 0.0;
};

struct SimulationReport {
    double planned_makespan = 0.0;
    double measured_makespan = 0.0;
    double deviation_pct = 0.0;  // 100 (planned - measured) / measured
    std::vector<JobTiming> jobs;  // sorted by job id
    std::size_t events = 0;
};

// Event-driven replay. Each core runs its planned jobs in start order, with
// planned idle gaps kept as fixed-length placeholders. A job starts once its
// core is free and every job planned to finish by its planned start has
// finished. Progress between events is integrated exactly.
SimulationReport simulate(const Instance& inst, const Schedule& sched, const GroundTruthModel& truth);

// Completion time of every entry of a co-run multiset under F2 demands.
// Finished co-runners are restarted, so the mix is constant and each entry
// takes s / v.
std::vector<double> corun_times(std::span<const JobId> multiset, std::span<const double> ideal_times,
                                std::span<const double> demands);

// Measurement hook for estimate_bandwidth backed by corun_times.
CorunOracle make_corun_oracle(std::vector<double> ideal_times, std::vector<double> demands);

} // namespace busched
