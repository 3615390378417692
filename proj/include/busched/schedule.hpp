#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "busched/instance.hpp"
#include "busched/types.hpp"

namespace busched {

struct Step {
    Configuration config;
    double duration = 0.0;

    friend bool operator==(const Step&, const Step&) = default;
};

struct Assignment {
    JobId job = 0;
    int core = 0;  // 1..c
    double start = 0.0;
    double finish = 0.0;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Schedule {
    std::vector<Step> steps;
    std::vector<Assignment> assignments;  // sorted by job id
    double makespan = 0.0;

    const Assignment* assignment(JobId p) const;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

// Core assignment from an ordered configuration sequence: continuing jobs
// keep their core, departing jobs release theirs, arriving jobs take the
// lowest free one. Throws ContractViolation on a non-contiguous job run or a
// step wider than the core count.
std::vector<Assignment> assign_cores(std::span<const Step> steps, int cores);

// Steps plus Algorithm-2 assignments; makespan is the sum of durations.
Schedule make_schedule(std::vector<Step> steps, int cores);

// Every violated schedule invariant, as readable messages (empty when valid).
// Checks core overlap, precedence, contiguity, coverage of all jobs, and
// makespan consistency.
std::vector<std::string> schedule_violations(const Schedule& sched, const Instance& inst, double tol = 1e-9);

// Per-job accumulated work sum(duration * v) compared with s_p, relative.
double max_completion_error(const Schedule& sched, const Instance& inst, const SpeedTable& speeds);

nlohmann::json to_json(const Schedule& sched);
Schedule schedule_from_json(const nlohmann::json& doc);
void save_schedule(const Schedule& sched, const std::filesystem::path& path);
Schedule load_schedule(const std::filesystem::path& path);

} // namespace busched
