#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "busched/configspace.hpp"
#include "busched/instance.hpp"
#include "busched/schedule.hpp"

namespace busched {

// Indices into a ConfigSpace, in execution order.
using ConfigSequence = std::vector<std::size_t>;

inline constexpr int kDefaultJobGuard = 8;

struct SequenceOptions {
    int max_len = 0;          // 0 means 2m
    bool allow_idle = false;  // permit the zero configuration between runs
    int job_guard = kDefaultJobGuard;
};

// Every canonical sequence: contiguous job runs, all jobs covered,
// precedence-consistent, no adjacent repeats, length <= max_len.
void for_each_sequence(const Instance& inst, const ConfigSpace& space, const SequenceOptions& options,
                       const std::function<void(const ConfigSequence&)>& visit);
std::vector<ConfigSequence> enumerate_sequences(const Instance& inst, const ConfigSpace& space, int max_len,
                                                int job_guard = kDefaultJobGuard);

struct SequenceDurations {
    std::vector<double> durations;
    double makespan = 0.0;
};

// min sum(t) s.t. sum_i v(p, k_i) t_i = s_p for every job, t >= 0.
// nullopt when infeasible.
std::optional<SequenceDurations> min_durations(const ConfigSequence& seq, const ConfigSpace& space,
                                               const SpeedTable& speeds, std::span<const double> ideal_times);

struct ExactOptions {
    int job_guard = kDefaultJobGuard;
    int max_len = 0;  // 0 means 2m
    bool allow_idle = false;
    // Prune prefixes longer than m: an optimal basic LP solution has at most
    // m positive durations, and dropping zero-length steps keeps a sequence
    // canonical.
    bool basic_length_bound = true;
    bool parallel = false;  // OpenMP over first-configuration branches
};

struct ExactResult {
    Schedule schedule;
    ConfigSequence sequence;
    std::vector<double> durations;
    double makespan = 0.0;
    double initial_upper_bound = 0.0;
    std::uint64_t nodes = 0;
};

// Minimum makespan over canonical configuration sequences, by depth-first
// branch and bound with an LP lower bound on every prefix.
ExactResult exact_solve(const Instance& inst, const ExactOptions& options = {});
Schedule exact_makespan(const Instance& inst, const ExactOptions& options = {});

// Optimal makespan when jobs never slow each other: exhaustive assignment of
// jobs to identical cores.
double brute_force_no_interference(std::span<const double> lengths, int cores);

} // namespace busched
