#pragma once

#include <functional>
#include <span>
#include <vector>

#include "busched/configspace.hpp"
#include "busched/instance.hpp"
#include "busched/types.hpp"

namespace busched {

// Bus share granted to each member of a configuration, aligned with
// Configuration::jobs().
struct Allocation {
    std::vector<JobId> jobs;
    std::vector<double> shares;

    double share(JobId p) const;
    double total() const;
};

// Max-min fair split of 100% bus capacity over a list of demands.
// Repeatedly grants the full demand of a job strictly below the current
// equal share (scanning in ascending demand, then position), otherwise
// splits what is left equally. Works on multisets, so co-runs of several
// copies of one job are expressible.
std::vector<double> water_fill(std::span<const double> demands);

// `demands` is indexed by job id - 1.
Allocation allocate_bus(const Configuration& config, std::span<const double> demands);

// v_p = z_p / b_p, with v_p = 1 for zero-demand jobs. Aligned with config.jobs().
std::vector<double> speeds_f2(const Configuration& config, std::span<const double> demands);

// Speed of every member of every non-zero configuration. The OpenMP version
// splits the configuration range across threads; the serial one is kept as
// the reference.
SpeedTable materialize_speed_table(const Instance& inst, const ConfigSpace& space);
SpeedTable materialize_speed_table_serial(const Instance& inst, const ConfigSpace& space);

// The instance's own table for F1, or the materialized one for F2.
SpeedTable resolve_speed_table(const Instance& inst, const ConfigSpace& space);

// Measurement hook: given a multiset of jobs started together (co-runners are
// restarted so the mix stays constant), returns each entry's completion time.
using CorunOracle = std::function<std::vector<double>(std::span<const JobId>)>;

// Bus-demand estimate per job (indexed by id - 1) from co-run measurements:
// c self-copies first, then (c - 1) copies of the heaviest resolved job, else 0.
std::vector<double> estimate_bandwidth(const CorunOracle& oracle, int jobs, int cores);

} // namespace busched
