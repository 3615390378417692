#pragma once

#include "busched/instance.hpp"
#include "busched/schedule.hpp"

namespace busched {

// Greedy list scheduler for bus-demand (F2) instances.
//
// Each iteration carries over unfinished jobs, fills free cores with the
// admissible job whose demand is closest to the remaining bus share while
// bus capacity is left, then with the lowest-demand admissible jobs. The
// configuration runs until its first job completes. Ties go to the lowest
// job id; zero-demand jobs are only picked in the second phase.
Schedule greedy_schedule(const Instance& inst);

} // namespace busched
