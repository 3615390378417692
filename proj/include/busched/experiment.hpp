#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "busched/exact.hpp"
#include "busched/instance.hpp"
#include "busched/report.hpp"
#include "busched/simulator.hpp"

namespace busched {

struct ComparePreset {
    std::vector<int> jobs;
    std::vector<int> cores;
    std::vector<OrderKind> orders;
    int seeds = 1;
};

// Job counts {4,6,7,8,10}, cores {2,3,4}, all order kinds, 16 seeds per
// cell (192 instances per job count).
ComparePreset full_preset();
// Small smoke-test grid.
ComparePreset quick_preset();
ComparePreset preset_from_string(const std::string& name);

struct CompareOptions {
    ComparePreset preset;
    NoiseOptions noise;  // per-instance seed is derived from noise.seed and the cell
    int job_guard = kDefaultJobGuard;
    bool parallel = true;  // OpenMP over instances
    std::uint64_t base_seed = 0;
};

struct SolverRun {
    double planned = 0.0;
    double measured = 0.0;
    double deviation_pct = 0.0;
    double seconds = 0.0;
};

struct CompareRow {
    std::string instance_id;
    int m = 0;
    int cores = 0;
    OrderKind order = OrderKind::Trivial;
    int seed_index = 0;
    std::uint64_t seed = 0;
    SolverRun greedy;
    std::optional<SolverRun> exact;  // absent above the exact guard
    // measured greedy / measured exact
    std::optional<double> ratio() const;
};

std::uint64_t cell_seed(std::uint64_t base, int m, int cores, OrderKind order, int seed_index);
std::string instance_id(int m, int cores, OrderKind order, int seed_index);

// Greedy and exact on every preset instance, each replayed under the
// instance's planning model with the configured noise. Rows come back
// sorted by (m, cores, order, seed index) whatever the thread count.
std::vector<CompareRow> run_compare(const CompareOptions& options);

std::vector<ReportRow> report_rows(const std::vector<CompareRow>& rows);
std::vector<BoxRow> ratio_boxes(const std::vector<CompareRow>& rows);
std::vector<RuntimeRow> runtime_rows(const std::vector<CompareRow>& rows);

} // namespace busched
