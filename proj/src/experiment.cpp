#include "busched/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <tuple>

#include "busched/error.hpp"
#include "busched/greedy.hpp"
#include "busched/rng.hpp"

namespace busched {

namespace {

const std::vector<OrderKind> kAllOrders{OrderKind::Trivial, OrderKind::Random, OrderKind::Bitree, OrderKind::OneToManyToOne};

template <class F>
SolverRun timed_run(const Instance& inst, const GroundTruthModel& truth, F&& solve) {
    const auto t0 = std::chrono::steady_clock::now();
    const Schedule sched = solve();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const SimulationReport rep = simulate(inst, sched, truth);
    return {rep.planned_makespan, rep.measured_makespan, rep.deviation_pct, seconds};
}

struct Cell {
    int m;
    int cores;
    OrderKind order;
    int seed_index;
};

CompareRow run_cell(const Cell& cell, const CompareOptions& options) {
    CompareRow row;
    row.instance_id = instance_id(cell.m, cell.cores, cell.order, cell.seed_index);
    row.m = cell.m;
    row.cores = cell.cores;
    row.order = cell.order;
    row.seed_index = cell.seed_index;
    row.seed = cell_seed(options.base_seed, cell.m, cell.cores, cell.order, cell.seed_index);

    const Instance inst = gen_instance(cell.m, cell.cores, cell.order, row.seed);
    NoiseOptions noise = options.noise;
    noise.seed = mix64(options.noise.seed ^ row.seed);
    const GroundTruthModel truth = GroundTruthModel::planning_model(inst, noise);

    row.greedy = timed_run(inst, truth, [&] { return greedy_schedule(inst); });
    if (cell.m <= options.job_guard) {
        ExactOptions exact;
        exact.job_guard = options.job_guard;
        row.exact = timed_run(inst, truth, [&] { return exact_makespan(inst, exact); });
    }
    return row;
}

} // namespace

ComparePreset full_preset() { return {{4, 6, 7, 8, 10}, {2, 3, 4}, kAllOrders, 16}; }

ComparePreset quick_preset() { return {{4, 5}, {2, 3}, kAllOrders, 2}; }

ComparePreset preset_from_string(const std::string& name) {
    if (name == "full") return full_preset();
    if (name == "quick") return quick_preset();
    throw InvalidArgument("unknown preset '" + name + "' (expected full or quick)");
}

std::optional<double> CompareRow::ratio() const {
    if (!exact) return std::nullopt;
    return greedy.measured / exact->measured;
}

std::uint64_t cell_seed(std::uint64_t base, int m, int cores, OrderKind order, int seed_index) {
    std::uint64_t h = mix64(base);
    for (std::uint64_t part : {std::uint64_t(m), std::uint64_t(cores), std::uint64_t(order), std::uint64_t(seed_index)})
        h = mix64(h ^ part);
    return h;
}

std::string instance_id(int m, int cores, OrderKind order, int seed_index) {
    return "m" + std::to_string(m) + "_c" + std::to_string(cores) + "_" + to_string(order) + "_s" + std::to_string(seed_index);
}

std::vector<CompareRow> run_compare(const CompareOptions& options) {
    const ComparePreset& p = options.preset;
    if (p.seeds < 1) throw InvalidArgument("seeds per cell must be >= 1");
    std::vector<Cell> cells;
    for (int m : p.jobs)
        for (int c : p.cores)
            for (OrderKind o : p.orders) {
                if (o == OrderKind::OneToManyToOne && m < 3) continue;
                for (int s = 0; s < p.seeds; ++s) cells.push_back({m, c, o, s});
            }

    std::vector<CompareRow> rows(cells.size());
    const auto count = static_cast<long>(cells.size());
    if (options.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < count; ++i) rows[static_cast<std::size_t>(i)] = run_cell(cells[static_cast<std::size_t>(i)], options);
    } else {
        for (long i = 0; i < count; ++i) rows[static_cast<std::size_t>(i)] = run_cell(cells[static_cast<std::size_t>(i)], options);
    }
    std::sort(rows.begin(), rows.end(), [](const CompareRow& a, const CompareRow& b) {
        return std::tie(a.m, a.cores, a.order, a.seed_index) < std::tie(b.m, b.cores, b.order, b.seed_index);
    });
    return rows;
}

std::vector<ReportRow> report_rows(const std::vector<CompareRow>& rows) {
    std::vector<ReportRow> out;
    for (const auto& r : rows) {
        out.push_back({r.instance_id, "greedy", r.greedy.planned, r.greedy.measured, r.greedy.deviation_pct});
        if (r.exact) out.push_back({r.instance_id, "exact", r.exact->planned, r.exact->measured, r.exact->deviation_pct});
    }
    return out;
}

std::vector<BoxRow> ratio_boxes(const std::vector<CompareRow>& rows) {
    std::map<int, std::vector<double>> by_m;
    for (const auto& r : rows)
        if (auto q = r.ratio()) by_m[r.m].push_back(*q);
    std::vector<BoxRow> out;
    for (const auto& [m, ratios] : by_m) out.push_back({m, box_summary(ratios)});
    return out;
}

std::vector<RuntimeRow> runtime_rows(const std::vector<CompareRow>& rows) {
    std::map<std::tuple<int, int, OrderKind, std::string>, std::vector<double>> groups;
    for (const auto& r : rows) {
        groups[{r.m, r.cores, r.order, "greedy"}].push_back(r.greedy.seconds);
        if (r.exact) groups[{r.m, r.cores, r.order, "exact"}].push_back(r.exact->seconds);
    }
    std::vector<RuntimeRow> out;
    for (const auto& [key, secs] : groups) {
        const auto& [m, c, order, solver] = key;
        double total = 0.0, worst = 0.0;
        for (double s : secs) {
            total += s;
            worst = std::max(worst, s);
        }
        out.push_back({m, c, to_string(order), solver, secs.size(), total / static_cast<double>(secs.size()), worst});
    }
    return out;
}

} // namespace busched
