#include "busched/greedy.hpp"

#include <cmath>
#include <limits>

#include "busched/busmodel.hpp"
#include "busched/error.hpp"

namespace busched {

namespace {

constexpr double kCompletionTolerance = 1e-9;

} // namespace

Schedule greedy_schedule(const Instance& inst) {
    if (inst.flavor != Flavor::F2) throw InvalidArgument("greedy scheduling needs an F2 instance");
    validate(inst);

    const int m = inst.size();
    const auto demands = inst.demands();
    const auto idx = [](JobId p) { return static_cast<std::size_t>(p - 1); };

    std::vector<std::vector<JobId>> preds(static_cast<std::size_t>(m));
    for (const Edge& e : inst.dag.edges) preds[idx(e.succ)].push_back(e.pred);

    std::vector<double> left(static_cast<std::size_t>(m));
    for (const Job& j : inst.jobs) left[idx(j.id)] = j.ideal_time;
    std::vector<bool> started(static_cast<std::size_t>(m), false);
    std::vector<bool> completed(static_cast<std::size_t>(m), false);

    auto admissible = [&](JobId p) {
        if (started[idx(p)]) return false;
        for (JobId q : preds[idx(p)])
            if (!completed[idx(q)]) return false;
        return true;
    };

    std::vector<Step> steps;
    std::vector<JobId> carried;
    for (;;) {
        std::vector<JobId> members = carried;
        double free_percent = 100.0;
        int free_cores = inst.cores;
        for (JobId p : carried) {
            free_percent -= demands[idx(p)];
            --free_cores;
        }

        // Fill by closest demand while bus capacity remains.
        while (free_percent > 0.0 && free_cores != 0) {
            JobId best = 0;
            double best_gap = std::numeric_limits<double>::infinity();
            for (JobId p = 1; p <= m; ++p) {
                if (!admissible(p) || demands[idx(p)] == 0.0) continue;
                const double gap = std::abs(free_percent - demands[idx(p)]);
                if (gap < best_gap) {
                    best_gap = gap;
                    best = p;
                }
            }
            if (best == 0) break;
            free_percent -= demands[idx(best)];
            --free_cores;
            started[idx(best)] = true;
            members.push_back(best);
        }
        // Leftover cores take the lightest admissible jobs.
        while (free_cores != 0) {
            JobId best = 0;
            for (JobId p = 1; p <= m; ++p)
                if (admissible(p) && (best == 0 || demands[idx(p)] < demands[idx(best)])) best = p;
            if (best == 0) break;
            --free_cores;
            started[idx(best)] = true;
            members.push_back(best);
        }

        if (members.empty()) break;
        Configuration config(members);
        const auto v = speeds_f2(config, demands);

        double duration = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < config.size(); ++i)
            duration = std::min(duration, left[idx(config.jobs()[i])] / v[i]);

        carried.clear();
        for (std::size_t i = 0; i < config.size(); ++i) {
            const JobId p = config.jobs()[i];
            const double rest = left[idx(p)] - duration * v[i];
            if (rest <= kCompletionTolerance) {
                left[idx(p)] = 0.0;
                completed[idx(p)] = true;
            } else {
                left[idx(p)] = rest;
                carried.push_back(p);
            }
        }
        steps.push_back({std::move(config), duration});
    }

    for (JobId p = 1; p <= m; ++p)
        if (!completed[idx(p)]) throw ContractViolation("greedy scheduling left job " + std::to_string(p) + " unfinished");
    return make_schedule(std::move(steps), inst.cores);
}

} // namespace busched
