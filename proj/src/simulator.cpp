#include "busched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "busched/error.hpp"
#include "busched/rng.hpp"

namespace busched {

namespace {

constexpr double kCompletionTolerance = 1e-9;

std::uint64_t config_key(const Configuration& config) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (JobId p : config) h = mix64(h ^ static_cast<std::uint64_t>(p));
    return h;
}

} // namespace

GroundTruthModel GroundTruthModel::from_demands(std::vector<double> demands, NoiseOptions noise) {
    if (noise.amplitude < 0.0 || noise.amplitude >= 1.0) throw InvalidArgument("noise amplitude must lie in [0, 1)");
    GroundTruthModel model;
    model.demands_ = std::move(demands);
    model.noise_ = noise;
    return model;
}

GroundTruthModel GroundTruthModel::from_table(SpeedTable table, NoiseOptions noise) {
    if (noise.amplitude < 0.0 || noise.amplitude >= 1.0) throw InvalidArgument("noise amplitude must lie in [0, 1)");
    GroundTruthModel model;
    model.table_ = std::move(table);
    model.noise_ = noise;
    return model;
}

GroundTruthModel GroundTruthModel::planning_model(const Instance& inst, NoiseOptions noise) {
    if (inst.flavor == Flavor::F2) return from_demands(inst.demands(), noise);
    return from_table(*inst.speed_table, noise);
}

double GroundTruthModel::noise_factor(JobId p, const Configuration& config) const {
    if (noise_.amplitude == 0.0) return 1.0;
    const std::uint64_t h = mix64(noise_.seed ^ mix64(static_cast<std::uint64_t>(p)) ^ config_key(config));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    const double hi = noise_.slowdown_only ? 1.0 : 1.0 + noise_.amplitude;
    return (1.0 - noise_.amplitude) + u * (hi - (1.0 - noise_.amplitude));
}

std::vector<double> GroundTruthModel::speeds(const Configuration& config) const {
    std::vector<double> v;
    if (demands_) {
        v = speeds_f2(config, *demands_);
    } else {
        const auto* row = table_->find(config);
        if (row == nullptr) throw ModelCoverageError("ground truth has no speeds for configuration " + config.str());
        v = *row;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double noisy = v[i] * noise_factor(config.jobs()[i], config);
        v[i] = std::min(1.0, noisy);
    }
    return v;
}

SimulationReport simulate(const Instance& inst, const Schedule& sched, const GroundTruthModel& truth) {
    const int m = inst.size();
    if (static_cast<int>(sched.assignments.size()) != m)
        throw InvalidArgument("schedule covers " + std::to_string(sched.assignments.size()) + " of " + std::to_string(m) + " jobs");
    const double tie = 1e-9 * std::max(1.0, sched.makespan);

    // Per-core queues; job == 0 marks an idle placeholder of fixed length.
    struct Entry {
        JobId job = 0;
        double length = 0.0;
    };
    int cores = inst.cores;
    for (const Assignment& a : sched.assignments) cores = std::max(cores, a.core);
    std::vector<std::vector<Entry>> queue(static_cast<std::size_t>(cores));
    {
        std::vector<const Assignment*> by_start;
        for (const Assignment& a : sched.assignments) by_start.push_back(&a);
        std::stable_sort(by_start.begin(), by_start.end(), [](const Assignment* a, const Assignment* b) { return a->start < b->start; });
        std::vector<double> core_free(static_cast<std::size_t>(cores), 0.0);
        for (const Assignment* a : by_start) {
            const auto c = static_cast<std::size_t>(a->core - 1);
            if (a->start > core_free[c] + tie) queue[c].push_back({0, a->start - core_free[c]});
            queue[c].push_back({a->job, 0.0});
            core_free[c] = a->finish;
        }
    }

    // Barrier: jobs planned to finish no later than each job's planned start.
    std::vector<std::vector<JobId>> wait_for(static_cast<std::size_t>(m));
    for (const Assignment& a : sched.assignments)
        for (const Assignment& b : sched.assignments)
            if (b.job != a.job && b.finish <= a.start + tie) wait_for[static_cast<std::size_t>(a.job - 1)].push_back(b.job);

    const auto ideal = inst.ideal_times();
    std::vector<double> progress(static_cast<std::size_t>(m), 0.0);
    std::vector<bool> done(static_cast<std::size_t>(m), false);
    std::vector<JobTiming> timing(static_cast<std::size_t>(m));
    std::vector<std::size_t> head(static_cast<std::size_t>(cores), 0);
    std::vector<bool> active(static_cast<std::size_t>(cores), false);
    std::vector<double> gap_end(static_cast<std::size_t>(cores), 0.0);

    double now = 0.0;
    int finished = 0;
    std::size_t events = 0;
    while (finished < m) {
        // Start everything eligible; placeholders of zero length may cascade.
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t c = 0; c < queue.size(); ++c) {
                if (active[c] || head[c] >= queue[c].size()) continue;
                const Entry& entry = queue[c][head[c]];
                if (entry.job == 0) {
                    active[c] = true;
                    gap_end[c] = now + entry.length;
                    changed = true;
                    continue;
                }
                const auto pi = static_cast<std::size_t>(entry.job - 1);
                bool ready = true;
                for (JobId q : wait_for[pi]) ready = ready && done[static_cast<std::size_t>(q - 1)];
                if (!ready) continue;
                active[c] = true;
                timing[pi] = {entry.job, static_cast<int>(c) + 1, now, 0.0};
                changed = true;
            }
        }

        std::vector<JobId> running;
        for (std::size_t c = 0; c < queue.size(); ++c)
            if (active[c] && queue[c][head[c]].job != 0) running.push_back(queue[c][head[c]].job);
        const Configuration config(running);
        const std::vector<double> v = running.empty() ? std::vector<double>{} : truth.speeds(config);

        double step = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < config.size(); ++i) {
            const auto pi = static_cast<std::size_t>(config.jobs()[i] - 1);
            step = std::min(step, (ideal[pi] - progress[pi]) / v[i]);
        }
        for (std::size_t c = 0; c < queue.size(); ++c)
            if (active[c] && queue[c][head[c]].job == 0) step = std::min(step, gap_end[c] - now);
        if (!std::isfinite(step)) throw ContractViolation("replay stalled at time " + std::to_string(now));
        step = std::max(step, 0.0);

        now += step;
        ++events;
        for (std::size_t i = 0; i < config.size(); ++i) {
            const auto pi = static_cast<std::size_t>(config.jobs()[i] - 1);
            progress[pi] += step * v[i];
        }
        for (std::size_t c = 0; c < queue.size(); ++c) {
            if (!active[c]) continue;
            const Entry& entry = queue[c][head[c]];
            bool complete = false;
            if (entry.job == 0) {
                complete = gap_end[c] <= now + kCompletionTolerance * std::max(1.0, now);
            } else {
                const auto pi = static_cast<std::size_t>(entry.job - 1);
                complete = ideal[pi] - progress[pi] <= kCompletionTolerance * std::max(1.0, ideal[pi]);
                if (complete) {
                    progress[pi] = ideal[pi];
                    done[pi] = true;
                    timing[pi].finish = now;
                    ++finished;
                }
            }
            if (complete) {
                active[c] = false;
                ++head[c];
            }
        }
    }

    SimulationReport report;
    report.planned_makespan = sched.makespan;
    report.jobs = std::move(timing);
    for (const JobTiming& t : report.jobs) report.measured_makespan = std::max(report.measured_makespan, t.finish);
    report.deviation_pct = 100.0 * (report.planned_makespan - report.measured_makespan) / report.measured_makespan;
    report.events = events;
    return report;
}

std::vector<double> corun_times(std::span<const JobId> multiset, std::span<const double> ideal_times,
                                std::span<const double> demands) {
    std::vector<double> b;
    for (JobId p : multiset) {
        if (p < 1 || static_cast<std::size_t>(p) > demands.size()) throw InvalidArgument("job " + std::to_string(p) + " out of range");
        b.push_back(demands[static_cast<std::size_t>(p - 1)]);
    }
    const auto z = water_fill(b);
    std::vector<double> times;
    for (std::size_t i = 0; i < multiset.size(); ++i) {
        const double v = b[i] == 0.0 ? 1.0 : z[i] / b[i];
        times.push_back(ideal_times[static_cast<std::size_t>(multiset[i] - 1)] / v);
    }
    return times;
}

CorunOracle make_corun_oracle(std::vector<double> ideal_times, std::vector<double> demands) {
    return [ideal = std::move(ideal_times), b = std::move(demands)](std::span<const JobId> multiset) {
        return corun_times(multiset, ideal, b);
    };
}

} // namespace busched
