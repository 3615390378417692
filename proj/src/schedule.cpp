#include "busched/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "busched/error.hpp"

namespace busched {

using nlohmann::json;

const Assignment* Schedule::assignment(JobId p) const {
    auto it = std::lower_bound(assignments.begin(), assignments.end(), p,
                               [](const Assignment& a, JobId id) { return a.job < id; });
    return (it != assignments.end() && it->job == p) ? &*it : nullptr;
}

std::vector<Assignment> assign_cores(std::span<const Step> steps, int cores) {
    std::set<int> free_cores;
    for (int k = 1; k <= cores; ++k) free_cores.insert(k);
    std::map<JobId, Assignment> running;
    std::vector<Assignment> done;
    std::set<JobId> finished;

    double elapsed = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const Configuration& config = steps[i].config;
        if (static_cast<int>(config.size()) > cores)
            throw ContractViolation("step " + std::to_string(i) + " runs " + std::to_string(config.size()) +
                                    " jobs on " + std::to_string(cores) + " cores");
        // Departing jobs release their cores before arriving jobs are placed.
        for (auto it = running.begin(); it != running.end();) {
            if (!config.contains(it->first)) {
                it->second.finish = elapsed;
                free_cores.insert(it->second.core);
                finished.insert(it->first);
                done.push_back(it->second);
                it = running.erase(it);
            } else {
                ++it;
            }
        }
        for (JobId p : config) {
            if (running.count(p)) continue;
            if (finished.count(p))
                throw ContractViolation("job " + std::to_string(p) + " runs in non-contiguous steps");
            int core = *free_cores.begin();
            free_cores.erase(free_cores.begin());
            running.emplace(p, Assignment{p, core, elapsed, elapsed});
        }
        elapsed += steps[i].duration;
    }
    for (auto& [p, a] : running) {
        a.finish = elapsed;
        done.push_back(a);
    }
    std::sort(done.begin(), done.end(), [](const Assignment& a, const Assignment& b) { return a.job < b.job; });
    return done;
}

Schedule make_schedule(std::vector<Step> steps, int cores) {
    Schedule sched;
    sched.assignments = assign_cores(steps, cores);
    sched.makespan = 0.0;
    for (const Step& s : steps) sched.makespan += s.duration;
    sched.steps = std::move(steps);
    return sched;
}

std::vector<std::string> schedule_violations(const Schedule& sched, const Instance& inst, double tol) {
    std::vector<std::string> out;
    const int m = inst.size();
    const double scale = std::max(1.0, sched.makespan);
    const double eps = tol * scale;

    double total = 0.0;
    std::map<JobId, std::pair<std::size_t, std::size_t>> runs;  // first, last step
    std::vector<double> boundary{0.0};
    for (std::size_t i = 0; i < sched.steps.size(); ++i) {
        const Step& s = sched.steps[i];
        if (!(s.duration > 0.0)) out.push_back("step " + std::to_string(i) + " has non-positive duration");
        if (static_cast<int>(s.config.size()) > inst.cores) out.push_back("step " + std::to_string(i) + " exceeds core count");
        if (s.config.empty()) out.push_back("step " + std::to_string(i) + " is the zero configuration");
        for (JobId p : s.config) {
            auto [it, fresh] = runs.try_emplace(p, i, i);
            if (!fresh) {
                if (it->second.second + 1 != i) out.push_back("job " + std::to_string(p) + " is preempted");
                it->second.second = i;
            }
        }
        total += s.duration;
        boundary.push_back(total);
    }

    if (static_cast<int>(sched.assignments.size()) != m)
        out.push_back("expected " + std::to_string(m) + " assignments, found " + std::to_string(sched.assignments.size()));
    double latest = 0.0;
    std::map<int, std::vector<const Assignment*>> per_core;
    for (const Assignment& a : sched.assignments) {
        const std::string who = "job " + std::to_string(a.job);
        if (a.job < 1 || a.job > m) {
            out.push_back(who + " is unknown");
            continue;
        }
        if (a.core < 1 || a.core > inst.cores) out.push_back(who + " assigned to invalid core");
        if (a.start < -eps) out.push_back(who + " starts before 0");
        if (!(a.finish > a.start)) out.push_back(who + " has an empty interval");
        latest = std::max(latest, a.finish);
        per_core[a.core].push_back(&a);
        auto run = runs.find(a.job);
        if (run == runs.end()) {
            out.push_back(who + " appears in no step");
        } else {
            if (std::abs(boundary[run->second.first] - a.start) > eps) out.push_back(who + " start disagrees with steps");
            if (std::abs(boundary[run->second.second + 1] - a.finish) > eps) out.push_back(who + " finish disagrees with steps");
        }
    }
    for (auto& [core, list] : per_core) {
        std::sort(list.begin(), list.end(), [](const Assignment* a, const Assignment* b) { return a->start < b->start; });
        for (std::size_t i = 1; i < list.size(); ++i)
            if (list[i]->start < list[i - 1]->finish - eps)
                out.push_back("core " + std::to_string(core) + ": jobs " + std::to_string(list[i - 1]->job) + " and " +
                              std::to_string(list[i]->job) + " overlap");
    }
    for (const Edge& e : inst.dag.edges) {
        const Assignment* p = sched.assignment(e.pred);
        const Assignment* q = sched.assignment(e.succ);
        if (p && q && p->finish > q->start + eps)
            out.push_back("precedence " + std::to_string(e.pred) + "->" + std::to_string(e.succ) + " violated");
    }
    if (std::abs(latest - sched.makespan) > eps) out.push_back("makespan differs from the latest finish");
    if (std::abs(total - sched.makespan) > eps) out.push_back("makespan differs from the sum of step durations");
    return out;
}

double max_completion_error(const Schedule& sched, const Instance& inst, const SpeedTable& speeds) {
    std::vector<double> work(static_cast<std::size_t>(inst.size()), 0.0);
    for (const Step& s : sched.steps)
        for (JobId p : s.config) work[static_cast<std::size_t>(p - 1)] += s.duration * speeds.speed(p, s.config);
    double worst = 0.0;
    for (const Job& j : inst.jobs)
        worst = std::max(worst, std::abs(work[static_cast<std::size_t>(j.id - 1)] - j.ideal_time) / j.ideal_time);
    return worst;
}

json to_json(const Schedule& sched) {
    json doc;
    doc["makespan"] = sched.makespan;
    json steps = json::array();
    for (const Step& s : sched.steps) steps.push_back({{"jobs", s.config.jobs()}, {"duration", s.duration}});
    doc["steps"] = std::move(steps);
    json assignments = json::array();
    for (const Assignment& a : sched.assignments)
        assignments.push_back({{"job", a.job}, {"core", a.core}, {"start", a.start}, {"finish", a.finish}});
    doc["assignments"] = std::move(assignments);
    return doc;
}

Schedule schedule_from_json(const json& doc) {
    try {
        Schedule sched;
        sched.makespan = doc.at("makespan").get<double>();
        for (const json& s : doc.at("steps"))
            sched.steps.push_back({Configuration(s.at("jobs").get<std::vector<JobId>>()), s.at("duration").get<double>()});
        for (const json& a : doc.at("assignments"))
            sched.assignments.push_back(
                {a.at("job").get<JobId>(), a.at("core").get<int>(), a.at("start").get<double>(), a.at("finish").get<double>()});
        std::sort(sched.assignments.begin(), sched.assignments.end(),
                  [](const Assignment& a, const Assignment& b) { return a.job < b.job; });
        return sched;
    } catch (const json::exception& e) {
        throw ParseError(std::string("schedule: ") + e.what());
    }
}

void save_schedule(const Schedule& sched, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << to_json(sched).dump(2) << '\n';
}

Schedule load_schedule(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return schedule_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace busched
