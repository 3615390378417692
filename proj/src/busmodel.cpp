#include "busched/busmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "busched/error.hpp"

namespace busched {

double Allocation::share(JobId p) const {
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i] == p) return shares[i];
    throw InvalidArgument("job " + std::to_string(p) + " is not part of the allocation");
}

double Allocation::total() const { return std::accumulate(shares.begin(), shares.end(), 0.0); }

std::vector<double> water_fill(std::span<const double> demands) {
    const std::size_t n = demands.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return demands[a] < demands[b]; });

    std::vector<double> z(n, 0.0);
    double free_percent = 100.0;
    std::size_t jobs_count = n;
    std::size_t next = 0;
    while (jobs_count != 0) {
        const double percent = free_percent / static_cast<double>(jobs_count);
        // Remaining jobs are scanned smallest-demand first, so only the head
        // can be strictly below the share.
        const std::size_t p = order[next];
        if (demands[p] < percent) {
            z[p] = demands[p];
            free_percent -= demands[p];
            --jobs_count;
            ++next;
        } else {
            for (std::size_t i = next; i < n; ++i) z[order[i]] = percent;
            jobs_count = 0;
        }
    }
    return z;
}

namespace {

std::vector<double> member_demands(const Configuration& config, std::span<const double> demands) {
    std::vector<double> out;
    out.reserve(config.size());
    for (JobId p : config) {
        if (p < 1 || static_cast<std::size_t>(p) > demands.size())
            throw InvalidArgument("no bus demand given for job " + std::to_string(p));
        out.push_back(demands[static_cast<std::size_t>(p - 1)]);
    }
    return out;
}

} // namespace

Allocation allocate_bus(const Configuration& config, std::span<const double> demands) {
    if (config.empty()) throw InvalidArgument("cannot allocate the bus for the zero configuration");
    auto b = member_demands(config, demands);
    return Allocation{config.jobs(), water_fill(b)};
}

std::vector<double> speeds_f2(const Configuration& config, std::span<const double> demands) {
    Allocation alloc = allocate_bus(config, demands);
    std::vector<double> v(config.size());
    for (std::size_t i = 0; i < config.size(); ++i) {
        const double b = demands[static_cast<std::size_t>(config.jobs()[i] - 1)];
        v[i] = b > 0.0 ? alloc.shares[i] / b : 1.0;
    }
    return v;
}

SpeedTable materialize_speed_table(const Instance& inst, const ConfigSpace& space) {
    if (inst.flavor != Flavor::F2) throw InvalidArgument("speed table materialization needs an F2 instance");
    const auto demands = inst.demands();
    const auto count = static_cast<long>(space.size());
    std::vector<std::vector<double>> rows(space.size());
#pragma omp parallel for schedule(static)
    for (long k = 1; k < count; ++k) rows[static_cast<std::size_t>(k)] = speeds_f2(space[static_cast<std::size_t>(k)], demands);

    SpeedTable table;
    for (std::size_t k = 1; k < space.size(); ++k) table.set(space[k], std::move(rows[k]));
    return table;
}

SpeedTable materialize_speed_table_serial(const Instance& inst, const ConfigSpace& space) {
    if (inst.flavor != Flavor::F2) throw InvalidArgument("speed table materialization needs an F2 instance");
    const auto demands = inst.demands();
    SpeedTable table;
    for (std::size_t k = 1; k < space.size(); ++k) table.set(space[k], speeds_f2(space[k], demands));
    return table;
}

SpeedTable resolve_speed_table(const Instance& inst, const ConfigSpace& space) {
    if (inst.flavor == Flavor::F2) return materialize_speed_table(inst, space);
    if (!inst.speed_table) throw ValidationError("F1 instance requires a speed_table");
    for (std::size_t k = 1; k < space.size(); ++k)
        if (!inst.speed_table->find(space[k]))
            throw ModelCoverageError("speed table has no entry for configuration " + space[k].str());
    return *inst.speed_table;
}

namespace {

std::string describe(std::span<const JobId> multiset) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < multiset.size(); ++i) out << (i ? "," : "") << multiset[i];
    out << ']';
    return out.str();
}

std::vector<double> measure(const CorunOracle& oracle, const std::vector<JobId>& multiset) {
    std::vector<double> times;
    try {
        times = oracle(multiset);
    } catch (const std::exception& e) {
        throw OracleError("co-run measurement failed for jobs " + describe(multiset) + ": " + e.what());
    }
    if (times.size() != multiset.size())
        throw OracleError("co-run measurement for jobs " + describe(multiset) + " returned the wrong number of times");
    for (double t : times)
        if (!(t > 0.0) || !std::isfinite(t))
            throw OracleError("co-run measurement for jobs " + describe(multiset) + " returned a non-positive time");
    return times;
}

constexpr double kZeroDemandTolerance = 1e-9;
constexpr double kSlowdownTolerance = 1e-12;

} // namespace

std::vector<double> estimate_bandwidth(const CorunOracle& oracle, int jobs, int cores) {
    if (cores < 2) throw InvalidArgument("bandwidth estimation needs at least 2 cores");
    if (jobs < 1) throw InvalidArgument("bandwidth estimation needs at least one job");
    const auto m = static_cast<std::size_t>(jobs);
    const auto c = static_cast<std::size_t>(cores);

    std::vector<double> solo(m);
    for (JobId p = 1; p <= jobs; ++p) solo[static_cast<std::size_t>(p - 1)] = measure(oracle, {p})[0];

    std::vector<double> estimate(m, 0.0);
    std::vector<bool> resolved(m, false);
    for (JobId p = 1; p <= jobs; ++p) {
        const auto i = static_cast<std::size_t>(p - 1);
        auto times = measure(oracle, std::vector<JobId>(c, p));
        const double corun = *std::max_element(times.begin(), times.end());
        const double speed = solo[i] / corun;
        if (speed < 1.0 - kSlowdownTolerance) {
            estimate[i] = 100.0 / (speed * static_cast<double>(c));
            resolved[i] = true;
        }
    }

    // No job saturates the bus even with c copies of itself: then no set of
    // c jobs can, and every job is interference-free.
    std::optional<std::size_t> heaviest;
    for (std::size_t i = 0; i < m; ++i)
        if (resolved[i] && (!heaviest || estimate[i] > estimate[*heaviest])) heaviest = i;
    if (!heaviest) return estimate;

    const std::size_t g = *heaviest;
    const JobId g_id = static_cast<JobId>(g + 1);
    for (std::size_t i = 0; i < m; ++i) {
        if (resolved[i]) continue;
        std::vector<JobId> multiset(c, g_id);
        multiset[0] = static_cast<JobId>(i + 1);
        auto times = measure(oracle, multiset);
        bool slowed = times[0] > solo[i] * (1.0 + kSlowdownTolerance);
        for (std::size_t j = 1; j < c; ++j) slowed = slowed || times[j] > solo[g] * (1.0 + kSlowdownTolerance);
        if (!slowed) continue;
        const double g_speed = solo[g] / times[1];
        const double x = estimate[g] * g_speed;
        // Rounding leaves about 1e-14 where the demand is zero.
        const double b = 100.0 - static_cast<double>(c - 1) * x;
        estimate[i] = b <= kZeroDemandTolerance ? 0.0 : b;
    }
    return estimate;
}

} // namespace busched
