#include "busched/configspace.hpp"

#include <functional>
#include <string>

#include "busched/error.hpp"

namespace busched {

std::size_t ConfigSpace::Hash::operator()(const Configuration& c) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (JobId p : c) h = (h ^ static_cast<std::size_t>(p)) * 1099511628211ULL;
    return h;
}

ConfigSpace::ConfigSpace(int jobs, int cores, std::vector<Configuration> configs, TransitiveClosure closure)
    : jobs_(jobs), cores_(cores), configs_(std::move(configs)), closure_(std::move(closure)) {
    index_.reserve(configs_.size());
    for (std::size_t k = 0; k < configs_.size(); ++k) index_.emplace(configs_[k], k);
}

bool ConfigSpace::after(std::size_t i, std::size_t j) const {
    for (JobId later : configs_[i])
        for (JobId earlier : configs_[j])
            if (closure_.precedes(earlier, later)) return true;
    return false;
}

std::optional<std::size_t> ConfigSpace::index_of(const Configuration& config) const {
    auto it = index_.find(config);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

ConfigSpace enumerate_configurations(const Instance& inst, std::size_t cap) {
    const int m = inst.size();
    TransitiveClosure closure(inst.dag);
    std::vector<Configuration> configs;
    configs.emplace_back();

    // Fixed cardinality r: depth-first over increasing ids yields
    // lexicographic order directly.
    std::vector<JobId> chosen;
    std::function<void(JobId, int)> extend = [&](JobId from, int remaining) {
        if (remaining == 0) {
            if (configs.size() >= cap)
                throw CapacityError("configuration count exceeds cap " + std::to_string(cap) +
                                    "; use the F2 greedy solver or a smaller instance");
            configs.emplace_back(chosen);
            return;
        }
        for (JobId p = from; p <= m - remaining + 1; ++p) {
            bool ok = true;
            for (JobId q : chosen)
                if (closure.comparable(p, q)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            chosen.push_back(p);
            extend(p + 1, remaining - 1);
            chosen.pop_back();
        }
    };
    for (int r = 1; r <= std::min(inst.cores, m); ++r) extend(1, r);
    return ConfigSpace(m, inst.cores, std::move(configs), std::move(closure));
}

PrecedenceMatrix config_precedence(const ConfigSpace& space, const PrecedenceDag& dag) {
    TransitiveClosure closure(dag);
    const std::size_t k = space.size();
    PrecedenceMatrix a(k, std::vector<unsigned char>(k, 0));
    for (std::size_t i = 1; i < k; ++i)
        for (std::size_t j = 1; j < k; ++j) {
            bool later = false;
            for (JobId q : space[i])
                for (JobId p : space[j])
                    if (closure.precedes(p, q)) later = true;
            a[i][j] = later ? 1 : 0;
        }
    return a;
}

} // namespace busched
