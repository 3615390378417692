#pragma once

#include "busched/instance.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace testing_support {

using busched::Edge;
using busched::Instance;
using busched::JobId;

// F2 instance from (ideal_time, bus_demand) pairs.
inline Instance make_f2(std::vector<std::pair<double, double>> jobs, int cores, std::vector<Edge> edges = {}) {
    Instance inst;
    int id = 1;
    for (auto [s, b] : jobs) inst.jobs.push_back({id++, s, b});
    inst.cores = cores;
    inst.dag = busched::PrecedenceDag(static_cast<int>(inst.jobs.size()), std::move(edges));
    inst.flavor = busched::Flavor::F2;
    return inst;
}

// Floyd-Warshall reachability, indexed [p-1][q-1].
inline std::vector<std::vector<bool>> reach_oracle(const busched::PrecedenceDag& dag) {
    const auto m = static_cast<std::size_t>(dag.jobs);
    std::vector<std::vector<bool>> r(m, std::vector<bool>(m, false));
    for (const auto& e : dag.edges) r[static_cast<std::size_t>(e.pred - 1)][static_cast<std::size_t>(e.succ - 1)] = true;
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (r[i][k] && r[k][j]) r[i][j] = true;
    return r;
}

// Max-min fair split by solving for the water level: z_p = min(b_p, L)
// where sum z = min(100, sum b). The level is found from sorted demands.
inline std::vector<double> water_fill_oracle(const std::vector<double>& b) {
    const double total = std::accumulate(b.begin(), b.end(), 0.0);
    if (total <= 100.0) return b;
    std::vector<double> sorted = b;
    std::sort(sorted.begin(), sorted.end());
    double used = 0.0;
    double level = 0.0;
    const std::size_t n = sorted.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double candidate = (100.0 - used) / static_cast<double>(n - i);
        if (sorted[i] >= candidate) {
            level = candidate;
            break;
        }
        used += sorted[i];
    }
    std::vector<double> z(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) z[i] = std::min(b[i], level);
    return z;
}

// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("busched_test_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

} // namespace testing_support
