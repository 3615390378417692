#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace busched {

// Jobs are numbered 1..m everywhere in the public API and in files.
using JobId = int;

struct Job {
    JobId id = 0;
    double ideal_time = 0.0;  // processing time when running alone
    double bus_demand = 0.0;  // percent of the data bus used when running alone

    friend bool operator==(const Job&, const Job&) = default;
};

struct Edge {
    JobId pred = 0;
    JobId succ = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class Flavor { F1, F2 };

const char* to_string(Flavor flavor);
Flavor flavor_from_string(const std::string& text);

// A set of jobs running simultaneously. Job ids are kept sorted and unique;
// the empty configuration is the zero configuration.
class Configuration {
public:
    Configuration() = default;
    Configuration(std::initializer_list<JobId> ids) : Configuration(std::vector<JobId>(ids)) {}
    explicit Configuration(std::vector<JobId> ids) : jobs_(std::move(ids)) {
        std::sort(jobs_.begin(), jobs_.end());
        jobs_.erase(std::unique(jobs_.begin(), jobs_.end()), jobs_.end());
    }

    const std::vector<JobId>& jobs() const noexcept { return jobs_; }
    std::size_t size() const noexcept { return jobs_.size(); }
    bool empty() const noexcept { return jobs_.empty(); }
    bool contains(JobId p) const { return std::binary_search(jobs_.begin(), jobs_.end(), p); }

    // Position of p inside jobs(), or -1.
    int position(JobId p) const {
        auto it = std::lower_bound(jobs_.begin(), jobs_.end(), p);
        return (it != jobs_.end() && *it == p) ? static_cast<int>(it - jobs_.begin()) : -1;
    }

    auto begin() const noexcept { return jobs_.begin(); }
    auto end() const noexcept { return jobs_.end(); }

    std::string str() const;

    friend auto operator<=>(const Configuration&, const Configuration&) = default;

private:
    std::vector<JobId> jobs_;
};

} // namespace busched
