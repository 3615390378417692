#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "busched/types.hpp"

namespace busched {

struct PrecedenceDag {
    int jobs = 0;             // number of jobs m; endpoints are in 1..jobs
    std::vector<Edge> edges;  // sorted, unique

    PrecedenceDag() = default;
    PrecedenceDag(int m, std::vector<Edge> e);

    std::vector<JobId> predecessors(JobId q) const;
    std::vector<JobId> successors(JobId p) const;

    friend bool operator==(const PrecedenceDag&, const PrecedenceDag&) = default;
};

// Kahn's algorithm; nullopt when the graph has a cycle.
std::optional<std::vector<JobId>> topological_order(const PrecedenceDag& dag);

// Reachability over the partial order: precedes(p, q) iff there is a
// non-empty path p -> ... -> q.
class TransitiveClosure {
public:
    explicit TransitiveClosure(const PrecedenceDag& dag);

    bool precedes(JobId p, JobId q) const { return reach_[index(p, q)] != 0; }
    bool comparable(JobId p, JobId q) const { return precedes(p, q) || precedes(q, p); }
    int jobs() const { return m_; }

private:
    std::size_t index(JobId p, JobId q) const {
        return static_cast<std::size_t>(p - 1) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(q - 1);
    }
    int m_ = 0;
    std::vector<unsigned char> reach_;
};

// Per-(job, configuration) execution speeds. Entries are keyed by the job
// set itself so a table does not depend on any particular enumeration
// order. Speeds are stored aligned with Configuration::jobs().
class SpeedTable {
public:
    void set(const Configuration& config, std::vector<double> speeds);

    // v_pk; 0 when p is not a member. Throws ModelCoverageError when the
    // configuration has no entry.
    double speed(JobId p, const Configuration& config) const;

    const std::vector<double>* find(const Configuration& config) const;
    std::size_t size() const { return entries_.size(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    friend bool operator==(const SpeedTable&, const SpeedTable&) = default;

private:
    std::map<Configuration, std::vector<double>> entries_;
};

struct Instance {
    std::vector<Job> jobs;  // jobs[i].id == i + 1
    int cores = 1;
    PrecedenceDag dag;
    Flavor flavor = Flavor::F2;
    std::optional<SpeedTable> speed_table;  // present iff flavor == F1

    int size() const { return static_cast<int>(jobs.size()); }
    const Job& job(JobId p) const { return jobs.at(static_cast<std::size_t>(p - 1)); }
    std::vector<double> ideal_times() const;
    std::vector<double> demands() const;

    friend bool operator==(const Instance&, const Instance&) = default;
};

// Throws ValidationError naming the violated invariant. Speed-table coverage
// against the full configuration set is checked by the consumers that
// enumerate configurations.
void validate(const Instance& inst);

enum class OrderKind { Trivial, Random, Bitree, OneToManyToOne };

const char* to_string(OrderKind kind);
OrderKind order_kind_from_string(const std::string& text);

PrecedenceDag gen_partial_order(OrderKind kind, int m, std::uint64_t seed);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct GenerateOptions {
    Range time_range{1.0, 10.0};
    Range demand_range{10.0, 90.0};
};

Instance gen_instance(int m, int cores, OrderKind order, std::uint64_t seed, const GenerateOptions& options = {});

inline constexpr int kInstanceFormatVersion = 1;

nlohmann::json to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& doc);

void save_instance(const Instance& inst, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

} // namespace busched
