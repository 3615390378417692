#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "busched/instance.hpp"
#include "busched/types.hpp"

namespace busched {

inline constexpr std::size_t kDefaultConfigCap = std::size_t{1} << 20;

// The set K of feasible configurations. Index 0 is always the zero
// configuration; the rest follow in (cardinality, lexicographic) order.
class ConfigSpace {
public:
    ConfigSpace(int jobs, int cores, std::vector<Configuration> configs, TransitiveClosure closure);

    std::size_t size() const { return configs_.size(); }
    const Configuration& operator[](std::size_t k) const { return configs_[k]; }
    const std::vector<Configuration>& configs() const { return configs_; }
    int jobs() const { return jobs_; }
    int cores() const { return cores_; }
    const TransitiveClosure& closure() const { return closure_; }

    // q_pk
    bool member(JobId p, std::size_t k) const { return configs_[k].contains(p); }

    // a_ij: configuration i must run after configuration j. Always false
    // when either side is the zero configuration.
    bool after(std::size_t i, std::size_t j) const;

    std::optional<std::size_t> index_of(const Configuration& config) const;

private:
    struct Hash {
        std::size_t operator()(const Configuration& c) const noexcept;
    };

    int jobs_;
    int cores_;
    std::vector<Configuration> configs_;
    TransitiveClosure closure_;
    std::unordered_map<Configuration, std::size_t, Hash> index_;
};

// All antichains of the precedence order with at most `cores` jobs,
// including the empty one. Throws CapacityError when the count exceeds cap.
ConfigSpace enumerate_configurations(const Instance& inst, std::size_t cap = kDefaultConfigCap);

using PrecedenceMatrix = std::vector<std::vector<unsigned char>>;

// Dense a_ij over the whole space, recomputed from the DAG's closure.
PrecedenceMatrix config_precedence(const ConfigSpace& space, const PrecedenceDag& dag);

} // namespace busched
