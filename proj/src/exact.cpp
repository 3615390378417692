#include "busched/exact.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "busched/busmodel.hpp"
#include "busched/error.hpp"
#include "busched/greedy.hpp"
#include "busched/lp.hpp"

namespace busched {

namespace {

using Mask = std::uint32_t;

constexpr double kResidualTolerance = 1e-8;

std::string describe(const ConfigSequence& seq) {
    std::string out = "[";
    for (std::size_t i = 0; i < seq.size(); ++i) out += (i ? ", " : "") + std::to_string(seq[i]);
    return out + "]";
}

// Sequence LP with the sequence attached to numerical failures, plus a
// residual check on the returned durations.
std::optional<SequenceDurations> solve_sequence_lp(const LinearProgram& lp, const ConfigSequence& seq) {
    LpResult r;
    try {
        r = solve_lp(lp);
    } catch (const DegeneracyError& e) {
        throw DegeneracyError(std::string(e.what()) + " (configuration sequence " + describe(seq) + ")");
    }
    if (r.status != LpStatus::Optimal) return std::nullopt;
    for (std::size_t row = 0; row < lp.rows.size(); ++row) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < seq.size(); ++i) lhs += lp.rows[row][i] * r.x[i];
        if (std::abs(lhs - lp.rhs[row]) > kResidualTolerance * lp.rhs[row])
            throw DegeneracyError("sequence LP residual " + std::to_string(lhs - lp.rhs[row]) + " for job " +
                                  std::to_string(row + 1) + " (configuration sequence " + describe(seq) + ")");
    }
    return SequenceDurations{std::move(r.x), r.objective};
}

constexpr int kHardJobLimit = 24;

// Dense view of a configuration space for the search: bitmask per
// configuration, speed rows indexed by job, and direct-predecessor masks.
struct SearchModel {
    int m = 0;
    int cores = 0;
    Mask all = 0;
    std::vector<Mask> mask;
    std::vector<std::vector<double>> speed;  // [k][p - 1], 0 for non-members
    std::vector<Mask> preds;
    std::vector<Mask> succs;
    std::vector<double> ideal;
    std::vector<int> reverse_topo;  // job indices (0-based), sinks first
    std::vector<std::size_t> order;  // candidate order for branching
    std::unordered_map<Mask, std::size_t> index;
};

SearchModel make_model(const Instance& inst, const ConfigSpace& space, const SpeedTable& table) {
    SearchModel md;
    md.m = inst.size();
    md.cores = inst.cores;
    md.all = md.m == 32 ? ~Mask{0} : ((Mask{1} << md.m) - 1);
    md.ideal = inst.ideal_times();
    md.preds.assign(static_cast<std::size_t>(md.m), 0);
    md.succs.assign(static_cast<std::size_t>(md.m), 0);
    for (const Edge& e : inst.dag.edges) {
        md.preds[static_cast<std::size_t>(e.succ - 1)] |= Mask{1} << (e.pred - 1);
        md.succs[static_cast<std::size_t>(e.pred - 1)] |= Mask{1} << (e.succ - 1);
    }
    auto topo = topological_order(inst.dag);
    for (auto it = topo->rbegin(); it != topo->rend(); ++it) md.reverse_topo.push_back(*it - 1);

    md.mask.resize(space.size());
    md.speed.assign(space.size(), std::vector<double>(static_cast<std::size_t>(md.m), 0.0));
    for (std::size_t k = 0; k < space.size(); ++k) {
        Mask bits = 0;
        for (JobId p : space[k]) {
            bits |= Mask{1} << (p - 1);
            md.speed[k][static_cast<std::size_t>(p - 1)] = table.speed(p, space[k]);
        }
        md.mask[k] = bits;
        md.index.emplace(bits, k);
    }
    // Wider configurations first: they tend to reach good incumbents sooner.
    for (std::size_t k = space.size(); k-- > 1;) md.order.push_back(k);
    return md;
}

template <class F>
void for_each_bit(Mask bits, F&& f) {
    while (bits) {
        const int p = std::countr_zero(bits);
        f(p);
        bits &= bits - 1;
    }
}

// Whether configuration k may directly follow a prefix whose last
// configuration runs `running`, with `started` and `finished` job sets.
bool can_follow(const SearchModel& md, Mask running, Mask started, Mask finished, std::size_t k) {
    const Mask next = md.mask[k];
    if (next == running) return false;
    const Mask starting = next & ~running;
    if (starting & started) return false;
    const Mask done = finished | (running & ~next);
    bool ok = true;
    for_each_bit(starting, [&](int p) { ok = ok && (md.preds[static_cast<std::size_t>(p)] & ~done) == 0; });
    return ok;
}

struct Prefix {
    ConfigSequence seq;
    Mask started = 0;
    Mask finished = 0;
    Mask running = 0;
    // Algorithm-2 core of every started job and the ideal time placed on
    // each core so far.
    std::array<signed char, kHardJobLimit> core_of{};
    std::array<double, kHardJobLimit> load{};
};

void advance(const SearchModel& md, Prefix& node, std::size_t k) {
    const Mask next = md.mask[k];
    std::uint32_t busy = 0;
    for_each_bit(node.running & next, [&](int p) { busy |= 1U << node.core_of[static_cast<std::size_t>(p)]; });
    for_each_bit(next & ~node.running, [&](int p) {
        const int core = std::countr_one(busy);
        busy |= 1U << core;
        node.core_of[static_cast<std::size_t>(p)] = static_cast<signed char>(core);
        node.load[static_cast<std::size_t>(core)] += md.ideal[static_cast<std::size_t>(p)];
    });
    node.finished |= node.running & ~next;
    node.started |= next;
    node.running = next;
    node.seq.push_back(k);
}

// Every job occupies its core for at least s_p (speeds never exceed 1), so
// a completion ends below `limit` only if the unstarted jobs can be packed
// onto the cores without any core load reaching it. `jobs` is sorted in
// decreasing size.
bool fits_below(std::array<double, kHardJobLimit>& load, int cores, const std::vector<double>& jobs, std::size_t i,
                double rest, double limit) {
    if (i == jobs.size()) return true;
    double room = 0.0;
    for (int j = 0; j < cores; ++j) room += limit - load[static_cast<std::size_t>(j)];
    if (rest >= room) return false;
    for (int j = 0; j < cores; ++j) {
        auto& l = load[static_cast<std::size_t>(j)];
        if (l + jobs[i] >= limit) continue;
        bool repeat = false;
        for (int q = 0; q < j && !repeat; ++q) repeat = load[static_cast<std::size_t>(q)] == l;
        if (repeat) continue;
        l += jobs[i];
        const bool ok = fits_below(load, cores, jobs, i + 1, rest - jobs[i], limit);
        l -= jobs[i];
        if (ok) return true;
    }
    return false;
}

bool packing_feasible(const SearchModel& md, const Prefix& node, double limit) {
    for (int j = 0; j < md.cores; ++j)
        if (node.load[static_cast<std::size_t>(j)] >= limit) return false;
    std::vector<double> jobs;
    double rest = 0.0;
    for_each_bit(md.all & ~node.started, [&](int p) {
        jobs.push_back(md.ideal[static_cast<std::size_t>(p)]);
        rest += jobs.back();
    });
    std::sort(jobs.begin(), jobs.end(), std::greater<>());
    auto load = node.load;
    return fits_below(load, md.cores, jobs, 0, rest, limit);
}

// All jobs equal to s_p; the sequence LP itself.
std::optional<SequenceDurations> solve_complete(const SearchModel& md, const ConfigSequence& seq) {
    const std::size_t L = seq.size();
    LinearProgram lp(L);
    std::fill(lp.objective.begin(), lp.objective.end(), 1.0);
    for (int p = 0; p < md.m; ++p) {
        std::vector<double> row(L);
        bool present = false;
        for (std::size_t i = 0; i < L; ++i) {
            row[i] = md.speed[seq[i]][static_cast<std::size_t>(p)];
            present = present || row[i] > 0.0;
        }
        if (!present) return std::nullopt;
        lp.add_row(std::move(row), RowSense::Equal, md.ideal[static_cast<std::size_t>(p)]);
    }
    return solve_sequence_lp(lp, seq);
}

// Lower bound on every completion of a prefix. Variables: the prefix step
// durations, then one duration per configuration that could still run
// (members all unfinished). Every unfinished job must be covered by the
// prefix plus that order-free mix; the mix also has to outlast each running
// job's remainder plus its successor chain, and the longest chain among
// unstarted jobs.
std::optional<double> prefix_bound(const SearchModel& md, const Prefix& node) {
    const std::size_t L = node.seq.size();
    const Mask open = md.all & ~node.finished;
    std::vector<std::size_t> mix;
    for (std::size_t k = 1; k < md.mask.size(); ++k)
        if ((md.mask[k] & ~open) == 0) mix.push_back(k);
    const std::size_t n = L + mix.size();
    LinearProgram lp(n);
    std::fill(lp.objective.begin(), lp.objective.end(), 1.0);

    const Mask unstarted = md.all & ~node.started;
    std::vector<double> chain(static_cast<std::size_t>(md.m), 0.0);
    double longest = 0.0;
    for (int p : md.reverse_topo) {
        if (!(unstarted >> p & 1U)) continue;
        double tail = 0.0;
        for_each_bit(md.succs[static_cast<std::size_t>(p)] & unstarted,
                     [&](int q) { tail = std::max(tail, chain[static_cast<std::size_t>(q)]); });
        chain[static_cast<std::size_t>(p)] = md.ideal[static_cast<std::size_t>(p)] + tail;
        longest = std::max(longest, chain[static_cast<std::size_t>(p)]);
    }

    for (int p = 0; p < md.m; ++p) {
        const auto pi = static_cast<std::size_t>(p);
        const double s = md.ideal[pi];
        std::vector<double> row(n, 0.0);
        for (std::size_t i = 0; i < L; ++i) row[i] = md.speed[node.seq[i]][pi];
        if (node.finished >> p & 1U) {
            lp.add_row(std::move(row), RowSense::Equal, s);
            continue;
        }
        const bool running = node.running >> p & 1U;
        if (running) lp.add_row(row, RowSense::LessEqual, s);
        auto chain_row = row;
        for (std::size_t j = 0; j < mix.size(); ++j) {
            row[L + j] = md.speed[mix[j]][pi];
            chain_row[L + j] = 1.0;
        }
        lp.add_row(std::move(row), RowSense::GreaterEqual, s);
        if (running) {
            double tail = 0.0;
            for_each_bit(md.succs[pi] & unstarted, [&](int q) { tail = std::max(tail, chain[static_cast<std::size_t>(q)]); });
            if (tail > 0.0) lp.add_row(std::move(chain_row), RowSense::GreaterEqual, s + tail);
        }
    }
    if (longest > 0.0) {
        std::vector<double> row(n, 0.0);
        for (std::size_t j = 0; j < mix.size(); ++j) row[L + j] = 1.0;
        lp.add_row(std::move(row), RowSense::GreaterEqual, longest);
    }
    LpResult r = solve_lp(lp, PivotRule::Dantzig);
    if (r.status != LpStatus::Optimal) return std::nullopt;
    return r.objective;
}

double tolerance_for(double value) { return 1e-9 * std::max(1.0, value); }

void atomic_min(std::atomic<double>& target, double value) {
    double current = target.load(std::memory_order_relaxed);
    while (value < current && !target.compare_exchange_weak(current, value, std::memory_order_relaxed)) {
    }
}

struct Incumbent {
    double value = std::numeric_limits<double>::infinity();
    ConfigSequence seq;
    std::vector<double> durations;
};

// Serial depth-first branch and bound. `local` prunes ties so the first
// optimum in branching order is kept; `global` is shared across threads and
// only prunes strictly worse prefixes.
class Searcher {
public:
    Searcher(const SearchModel& md, std::size_t length_limit, bool allow_idle, Incumbent start, std::atomic<double>& global)
        : md_(md), limit_(length_limit), allow_idle_(allow_idle), best_(std::move(start)), global_(global) {}

    void descend(Prefix& node, std::size_t k) {
        const Mask saved_started = node.started, saved_finished = node.finished, saved_running = node.running;
        const auto saved_core = node.core_of;
        const auto saved_load = node.load;
        advance(md_, node, k);
        visit(node);
        node.seq.pop_back();
        node.started = saved_started;
        node.finished = saved_finished;
        node.running = saved_running;
        node.core_of = saved_core;
        node.load = saved_load;
    }

    const Incumbent& best() const { return best_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    // A prefix survives only if some completion could end strictly below
    // this: ties with the local incumbent are cut, the shared bound only
    // cuts strictly worse prefixes.
    double survive_limit() const {
        const double eps = tolerance_for(best_.value);
        const double global = global_.load(std::memory_order_relaxed) + tolerance_for(best_.value);
        return std::min(best_.value - eps, std::nextafter(global, std::numeric_limits<double>::infinity()));
    }
    bool pruned(double bound) const { return !(bound < survive_limit()); }

    void visit(Prefix& node) {
        ++nodes_;
        if (!packing_feasible(md_, node, survive_limit())) return;
        auto bound = prefix_bound(md_, node);
        if (!bound || pruned(*bound)) return;

        if (node.started == md_.all && node.running != 0) {
            if (auto done = solve_complete(md_, node.seq)) {
                if (done->makespan < best_.value - tolerance_for(best_.value)) {
                    best_.value = done->makespan;
                    best_.seq = node.seq;
                    best_.durations = std::move(done->durations);
                    atomic_min(global_, best_.value);
                }
            }
        }
        if (node.seq.size() >= limit_) return;
        for (std::size_t k : md_.order) {
            if (!can_follow(md_, node.running, node.started, node.finished, k)) continue;
            descend(node, k);
            if (pruned(*bound)) return;
        }
        if (allow_idle_ && node.running != 0 && node.started != md_.all) descend(node, 0);
    }

    const SearchModel& md_;
    std::size_t limit_;
    bool allow_idle_;
    Incumbent best_;
    std::atomic<double>& global_;
    std::uint64_t nodes_ = 0;
};

// Event-driven list scheduling on the table speeds, then LP-tightened.
std::optional<Incumbent> list_incumbent(const SearchModel& md, const std::vector<int>& priority) {
    std::vector<double> rem = md.ideal;
    Mask started = 0, finished = 0, running = 0;
    ConfigSequence seq;
    while (finished != md.all) {
        for (int p : priority) {
            if (std::popcount(running) >= md.cores) break;
            const Mask bit = Mask{1} << p;
            if ((started & bit) || (md.preds[static_cast<std::size_t>(p)] & ~finished)) continue;
            started |= bit;
            running |= bit;
        }
        auto it = md.index.find(running);
        if (running == 0 || it == md.index.end()) return std::nullopt;
        const auto& v = md.speed[it->second];
        double dt = std::numeric_limits<double>::infinity();
        for_each_bit(running, [&](int p) { dt = std::min(dt, rem[static_cast<std::size_t>(p)] / v[static_cast<std::size_t>(p)]); });
        Mask ended = 0;
        for_each_bit(running, [&](int p) {
            auto& r = rem[static_cast<std::size_t>(p)];
            r -= dt * v[static_cast<std::size_t>(p)];
            if (r <= 1e-9 * std::max(1.0, md.ideal[static_cast<std::size_t>(p)])) ended |= Mask{1} << p;
        });
        seq.push_back(it->second);
        running &= ~ended;
        finished |= ended;
    }
    auto d = solve_complete(md, seq);
    if (!d) return std::nullopt;
    return Incumbent{d->makespan, std::move(seq), std::move(d->durations)};
}

std::optional<Incumbent> sequence_incumbent(const SearchModel& md, const Schedule& sched) {
    ConfigSequence seq;
    for (const Step& s : sched.steps) {
        Mask bits = 0;
        for (JobId p : s.config) bits |= Mask{1} << (p - 1);
        auto it = md.index.find(bits);
        if (it == md.index.end()) return std::nullopt;
        seq.push_back(it->second);
    }
    auto d = solve_complete(md, seq);
    if (!d) return std::nullopt;
    return Incumbent{d->makespan, std::move(seq), std::move(d->durations)};
}

Incumbent initial_incumbent(const Instance& inst, const SearchModel& md) {
    std::vector<Incumbent> found;
    if (inst.flavor == Flavor::F2)
        if (auto g = sequence_incumbent(md, greedy_schedule(inst))) found.push_back(std::move(*g));

    std::vector<int> by_index(static_cast<std::size_t>(md.m));
    std::iota(by_index.begin(), by_index.end(), 0);
    auto longest_first = by_index;
    std::stable_sort(longest_first.begin(), longest_first.end(),
                     [&](int a, int b) { return md.ideal[static_cast<std::size_t>(a)] > md.ideal[static_cast<std::size_t>(b)]; });
    auto shortest_first = by_index;
    std::stable_sort(shortest_first.begin(), shortest_first.end(),
                     [&](int a, int b) { return md.ideal[static_cast<std::size_t>(a)] < md.ideal[static_cast<std::size_t>(b)]; });
    for (const auto* priority : {&longest_first, &by_index, &shortest_first})
        if (auto l = list_incumbent(md, *priority)) found.push_back(std::move(*l));

    // One job at a time in topological order is always feasible.
    ConfigSequence serial;
    for (auto it = md.reverse_topo.rbegin(); it != md.reverse_topo.rend(); ++it)
        serial.push_back(md.index.at(Mask{1} << *it));
    if (auto d = solve_complete(md, serial)) found.push_back({d->makespan, std::move(serial), std::move(d->durations)});

    Incumbent best;
    for (auto& f : found)
        if (best.seq.empty() || f.value < best.value - tolerance_for(best.value)) best = std::move(f);
    if (best.seq.empty()) throw ContractViolation("no feasible sequence found for the instance");
    return best;
}

void check_guard(int m, int guard) {
    if (m > guard || m > kHardJobLimit)
        throw CapacityError("instance has " + std::to_string(m) + " jobs, above the exact-search guard of " +
                            std::to_string(std::min(guard, kHardJobLimit)) +
                            "; use the greedy solver or export the MILP for an external solver");
}

Schedule schedule_from_sequence(const ConfigSpace& space, const ConfigSequence& seq, std::span<const double> durations,
                                double makespan, int cores) {
    std::vector<Step> steps;
    const double negligible = 1e-12 * std::max(1.0, makespan);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] == 0 || durations[i] <= negligible) continue;
        if (!steps.empty() && steps.back().config == space[seq[i]]) {
            steps.back().duration += durations[i];
            continue;
        }
        steps.push_back({space[seq[i]], durations[i]});
    }
    return make_schedule(std::move(steps), cores);
}

} // namespace

void for_each_sequence(const Instance& inst, const ConfigSpace& space, const SequenceOptions& options,
                       const std::function<void(const ConfigSequence&)>& visit) {
    const int m = inst.size();
    check_guard(m, options.job_guard);
    SpeedTable unit;
    for (std::size_t k = 1; k < space.size(); ++k) unit.set(space[k], std::vector<double>(space[k].size(), 1.0));
    const SearchModel md = make_model(inst, space, unit);
    const std::size_t limit = static_cast<std::size_t>(options.max_len > 0 ? options.max_len : 2 * m);

    Prefix node;
    std::function<void()> walk = [&] {
        if (node.started == md.all && node.running != 0) visit(node.seq);
        if (node.seq.size() >= limit) return;
        auto step_into = [&](std::size_t k) {
            const Prefix saved = node;
            node.finished |= node.running & ~md.mask[k];
            node.started |= md.mask[k];
            node.running = md.mask[k];
            node.seq.push_back(k);
            walk();
            node = saved;
        };
        for (std::size_t k = 1; k < space.size(); ++k)
            if (can_follow(md, node.running, node.started, node.finished, k)) step_into(k);
        if (options.allow_idle && node.running != 0 && node.started != md.all) step_into(0);
    };
    walk();
}

std::vector<ConfigSequence> enumerate_sequences(const Instance& inst, const ConfigSpace& space, int max_len, int job_guard) {
    std::vector<ConfigSequence> out;
    SequenceOptions options;
    options.max_len = max_len;
    options.job_guard = job_guard;
    for_each_sequence(inst, space, options, [&](const ConfigSequence& s) { out.push_back(s); });
    return out;
}

std::optional<SequenceDurations> min_durations(const ConfigSequence& seq, const ConfigSpace& space, const SpeedTable& speeds,
                                               std::span<const double> ideal_times) {
    const std::size_t L = seq.size();
    LinearProgram lp(L);
    std::fill(lp.objective.begin(), lp.objective.end(), 1.0);
    for (std::size_t p = 1; p <= ideal_times.size(); ++p) {
        std::vector<double> row(L, 0.0);
        for (std::size_t i = 0; i < L; ++i) row[i] = speeds.speed(static_cast<JobId>(p), space[seq[i]]);
        lp.add_row(std::move(row), RowSense::Equal, ideal_times[p - 1]);
    }
    return solve_sequence_lp(lp, seq);
}

ExactResult exact_solve(const Instance& inst, const ExactOptions& options) {
    validate(inst);
    const int m = inst.size();
    check_guard(m, options.job_guard);
    const ConfigSpace space = enumerate_configurations(inst);
    const SpeedTable table = resolve_speed_table(inst, space);
    const SearchModel md = make_model(inst, space, table);

    std::size_t limit = static_cast<std::size_t>(options.max_len > 0 ? options.max_len : 2 * m);
    if (options.basic_length_bound) limit = std::min(limit, static_cast<std::size_t>(m));

    const Incumbent start = initial_incumbent(inst, md);
    std::atomic<double> global{start.value};

    std::vector<std::size_t> roots;
    for (std::size_t k : md.order)
        if (can_follow(md, 0, 0, 0, k)) roots.push_back(k);

    Incumbent best = start;
    std::uint64_t nodes = 0;
    if (!options.parallel) {
        Searcher searcher(md, limit, options.allow_idle, start, global);
        Prefix root;
        for (std::size_t k : roots) searcher.descend(root, k);
        best = searcher.best();
        nodes = searcher.nodes();
    } else {
        std::vector<Incumbent> branch(roots.size());
        std::vector<std::uint64_t> branch_nodes(roots.size(), 0);
        const auto count = static_cast<long>(roots.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (long b = 0; b < count; ++b) {
            Searcher searcher(md, limit, options.allow_idle, start, global);
            Prefix root;
            searcher.descend(root, roots[static_cast<std::size_t>(b)]);
            branch[static_cast<std::size_t>(b)] = searcher.best();
            branch_nodes[static_cast<std::size_t>(b)] = searcher.nodes();
        }
        // Lowest value wins; near-ties go to the earliest branch, with the
        // starting incumbent ahead of all branches.
        double lowest = start.value;
        for (const auto& b : branch) lowest = std::min(lowest, b.value);
        const double eps = tolerance_for(lowest);
        if (!(start.value <= lowest + eps)) {
            for (const auto& b : branch)
                if (b.value <= lowest + eps) {
                    best = b;
                    break;
                }
        }
        nodes = std::accumulate(branch_nodes.begin(), branch_nodes.end(), std::uint64_t{0});
    }

    ExactResult result;
    result.sequence = best.seq;
    result.durations = best.durations;
    result.makespan = best.value;
    result.initial_upper_bound = start.value;
    result.nodes = nodes;
    result.schedule = schedule_from_sequence(space, best.seq, best.durations, best.value, inst.cores);
    return result;
}

Schedule exact_makespan(const Instance& inst, const ExactOptions& options) { return exact_solve(inst, options).schedule; }

double brute_force_no_interference(std::span<const double> lengths, int cores) {
    if (cores < 1) throw InvalidArgument("cores must be >= 1");
    if (lengths.size() > 12) throw CapacityError("brute-force partition supports at most 12 jobs");
    if (lengths.empty()) return 0.0;
    std::vector<double> loads(static_cast<std::size_t>(cores), 0.0);
    double best = std::accumulate(lengths.begin(), lengths.end(), 0.0);
    // Every job placed on every core; a job may open at most one new empty
    // core (cores are interchangeable).
    std::function<void(std::size_t, int)> place = [&](std::size_t j, int used) {
        if (j == lengths.size()) {
            best = std::min(best, *std::max_element(loads.begin(), loads.end()));
            return;
        }
        const int reach = std::min(cores, used + 1);
        for (int k = 0; k < reach; ++k) {
            loads[static_cast<std::size_t>(k)] += lengths[j];
            place(j + 1, std::max(used, k + 1));
            loads[static_cast<std::size_t>(k)] -= lengths[j];
        }
    };
    place(0, 0);
    return best;
}

} // namespace busched
