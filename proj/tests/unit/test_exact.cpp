#include "busched/busmodel.hpp"
#include "busched/configspace.hpp"
#include "busched/error.hpp"
#include "busched/exact.hpp"
#include "busched/greedy.hpp"
#include "busched/lp.hpp"
#include "busched/rng.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <functional>
#include <limits>
#include <set>

using namespace busched;
using doctest::Approx;
using testing_support::make_f2;

namespace {

// Canonical-sequence test written directly from the definition.
bool canonical(const ConfigSequence& seq, const ConfigSpace& space, const PrecedenceDag& dag) {
    const int m = space.jobs();
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
        if (seq[i] == seq[i + 1]) return false;
    std::vector<int> first(static_cast<std::size_t>(m + 1), -1);
    std::vector<int> last(static_cast<std::size_t>(m + 1), -1);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] == 0) return false;
        for (JobId p : space[seq[i]]) {
            auto& f = first[static_cast<std::size_t>(p)];
            auto& l = last[static_cast<std::size_t>(p)];
            if (f < 0) f = static_cast<int>(i);
            else if (l != static_cast<int>(i) - 1) return false;
            l = static_cast<int>(i);
        }
    }
    for (JobId p = 1; p <= m; ++p)
        if (first[static_cast<std::size_t>(p)] < 0) return false;
    for (const auto& e : dag.edges)
        if (first[static_cast<std::size_t>(e.succ)] <= last[static_cast<std::size_t>(e.pred)]) return false;
    return true;
}

std::set<ConfigSequence> sequence_oracle(const ConfigSpace& space, const PrecedenceDag& dag, int max_len) {
    std::set<ConfigSequence> out;
    ConfigSequence cur;
    std::function<void()> rec = [&] {
        if (!cur.empty() && canonical(cur, space, dag)) out.insert(cur);
        if (static_cast<int>(cur.size()) == max_len) return;
        for (std::size_t k = 1; k < space.size(); ++k) {
            cur.push_back(k);
            rec();
            cur.pop_back();
        }
    };
    rec();
    return out;
}

// Minimum over every canonical sequence, each solved as an LP here.
double exhaustive_optimum(const Instance& inst, int max_len) {
    auto space = enumerate_configurations(inst);
    auto table = resolve_speed_table(inst, space);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& seq : sequence_oracle(space, inst.dag, max_len)) {
        LinearProgram lp(seq.size());
        std::fill(lp.objective.begin(), lp.objective.end(), 1.0);
        for (const auto& job : inst.jobs) {
            std::vector<double> row(seq.size());
            for (std::size_t i = 0; i < seq.size(); ++i) row[i] = table.speed(job.id, space[seq[i]]);
            lp.add_row(row, RowSense::Equal, job.ideal_time);
        }
        auto r = solve_lp(lp);
        if (r.status == LpStatus::Optimal) best = std::min(best, r.objective);
    }
    return best;
}

ConfigSequence seq_of(const ConfigSpace& space, std::initializer_list<Configuration> cfgs) {
    ConfigSequence seq;
    for (const auto& c : cfgs) seq.push_back(*space.index_of(c));
    return seq;
}

} // namespace

TEST_CASE("enumerate_sequences examples") {
    auto one = make_f2({{1, 50}}, 2);
    auto s1 = enumerate_configurations(one);
    CHECK(enumerate_sequences(one, s1, 2) == std::vector<ConfigSequence>{{1}});

    auto two = make_f2({{1, 50}, {1, 50}}, 2);
    auto s2 = enumerate_configurations(two);
    auto all = enumerate_sequences(two, s2, 4);
    std::set<ConfigSequence> got(all.begin(), all.end());
    CHECK(got.size() == all.size());
    for (auto expected : {seq_of(s2, {{1}, {2}}), seq_of(s2, {{2}, {1}}), seq_of(s2, {{1, 2}}),
                          seq_of(s2, {{1, 2}, {1}}), seq_of(s2, {{1}, {1, 2}}), seq_of(s2, {{1, 2}, {2}}),
                          seq_of(s2, {{2}, {1, 2}}), seq_of(s2, {{1}, {1, 2}, {2}}), seq_of(s2, {{2}, {1, 2}, {1}})})
        CHECK(got.count(expected) == 1);
    CHECK(got == sequence_oracle(s2, two.dag, 4));

    auto chain = make_f2({{1, 50}, {1, 50}}, 2, {{1, 2}});
    auto sc = enumerate_configurations(chain);
    CHECK(enumerate_sequences(chain, sc, 4) == std::vector<ConfigSequence>{seq_of(sc, {{1}, {2}})});
}

TEST_CASE("enumerate_sequences equals the brute-force oracle") {
    for (auto kind : {OrderKind::Trivial, OrderKind::Random, OrderKind::Bitree}) {
        for (int cores : {2, 3}) {
            auto inst = gen_instance(3, cores, kind, 5);
            auto space = enumerate_configurations(inst);
            auto all = enumerate_sequences(inst, space, 5);
            std::set<ConfigSequence> got(all.begin(), all.end());
            REQUIRE(got.size() == all.size());
            REQUIRE(got == sequence_oracle(space, inst.dag, 5));
        }
    }
}

TEST_CASE("enumerate_sequences guard") {
    auto inst = gen_instance(9, 2, OrderKind::Trivial, 1);
    auto space = enumerate_configurations(inst);
    CHECK_THROWS_AS(enumerate_sequences(inst, space, 4), CapacityError);
}

TEST_CASE("min_durations examples") {
    auto inst = make_f2({{10, 60}, {2, 60}}, 2);
    auto space = enumerate_configurations(inst);
    auto table = materialize_speed_table(inst, space);
    auto s = inst.ideal_times();

    auto r = min_durations(seq_of(space, {{1, 2}, {1}}), space, table, s);
    REQUIRE(r.has_value());
    CHECK(r->durations[0] == Approx(2.4).epsilon(1e-12));
    CHECK(r->durations[1] == Approx(8.0).epsilon(1e-12));
    CHECK(std::abs(r->makespan - 10.4) <= 1e-9);

    CHECK_FALSE(min_durations(seq_of(space, {{1}}), space, table, s).has_value());

    auto single = make_f2({{7, 60}}, 2);
    auto ss = enumerate_configurations(single);
    auto st = materialize_speed_table(single, ss);
    auto rs = min_durations({1}, ss, st, single.ideal_times());
    REQUIRE(rs.has_value());
    CHECK(rs->durations == std::vector<double>{7.0});
}

TEST_CASE("min_durations residuals stay within 1e-8 relative") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto inst = gen_instance(3, 2 + static_cast<int>(seed % 2), OrderKind::Trivial, seed);
        auto space = enumerate_configurations(inst);
        auto table = materialize_speed_table(inst, space);
        for (const auto& seq : enumerate_sequences(inst, space, 6)) {
            auto r = min_durations(seq, space, table, inst.ideal_times());
            if (!r) continue;
            for (const auto& job : inst.jobs) {
                double work = 0.0;
                for (std::size_t i = 0; i < seq.size(); ++i) work += table.speed(job.id, space[seq[i]]) * r->durations[i];
                REQUIRE(std::abs(work - job.ideal_time) <= 1e-8 * job.ideal_time);
            }
        }
    }
}

TEST_CASE("exact worked example and trivial cases") {
    auto ab = make_f2({{10, 60}, {2, 60}}, 2);
    auto r = exact_solve(ab);
    CHECK(std::abs(r.makespan - 10.4) <= 1e-9);
    CHECK(schedule_violations(r.schedule, ab).empty());

    auto free = make_f2({{3, 0}, {3, 0}, {2, 0}, {2, 0}}, 2);
    CHECK(std::abs(exact_makespan(free).makespan - 5.0) <= 1e-9);

    auto chain = make_f2({{1, 90}, {2, 90}, {3.5, 90}, {4, 90}}, 3, {{1, 2}, {2, 3}, {3, 4}});
    CHECK(std::abs(exact_makespan(chain).makespan - 10.5) <= 1e-9);
}

TEST_CASE("exact guard") {
    auto inst = gen_instance(9, 2, OrderKind::Trivial, 1);
    CHECK_THROWS_AS(exact_solve(inst), CapacityError);
    ExactOptions opt;
    opt.job_guard = 9;
    auto chain = gen_instance(9, 2, OrderKind::OneToManyToOne, 1);
    CHECK_NOTHROW(exact_solve(chain, opt));
}

TEST_CASE("exact equals the exhaustive sequence-LP optimum for small instances") {
    for (auto kind : {OrderKind::Trivial, OrderKind::Random, OrderKind::Bitree, OrderKind::OneToManyToOne}) {
        for (int cores : {2, 3}) {
            for (std::uint64_t seed = 0; seed < 4; ++seed) {
                const int m = kind == OrderKind::OneToManyToOne ? 4 : 3;
                auto inst = gen_instance(m, cores, kind, seed);
                const double expect = exhaustive_optimum(inst, 2 * m);
                auto r = exact_solve(inst);
                INFO(to_string(kind), " c=", cores, " seed=", seed);
                REQUIRE(r.makespan == Approx(expect).epsilon(1e-9));
                REQUIRE(schedule_violations(r.schedule, inst).empty());
            }
        }
    }
}

TEST_CASE("exact options agree: serial vs parallel, length bound on and off, idle allowed") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        auto inst = gen_instance(5, 2 + static_cast<int>(seed % 2), seed % 3 ? OrderKind::Trivial : OrderKind::Random, seed);
        auto base = exact_solve(inst);
        ExactOptions par;
        par.parallel = true;
        auto p = exact_solve(inst, par);
        CHECK(p.makespan == base.makespan);
        CHECK(p.sequence == base.sequence);
        ExactOptions loose;
        loose.basic_length_bound = false;
        CHECK(exact_solve(inst, loose).makespan == Approx(base.makespan).epsilon(1e-9));
        ExactOptions idle;
        idle.allow_idle = true;
        CHECK(exact_solve(inst, idle).makespan == Approx(base.makespan).epsilon(1e-9));
    }
}

TEST_CASE("exact never exceeds greedy and its schedule completes every job") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const int m = 4 + static_cast<int>(seed % 3);
        auto inst = gen_instance(m, 2 + static_cast<int>(seed % 2), static_cast<OrderKind>(seed % 4), seed);
        auto e = exact_solve(inst);
        auto g = greedy_schedule(inst);
        REQUIRE(g.makespan >= e.makespan - 1e-9);
        REQUIRE(e.initial_upper_bound >= e.makespan - 1e-9);
        auto space = enumerate_configurations(inst);
        auto table = materialize_speed_table(inst, space);
        REQUIRE(max_completion_error(e.schedule, inst, table) <= 1e-9);
        REQUIRE(schedule_violations(e.schedule, inst).empty());
    }
}

TEST_CASE("brute_force_no_interference examples and guard") {
    CHECK(brute_force_no_interference(std::vector<double>{3, 3, 2, 2}, 2) == 5.0);
    CHECK(brute_force_no_interference(std::vector<double>{5}, 2) == 5.0);
    CHECK(brute_force_no_interference(std::vector<double>{1, 1, 1}, 3) == 1.0);
    CHECK(brute_force_no_interference(std::vector<double>{4, 3, 3, 2, 2, 2}, 3) == 6.0);
    CHECK_THROWS_AS(brute_force_no_interference(std::vector<double>(13, 1.0), 2), CapacityError);
}

TEST_CASE("exact matches the partition oracle on interference-free instances") {
    Rng rng(5);
    for (int trial = 0; trial < 15; ++trial) {
        const int m = static_cast<int>(rng.between(2, 7));
        const int cores = static_cast<int>(rng.between(2, 3));
        std::vector<std::pair<double, double>> jobs;
        std::vector<double> lengths;
        for (int i = 0; i < m; ++i) {
            const double s = static_cast<double>(rng.between(1, 9));
            jobs.push_back({s, 100.0 / cores * rng.uniform01()});
            lengths.push_back(s);
        }
        auto inst = make_f2(jobs, cores);
        REQUIRE(exact_makespan(inst).makespan == Approx(brute_force_no_interference(lengths, cores)).epsilon(1e-12));
    }
}
