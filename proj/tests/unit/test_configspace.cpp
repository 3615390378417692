#include "busched/configspace.hpp"
#include "busched/error.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <set>

using namespace busched;
using testing_support::make_f2;

namespace {

Instance uniform(int m, int cores, std::vector<Edge> edges = {}) {
    std::vector<std::pair<double, double>> jobs(static_cast<std::size_t>(m), {1.0, 50.0});
    return make_f2(jobs, cores, std::move(edges));
}

// Every subset of size <= c with no comparable pair, by bitmask.
std::set<std::vector<JobId>> antichain_oracle(const PrecedenceDag& dag, int cores) {
    auto r = testing_support::reach_oracle(dag);
    const int m = dag.jobs;
    std::set<std::vector<JobId>> out;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<JobId> ids;
        for (int p = 0; p < m; ++p)
            if (mask & (1u << p)) ids.push_back(p + 1);
        if (static_cast<int>(ids.size()) > cores) continue;
        bool ok = true;
        for (JobId a : ids)
            for (JobId b : ids)
                if (r[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)]) ok = false;
        if (ok) out.insert(ids);
    }
    return out;
}

} // namespace

TEST_CASE("configuration counts from the examples") {
    CHECK(enumerate_configurations(uniform(4, 2)).size() == 11);
    CHECK(enumerate_configurations(uniform(3, 3)).size() == 8);
    auto chain = enumerate_configurations(uniform(3, 2, {{1, 2}, {2, 3}}));
    REQUIRE(chain.size() == 4);
    CHECK(chain[0].empty());
    CHECK(chain[1] == Configuration{1});
    CHECK(chain[2] == Configuration{2});
    CHECK(chain[3] == Configuration{3});
}

TEST_CASE("c = 2 trivial order count is 1 + m + m(m-1)/2") {
    for (int m = 2; m <= 12; ++m) CHECK(enumerate_configurations(uniform(m, 2)).size() == static_cast<std::size_t>(1 + m + m * (m - 1) / 2));
}

TEST_CASE("ordering: zero config first, then by cardinality and lexicographic") {
    auto space = enumerate_configurations(uniform(4, 3));
    CHECK(space[0].empty());
    for (std::size_t k = 1; k + 1 < space.size(); ++k) {
        const auto& a = space[k];
        const auto& b = space[k + 1];
        REQUIRE((a.size() < b.size() || (a.size() == b.size() && a.jobs() < b.jobs())));
    }
    CHECK(space[1] == Configuration{1});
    CHECK(space[5] == Configuration{1, 2});
    CHECK(space.index_of(Configuration{2, 4}).value() == 9);
    CHECK_FALSE(space.index_of(Configuration{1, 2, 3, 4}).has_value());
}

TEST_CASE("enumeration equals the antichain oracle") {
    for (auto kind : {OrderKind::Trivial, OrderKind::Random, OrderKind::Bitree, OrderKind::OneToManyToOne}) {
        for (int cores = 1; cores <= 4; ++cores) {
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                auto inst = gen_instance(9, cores, kind, seed);
                auto space = enumerate_configurations(inst);
                auto expected = antichain_oracle(inst.dag, cores);
                std::set<std::vector<JobId>> got;
                for (const auto& c : space.configs()) got.insert(c.jobs());
                REQUIRE(got.size() == space.size());
                REQUIRE(got == expected);
            }
        }
    }
}

TEST_CASE("membership matches configuration contents") {
    auto space = enumerate_configurations(uniform(4, 2));
    for (std::size_t k = 0; k < space.size(); ++k)
        for (JobId p = 1; p <= 4; ++p) CHECK(space.member(p, k) == space[k].contains(p));
}

TEST_CASE("capacity cap") {
    CHECK_THROWS_AS(enumerate_configurations(uniform(10, 3), 100), CapacityError);
    CHECK_NOTHROW(enumerate_configurations(uniform(10, 3), 176));
    CHECK_THROWS_AS(enumerate_configurations(uniform(10, 3), 175), CapacityError);
}

TEST_CASE("config precedence examples") {
    {
        auto inst = uniform(2, 2, {{1, 2}});
        auto space = enumerate_configurations(inst);
        auto a = config_precedence(space, inst.dag);
        auto i1 = *space.index_of(Configuration{1});
        auto i2 = *space.index_of(Configuration{2});
        CHECK(a[i2][i1] == 1);
        CHECK(a[i1][i2] == 0);
        CHECK(space.after(i2, i1));
        CHECK_FALSE(space.after(i1, i2));
    }
    {
        auto inst = uniform(4, 2);
        auto space = enumerate_configurations(inst);
        auto a = config_precedence(space, inst.dag);
        for (const auto& row : a)
            for (auto v : row) CHECK(v == 0);
    }
    {
        auto inst = uniform(3, 2, {{1, 3}});
        auto space = enumerate_configurations(inst);
        auto a = config_precedence(space, inst.dag);
        auto i12 = *space.index_of(Configuration{1, 2});
        auto i23 = *space.index_of(Configuration{2, 3});
        CHECK(a[i23][i12] == 1);
        CHECK(a[i12][i23] == 0);
    }
}

TEST_CASE("config precedence agrees with the closure oracle and ignores the zero config") {
    auto inst = gen_instance(8, 3, OrderKind::Random, 4);
    auto space = enumerate_configurations(inst);
    auto a = config_precedence(space, inst.dag);
    auto r = testing_support::reach_oracle(inst.dag);
    for (std::size_t i = 0; i < space.size(); ++i) {
        REQUIRE(a[0][i] == 0);
        REQUIRE(a[i][0] == 0);
        REQUIRE(a[i][i] == 0);
        for (std::size_t j = 0; j < space.size(); ++j) {
            bool expect = false;
            for (JobId p : space[i])
                for (JobId q : space[j])
                    if (r[static_cast<std::size_t>(q - 1)][static_cast<std::size_t>(p - 1)]) expect = true;
            REQUIRE(static_cast<bool>(a[i][j]) == expect);
            REQUIRE(space.after(i, j) == expect);
        }
    }
}
