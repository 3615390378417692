#include "busched/error.hpp"
#include "busched/instance.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <fstream>

using namespace busched;
using testing_support::TempDir;

namespace {

std::vector<Edge> edges_of(std::initializer_list<std::pair<int, int>> pairs) {
    std::vector<Edge> out;
    for (auto [a, b] : pairs) out.push_back({a, b});
    return out;
}

} // namespace

TEST_CASE("gen_partial_order: fixed topologies") {
    CHECK(gen_partial_order(OrderKind::Trivial, 5, 3).edges.empty());
    CHECK(gen_partial_order(OrderKind::Bitree, 4, 0).edges == edges_of({{1, 2}, {1, 3}, {2, 4}}));
    CHECK(gen_partial_order(OrderKind::OneToManyToOne, 4, 0).edges == edges_of({{1, 2}, {1, 3}, {2, 4}, {3, 4}}));
    CHECK(gen_partial_order(OrderKind::Bitree, 1, 0).edges.empty());
}

TEST_CASE("gen_partial_order: argument errors") {
    CHECK_THROWS_AS(gen_partial_order(OrderKind::Trivial, 0, 0), InvalidArgument);
    CHECK_THROWS_AS(gen_partial_order(OrderKind::OneToManyToOne, 2, 0), InvalidArgument);
    CHECK_NOTHROW(gen_partial_order(OrderKind::OneToManyToOne, 3, 0));
}

TEST_CASE("gen_partial_order: acyclic, deterministic, forward edges") {
    for (auto kind : {OrderKind::Trivial, OrderKind::Random, OrderKind::Bitree, OrderKind::OneToManyToOne}) {
        for (int m = 3; m <= 64; m += 7) {
            for (std::uint64_t seed = 0; seed < 100; ++seed) {
                auto dag = gen_partial_order(kind, m, seed);
                REQUIRE(topological_order(dag).has_value());
                if (kind == OrderKind::Random) {
                    for (const auto& e : dag.edges) REQUIRE(e.pred < e.succ);
                    REQUIRE(dag == gen_partial_order(kind, m, seed));
                }
            }
        }
    }
}

TEST_CASE("gen_partial_order: random kind uses about half the pairs") {
    std::size_t edges = 0;
    std::size_t pairs = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        edges += gen_partial_order(OrderKind::Random, 20, seed).edges.size();
        pairs += 20 * 19 / 2;
    }
    const double frac = static_cast<double>(edges) / static_cast<double>(pairs);
    CHECK(frac > 0.45);
    CHECK(frac < 0.55);
}

TEST_CASE("topological_order detects cycles") {
    PrecedenceDag dag(2, edges_of({{1, 2}, {2, 1}}));
    CHECK_FALSE(topological_order(dag).has_value());
    PrecedenceDag chain(3, edges_of({{1, 2}, {2, 3}}));
    CHECK(*topological_order(chain) == std::vector<JobId>{1, 2, 3});
}

TEST_CASE("transitive closure matches Floyd-Warshall") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto dag = gen_partial_order(OrderKind::Random, 9, seed);
        TransitiveClosure tc(dag);
        auto r = testing_support::reach_oracle(dag);
        for (JobId p = 1; p <= 9; ++p)
            for (JobId q = 1; q <= 9; ++q)
                REQUIRE(tc.precedes(p, q) == r[static_cast<std::size_t>(p - 1)][static_cast<std::size_t>(q - 1)]);
    }
}

TEST_CASE("gen_instance: ranges, determinism, minimal case") {
    auto a = gen_instance(4, 2, OrderKind::Trivial, 1, {{1, 10}, {10, 90}});
    CHECK(a.size() == 4);
    CHECK(a.cores == 2);
    CHECK(a.flavor == Flavor::F2);
    for (const auto& j : a.jobs) {
        CHECK(j.ideal_time >= 1.0);
        CHECK(j.ideal_time <= 10.0);
        CHECK(j.bus_demand >= 10.0);
        CHECK(j.bus_demand <= 90.0);
    }
    CHECK(a == gen_instance(4, 2, OrderKind::Trivial, 1, {{1, 10}, {10, 90}}));
    CHECK_FALSE(a == gen_instance(4, 2, OrderKind::Trivial, 2, {{1, 10}, {10, 90}}));

    auto one = gen_instance(1, 4, OrderKind::Trivial, 7);
    CHECK(one.size() == 1);
    CHECK_NOTHROW(validate(one));
}

TEST_CASE("gen_instance: job data does not depend on the order kind") {
    auto a = gen_instance(6, 2, OrderKind::Trivial, 11);
    auto b = gen_instance(6, 2, OrderKind::Bitree, 11);
    CHECK(a.jobs == b.jobs);
}

TEST_CASE("gen_instance: argument errors") {
    CHECK_THROWS_AS(gen_instance(0, 2, OrderKind::Trivial, 1), InvalidArgument);
    CHECK_THROWS_AS(gen_instance(3, 0, OrderKind::Trivial, 1), InvalidArgument);
    CHECK_THROWS_AS(gen_instance(3, 2, OrderKind::Trivial, 1, {{5, 1}, {10, 90}}), InvalidArgument);
    CHECK_THROWS_AS(gen_instance(3, 2, OrderKind::Trivial, 1, {{1, 10}, {90, 10}}), InvalidArgument);
    CHECK_THROWS_AS(gen_instance(3, 2, OrderKind::Trivial, 1, {{1, 10}, {10, 120}}), InvalidArgument);
    CHECK_NOTHROW(gen_instance(3, 2, OrderKind::Trivial, 1, {{2, 2}, {50, 50}}));
}

TEST_CASE("validate rejects broken instances") {
    auto good = testing_support::make_f2({{1, 10}, {2, 20}}, 2);
    CHECK_NOTHROW(validate(good));

    auto bad = good;
    bad.jobs[0].ideal_time = 0.0;
    CHECK_THROWS_AS(validate(bad), ValidationError);

    bad = good;
    bad.jobs[1].bus_demand = 100.5;
    CHECK_THROWS_AS(validate(bad), ValidationError);

    bad = good;
    bad.cores = 0;
    CHECK_THROWS_AS(validate(bad), ValidationError);

    bad = good;
    bad.dag = PrecedenceDag(2, edges_of({{1, 2}, {2, 1}}));
    CHECK_THROWS_AS(validate(bad), ValidationError);

    bad = good;
    bad.dag = PrecedenceDag(2, edges_of({{1, 3}}));
    CHECK_THROWS_AS(validate(bad), ValidationError);
}

TEST_CASE("instance JSON round trip, F2 and F1") {
    TempDir dir("instance");
    for (auto kind : {OrderKind::Trivial, OrderKind::Random, OrderKind::Bitree, OrderKind::OneToManyToOne}) {
        auto inst = gen_instance(7, 3, kind, 5);
        auto path = dir.path / "i.json";
        save_instance(inst, path);
        CHECK(load_instance(path) == inst);
    }

    Instance f1 = testing_support::make_f2({{3, 0}, {4, 0}}, 2);
    f1.flavor = Flavor::F1;
    SpeedTable table;
    table.set(Configuration{1}, {1.0});
    table.set(Configuration{2}, {1.0});
    table.set(Configuration{1, 2}, {0.75, 0.5});
    f1.speed_table = table;
    validate(f1);
    auto path = dir.path / "f1.json";
    save_instance(f1, path);
    auto back = load_instance(path);
    CHECK(back == f1);
    CHECK(back.speed_table->speed(1, Configuration{1, 2}) == 0.75);
    CHECK(back.speed_table->speed(2, Configuration{1, 2}) == 0.5);
}

TEST_CASE("instance loading errors") {
    TempDir dir("instance_err");
    auto write = [&](const std::string& text) {
        auto path = dir.path / "x.json";
        std::ofstream(path) << text;
        return path;
    };
    const std::string jobs = R"("jobs":[{"id":1,"ideal_time":1,"bus_demand":10},{"id":2,"ideal_time":2,"bus_demand":20}])";

    auto cyclic = write(R"({"version":1,"m":2,"cores":2,"flavor":"F2",)" + jobs + R"(,"edges":[[1,2],[2,1]]})");
    CHECK_THROWS_AS(load_instance(cyclic), ValidationError);

    auto no_cores = write(R"({"version":1,"m":2,"flavor":"F2",)" + jobs + R"(,"edges":[]})");
    try {
        load_instance(no_cores);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("cores") != std::string::npos);
    }

    auto not_json = write("{ nope");
    CHECK_THROWS_AS(load_instance(not_json), ParseError);

    CHECK_THROWS_AS(load_instance(dir.path / "missing.json"), IoError);
}

TEST_CASE("speed table lookups") {
    SpeedTable table;
    table.set(Configuration{1, 3}, {0.5, 0.25});
    CHECK(table.speed(1, Configuration{1, 3}) == 0.5);
    CHECK(table.speed(3, Configuration{1, 3}) == 0.25);
    CHECK(table.speed(2, Configuration{1, 3}) == 0.0);
    CHECK_THROWS_AS(table.speed(1, Configuration{1, 2}), ModelCoverageError);
    CHECK_THROWS_AS(table.set(Configuration{1, 2}, {1.0}), InvalidArgument);
}
