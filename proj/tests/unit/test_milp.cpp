#include "busched/busmodel.hpp"
#include "busched/configspace.hpp"
#include "busched/error.hpp"
#include "busched/exact.hpp"
#include "busched/greedy.hpp"
#include "busched/milp.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace busched;
using doctest::Approx;
using testing_support::make_f2;

namespace {

std::string lp_text(const MilpModel& model) {
    std::ostringstream out;
    write_lp(model, out);
    return out.str();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("variable counts for m = 2, c = 2") {
    auto inst = make_f2({{10, 60}, {2, 60}}, 2);
    auto space = enumerate_configurations(inst);
    auto model = build_milp(inst, space);
    CHECK(space.size() == 4);
    CHECK(model.event_points() == 4);
    CHECK(model.count(VarKind::Continuous) == 20);
    CHECK(model.count(VarKind::Binary) == 30);
    std::size_t t = 0, d = 0, y = 0;
    for (const auto& v : model.variables()) {
        t += v.name.rfind("t_", 0) == 0;
        d += v.name.rfind("d_", 0) == 0;
        y += v.name.rfind("y_", 0) == 0;
    }
    CHECK(t == 20);
    CHECK(d == 20);
    CHECK(y == 10);
    CHECK(model.t_max() == 12.0);
    CHECK(model.variable_index("d_3_2") == model.d(3, 2));
    CHECK(model.variable_index("y_2_4") == model.y(2, 4));
    CHECK_THROWS_AS(model.variable_index("z_1"), ParseError);
}

TEST_CASE("zero configuration is fixed at event point 0") {
    auto inst = gen_instance(3, 2, OrderKind::Trivial, 1);
    auto space = enumerate_configurations(inst);
    auto model = build_milp(inst, space);
    const auto& d00 = model.variables()[model.d(0, 0)];
    CHECK(d00.lower == 1.0);
    CHECK(d00.upper == 1.0);
    for (std::size_t k = 1; k < space.size(); ++k) {
        const auto& v = model.variables()[model.d(0, k)];
        CHECK(v.lower == 0.0);
        CHECK(v.upper == 0.0);
    }
}

TEST_CASE("variable cap") {
    auto inst = gen_instance(6, 3, OrderKind::Trivial, 1);
    auto space = enumerate_configurations(inst);
    MilpOptions opt;
    opt.variable_cap = 100;
    CHECK_THROWS_AS(build_milp(inst, space, opt), CapacityError);
}

TEST_CASE("LP export structure for m = 1") {
    auto inst = make_f2({{7, 30}}, 2);
    auto space = enumerate_configurations(inst);
    auto text = lp_text(build_milp(inst, space));
    CHECK(text.find("Minimize\n obj: t_0_0 + t_0_1 + t_1_0 + t_1_1 + t_2_0 + t_2_1\n") != std::string::npos);
    CHECK(text.find("Binaries\n d_0_0 d_0_1 d_1_0 d_1_1 d_2_0 d_2_1 y_1_0 y_1_1 y_1_2\n") != std::string::npos);
    CHECK(text.find("work_1: t_0_1 + t_1_1 + t_2_1 = 7\n") != std::string::npos);
    CHECK(text.rfind("End\n") == text.size() - 4);
}

TEST_CASE("LP export is deterministic and matches the golden file") {
    auto inst = make_f2({{10, 60}, {2, 60}}, 2, {});
    auto space = enumerate_configurations(inst);
    auto model = build_milp(inst, space);
    const auto first = lp_text(model);
    CHECK(first == lp_text(build_milp(inst, space)));

    testing_support::TempDir dir("milp");
    export_lp(model, dir.path / "a.lp");
    export_lp(model, dir.path / "b.lp");
    CHECK(read_file(dir.path / "a.lp") == read_file(dir.path / "b.lp"));
    CHECK(read_file(dir.path / "a.lp") == read_file(std::filesystem::path(BUSCHED_GOLDEN_DIR) / "ab_trivial.lp"));

    auto chain = make_f2({{3, 40}, {1, 70}, {2, 20}}, 2, {{1, 3}});
    auto chain_space = enumerate_configurations(chain);
    CHECK(lp_text(build_milp(chain, chain_space)) ==
          read_file(std::filesystem::path(BUSCHED_GOLDEN_DIR) / "chain13.lp"));
}

TEST_CASE("metadata maps every variable") {
    auto inst = make_f2({{10, 60}, {2, 60}}, 2);
    auto space = enumerate_configurations(inst);
    auto model = build_milp(inst, space);
    auto meta = milp_metadata(model);
    CHECK(meta["variables"].size() == model.variables().size());
    testing_support::TempDir dir("meta");
    export_metadata(model, dir.path / "m.json");
    CHECK(std::filesystem::file_size(dir.path / "m.json") > 0);
}

TEST_CASE("embedded optimal sequence is a feasible solution with the exact objective") {
    auto inst = make_f2({{10, 60}, {2, 60}}, 2);
    auto space = enumerate_configurations(inst);
    auto model = build_milp(inst, space);
    auto ex = exact_solve(inst);
    auto sol = solution_from_sequence(model, space, ex.sequence, ex.durations);
    CHECK(solution_violations(model, sol).empty());
    CHECK(sol.objective == Approx(10.4).epsilon(1e-12));
    auto sched = schedule_from_solution(model, sol);
    CHECK(std::abs(sched.makespan - 10.4) <= 1e-9);
    auto greedy = greedy_schedule(inst);
    CHECK(sched.makespan == Approx(greedy.makespan).epsilon(1e-12));
    REQUIRE(sched.steps.size() == greedy.steps.size());
    CHECK(schedule_violations(sched, inst).empty());
}

TEST_CASE("embedded solutions round trip on generated instances") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto inst = gen_instance(4, 2 + static_cast<int>(seed % 2), static_cast<OrderKind>(seed % 4), seed);
        auto space = enumerate_configurations(inst);
        auto model = build_milp(inst, space);
        auto ex = exact_solve(inst);
        auto sol = solution_from_sequence(model, space, ex.sequence, ex.durations);
        auto issues = solution_violations(model, sol);
        INFO("seed ", seed, (issues.empty() ? std::string() : issues.front()));
        REQUIRE(issues.empty());
        auto sched = schedule_from_solution(model, sol);
        REQUIRE(std::abs(sched.makespan - sol.objective) <= 1e-6);
        REQUIRE(schedule_violations(sched, inst).empty());
        // every job receives exactly its work
        auto table = materialize_speed_table(inst, space);
        REQUIRE(max_completion_error(sched, inst, table) <= 1e-6);
    }
}

TEST_CASE("m = 1 model and solution") {
    auto inst = make_f2({{7, 30}}, 3);
    auto space = enumerate_configurations(inst);
    auto model = build_milp(inst, space);
    auto sol = solution_from_sequence(model, space, {1}, std::vector<double>{7.0});
    CHECK(solution_violations(model, sol).empty());
    auto sched = schedule_from_solution(model, sol);
    REQUIRE(sched.steps.size() == 1);
    CHECK(sched.makespan == 7.0);
}

TEST_CASE("ordering rows reject a reversed chain; the literal form rejects the valid one") {
    auto inst = make_f2({{1, 40}, {2, 40}}, 2, {{1, 2}});
    auto space = enumerate_configurations(inst);
    const std::size_t k1 = *space.index_of(Configuration{1});
    const std::size_t k2 = *space.index_of(Configuration{2});

    auto model = build_milp(inst, space);
    auto good = solution_from_sequence(model, space, {k1, k2}, std::vector<double>{1.0, 2.0});
    CHECK(solution_violations(model, good).empty());
    auto reversed = solution_from_sequence(model, space, {k2, k1}, std::vector<double>{2.0, 1.0});
    CHECK_FALSE(solution_violations(model, reversed).empty());

    MilpOptions literal;
    literal.literal_order = true;
    auto lit = build_milp(inst, space, literal);
    CHECK(lit.literal_order());
    auto lit_good = solution_from_sequence(lit, space, {k1, k2}, std::vector<double>{1.0, 2.0});
    CHECK_FALSE(solution_violations(lit, lit_good).empty());
}

TEST_CASE("schedule_from_solution validation") {
    auto inst = make_f2({{10, 60}, {2, 60}}, 2);
    auto space = enumerate_configurations(inst);
    auto model = build_milp(inst, space);
    auto ex = exact_solve(inst);
    auto sol = solution_from_sequence(model, space, ex.sequence, ex.durations);

    auto frac = sol;
    frac.values[model.d(1, ex.sequence[0])] = 0.5;
    CHECK_THROWS_AS(schedule_from_solution(model, frac), ValidationError);

    auto wrong_obj = sol;
    wrong_obj.objective += 1.0;
    CHECK_THROWS_AS(schedule_from_solution(model, wrong_obj), ValidationError);

    // job 2 runs, stops, and runs again
    const std::size_t k2 = *space.index_of(Configuration{2});
    const std::size_t k1 = *space.index_of(Configuration{1});
    auto split = solution_from_sequence(model, space, {k2, k1, k2}, std::vector<double>{1.0, 10.0, 1.0});
    try {
        schedule_from_solution(model, split);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("job 2") != std::string::npos);
    }
}

TEST_CASE("solution parsing") {
    auto inst = make_f2({{10, 60}, {2, 60}}, 2);
    auto space = enumerate_configurations(inst);
    auto model = build_milp(inst, space);
    std::istringstream in("# comment\n\nt_1_3 2.4\nt_2_1 8\nd_0_0 1\nd_1_3 1\nd_2_1 1\nd_3_0 1\nd_4_0 1\ny_1_1 1\ny_2_1 1\n");
    auto sol = parse_solution(model, in);
    CHECK(sol.objective == Approx(10.4));
    CHECK(solution_violations(model, sol).empty());
    CHECK(std::abs(schedule_from_solution(model, sol).makespan - 10.4) <= 1e-9);

    std::istringstream bad("t_9_9 1\n");
    CHECK_THROWS_AS(parse_solution(model, bad), ParseError);
    std::istringstream garbage("t_1_3 abc\n");
    CHECK_THROWS_AS(parse_solution(model, garbage), ParseError);
}
