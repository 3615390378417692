// Command-line front end: generate, solve, export, simulate, compare.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "busched/busmodel.hpp"
#include "busched/configspace.hpp"
#include "busched/error.hpp"
#include "busched/exact.hpp"
#include "busched/experiment.hpp"
#include "busched/greedy.hpp"
#include "busched/instance.hpp"
#include "busched/milp.hpp"
#include "busched/report.hpp"
#include "busched/simulator.hpp"

namespace fs = std::filesystem;
using namespace busched;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kUsage = 2, kMissingFile = 3, kBadInput = 4, kGuard = 5 };

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument:
        return kUsage;
    case ErrorKind::Io:
        return kMissingFile;
    case ErrorKind::Parse:
    case ErrorKind::Validation:
    case ErrorKind::ModelCoverage:
        return kBadInput;
    case ErrorKind::Capacity:
        return kGuard;
    default:
        return kOther;
    }
}

void report_error(const std::string& kind, const std::string& message) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

// Writes to `path`, or stdout when empty or "-".
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    body(out);
}

nlohmann::json report_json(const SimulationReport& rep) {
    nlohmann::json jobs = nlohmann::json::array();
    for (const auto& j : rep.jobs) jobs.push_back({{"job", j.job}, {"core", j.core}, {"start", j.start}, {"finish", j.finish}});
    return {{"planned_makespan", rep.planned_makespan},
            {"measured_makespan", rep.measured_makespan},
            {"deviation_pct", rep.deviation_pct},
            {"jobs", jobs}};
}

struct NoiseFlags {
    double amplitude = 0.0;
    std::uint64_t seed = 0;
    bool slowdown_only = false;

    void add_to(CLI::App* cmd) {
        auto* noise = cmd->add_option("--noise", amplitude, "multiplicative speed noise amplitude in [0, 1)");
        noise->check(CLI::Range(0.0, 0.999999));
        cmd->add_option("--noise-seed", seed, "seed for the noise factors");
        cmd->add_flag("--slowdown-only", slowdown_only, "draw noise factors from [1 - noise, 1]")->needs(noise);
    }
    NoiseOptions options() const { return {amplitude, seed, slowdown_only}; }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bus-contention-aware multicore scheduling toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "busched 1.0");

    // generate
    auto* gen = app.add_subcommand("generate", "write a random instance");
    int gen_m = 4, gen_cores = 2;
    std::string gen_order = "trivial", gen_out;
    std::uint64_t gen_seed = 0;
    GenerateOptions gen_opts;
    gen->add_option("--m", gen_m, "number of jobs")->check(CLI::PositiveNumber);
    gen->add_option("--cores", gen_cores, "number of cores")->check(CLI::PositiveNumber);
    gen->add_option("--order", gen_order, "trivial | random | bitree | one_to_many_to_one");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--time-lo", gen_opts.time_range.lo, "smallest ideal time");
    gen->add_option("--time-hi", gen_opts.time_range.hi, "largest ideal time");
    gen->add_option("--demand-lo", gen_opts.demand_range.lo, "smallest bus demand (%)");
    gen->add_option("--demand-hi", gen_opts.demand_range.hi, "largest bus demand (%)");
    gen->add_option("-o,--output", gen_out, "output file (default stdout)");

    // greedy
    auto* greedy = app.add_subcommand("greedy", "greedy schedule for an F2 instance");
    std::string greedy_in, greedy_out;
    greedy->add_option("instance", greedy_in, "instance JSON")->required();
    greedy->add_option("-o,--output", greedy_out, "schedule JSON (default stdout)");

    // exact
    auto* exact = app.add_subcommand("exact", "optimal schedule by sequence search");
    std::string exact_in, exact_out;
    ExactOptions exact_opts;
    bool exact_serial = false;
    exact->add_option("instance", exact_in, "instance JSON")->required();
    exact->add_option("-o,--output", exact_out, "schedule JSON (default stdout)");
    exact->add_option("--guard", exact_opts.job_guard, "largest job count accepted");
    exact->add_option("--max-len", exact_opts.max_len, "longest sequence considered (0 = 2m)");
    exact->add_flag("--allow-idle", exact_opts.allow_idle, "allow idle steps between configurations");
    auto* par = exact->add_flag("--parallel", exact_opts.parallel, "search first-configuration branches in parallel");
    exact->add_flag("--serial", exact_serial, "single-threaded search (default)")->excludes(par);

    // milp-export
    auto* mexp = app.add_subcommand("milp-export", "write the event-point model in LP format");
    std::string mexp_in, mexp_out, mexp_meta;
    MilpOptions milp_opts;
    mexp->add_option("instance", mexp_in, "instance JSON")->required();
    mexp->add_option("-o,--output", mexp_out, "LP file (default stdout)");
    mexp->add_option("--meta", mexp_meta, "variable metadata JSON");
    mexp->add_option("--event-points", milp_opts.event_points, "largest event index (0 = 2m)");
    mexp->add_flag("--literal-order", milp_opts.literal_order, "emit the ordering constraint in its literal big-M form");
    mexp->add_option("--variable-cap", milp_opts.variable_cap, "largest number of duration variables");

    // milp-import
    auto* mimp = app.add_subcommand("milp-import", "rebuild a schedule from a solver solution");
    std::string mimp_in, mimp_sol, mimp_out;
    MilpOptions mimp_opts;
    mimp->add_option("instance", mimp_in, "instance JSON")->required();
    mimp->add_option("solution", mimp_sol, "solution file with '<name> <value>' lines")->required();
    mimp->add_option("-o,--output", mimp_out, "schedule JSON (default stdout)");
    mimp->add_option("--event-points", mimp_opts.event_points, "largest event index used at export (0 = 2m)");
    mimp->add_flag("--literal-order", mimp_opts.literal_order, "model was exported with --literal-order");

    // simulate
    auto* sim = app.add_subcommand("simulate", "replay a schedule against the instance's speed model");
    std::string sim_in, sim_sched, sim_out;
    NoiseFlags sim_noise;
    sim->add_option("instance", sim_in, "instance JSON")->required();
    sim->add_option("schedule", sim_sched, "schedule JSON")->required();
    sim->add_option("-o,--output", sim_out, "report JSON (default stdout)");
    sim_noise.add_to(sim);

    // compare
    auto* cmp = app.add_subcommand("compare", "greedy vs exact over a preset grid, with CSV reports");
    std::string cmp_preset = "quick", cmp_dir = "compare-out";
    int cmp_seeds = 0;
    int cmp_guard = kDefaultJobGuard;
    bool cmp_serial = false;
    NoiseFlags cmp_noise;
    std::uint64_t cmp_base = 0;
    cmp->add_option("--preset", cmp_preset, "full | quick");
    cmp->add_option("--seeds", cmp_seeds, "instances per cell (0 = preset default)")->check(CLI::NonNegativeNumber);
    cmp->add_option("--base-seed", cmp_base, "seed mixed into every instance seed");
    cmp->add_option("--guard", cmp_guard, "largest job count solved exactly");
    cmp->add_option("--out-dir", cmp_dir, "directory for the CSV files");
    cmp->add_flag("--serial", cmp_serial, "run instances one at a time");
    cmp_noise.add_to(cmp);

    // estimate
    auto* est = app.add_subcommand("estimate", "recover bus demands of an F2 instance from simulated co-runs");
    std::string est_in;
    est->add_option("instance", est_in, "instance JSON")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "time greedy and exact on generated instances");
    int bench_m = 6, bench_cores = 2, bench_count = 5;
    std::string bench_order = "random";
    bool bench_parallel = false;
    bench->add_option("--m", bench_m, "number of jobs")->check(CLI::PositiveNumber);
    bench->add_option("--cores", bench_cores, "number of cores")->check(CLI::PositiveNumber);
    bench->add_option("--order", bench_order, "order kind");
    bench->add_option("--count", bench_count, "instances")->check(CLI::PositiveNumber);
    bench->add_flag("--parallel", bench_parallel, "parallel exact search");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what());
        return kUsage;
    }

    try {
        if (*gen) {
            const Instance inst = gen_instance(gen_m, gen_cores, order_kind_from_string(gen_order), gen_seed, gen_opts);
            emit(gen_out, to_json(inst).dump(1) + "\n");
        } else if (*greedy) {
            emit(greedy_out, to_json(greedy_schedule(load_instance(greedy_in))).dump(1) + "\n");
        } else if (*exact) {
            emit(exact_out, to_json(exact_makespan(load_instance(exact_in), exact_opts)).dump(1) + "\n");
        } else if (*mexp) {
            const Instance inst = load_instance(mexp_in);
            const MilpModel model = build_milp(inst, enumerate_configurations(inst), milp_opts);
            std::ostringstream lp;
            write_lp(model, lp);
            emit(mexp_out, lp.str());
            if (!mexp_meta.empty()) export_metadata(model, mexp_meta);
        } else if (*mimp) {
            const Instance inst = load_instance(mimp_in);
            const MilpModel model = build_milp(inst, enumerate_configurations(inst), mimp_opts);
            const Schedule sched = schedule_from_solution(model, load_solution(model, mimp_sol));
            emit(mimp_out, to_json(sched).dump(1) + "\n");
        } else if (*sim) {
            const Instance inst = load_instance(sim_in);
            const Schedule sched = load_schedule(sim_sched);
            const auto truth = GroundTruthModel::planning_model(inst, sim_noise.options());
            emit(sim_out, report_json(simulate(inst, sched, truth)).dump(1) + "\n");
        } else if (*cmp) {
            CompareOptions opts;
            opts.preset = preset_from_string(cmp_preset);
            if (cmp_seeds > 0) opts.preset.seeds = cmp_seeds;
            opts.noise = cmp_noise.options();
            opts.job_guard = cmp_guard;
            opts.parallel = !cmp_serial;
            opts.base_seed = cmp_base;
            const auto rows = run_compare(opts);

            fs::create_directories(cmp_dir);
            const auto reports = report_rows(rows);
            std::vector<double> deviations;
            for (const auto& r : reports) deviations.push_back(r.deviation_pct);
            const auto bins = deviation_histogram(deviations);
            const auto boxes = ratio_boxes(rows);
            const auto runtimes = runtime_rows(rows);
            write_file(fs::path(cmp_dir) / "report.csv", [&](std::ostream& o) { write_report_csv(o, reports); });
            write_file(fs::path(cmp_dir) / "histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, bins); });
            write_file(fs::path(cmp_dir) / "boxplot.csv", [&](std::ostream& o) { write_boxplot_csv(o, boxes); });
            write_file(fs::path(cmp_dir) / "runtime.csv", [&](std::ostream& o) { write_runtime_csv(o, runtimes); });
            std::cout << "instances " << rows.size() << ", csv files in " << cmp_dir << "\n";
            write_boxplot_csv(std::cout, boxes);
        } else if (*est) {
            const Instance inst = load_instance(est_in);
            if (inst.flavor != Flavor::F2) throw InvalidArgument("bandwidth estimation needs an F2 instance");
            const auto oracle = make_corun_oracle(inst.ideal_times(), inst.demands());
            const auto b = estimate_bandwidth(oracle, inst.size(), inst.cores);
            nlohmann::json out = nlohmann::json::array();
            for (const Job& j : inst.jobs)
                out.push_back({{"job", j.id}, {"bus_demand", j.bus_demand}, {"estimate", b[static_cast<std::size_t>(j.id - 1)]}});
            std::cout << out.dump(1) << '\n';
        } else if (*bench) {
            std::vector<RuntimeRow> rows;
            const OrderKind order = order_kind_from_string(bench_order);
            double greedy_total = 0, greedy_max = 0, exact_total = 0, exact_max = 0;
            for (int s = 0; s < bench_count; ++s) {
                const Instance inst = gen_instance(bench_m, bench_cores, order, static_cast<std::uint64_t>(s));
                auto t0 = std::chrono::steady_clock::now();
                greedy_schedule(inst);
                auto t1 = std::chrono::steady_clock::now();
                ExactOptions o;
                o.parallel = bench_parallel;
                exact_makespan(inst, o);
                auto t2 = std::chrono::steady_clock::now();
                const double g = std::chrono::duration<double>(t1 - t0).count();
                const double x = std::chrono::duration<double>(t2 - t1).count();
                greedy_total += g;
                greedy_max = std::max(greedy_max, g);
                exact_total += x;
                exact_max = std::max(exact_max, x);
            }
            rows.push_back({bench_m, bench_cores, bench_order, "greedy", static_cast<std::size_t>(bench_count),
                            greedy_total / bench_count, greedy_max});
            rows.push_back({bench_m, bench_cores, bench_order, "exact", static_cast<std::size_t>(bench_count),
                            exact_total / bench_count, exact_max});
            write_runtime_csv(std::cout, rows);
        }
    } catch (const Error& e) {
        report_error(to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        report_error("internal", e.what());
        return kOther;
    }
    return kOk;
}
