#include "busched/milp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "busched/busmodel.hpp"
#include "busched/error.hpp"

namespace busched {

namespace {

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Accumulates " + 3 x" style tokens into lines of bounded width.
class LineWriter {
public:
    explicit LineWriter(std::ostream& out) : out_(out) {}

    void token(const std::string& text) {
        if (width_ > 0 && width_ + text.size() + 1 > kWidth) {
            out_ << '\n';
            width_ = 0;
        }
        out_ << ' ' << text;
        width_ += text.size() + 1;
    }
    void end_line() {
        out_ << '\n';
        width_ = 0;
    }

private:
    static constexpr std::size_t kWidth = 78;
    std::ostream& out_;
    std::size_t width_ = 0;
};

void write_terms(LineWriter& w, const MilpModel& model, const std::vector<LinearTerm>& terms) {
    bool first = true;
    for (const LinearTerm& term : terms) {
        const double mag = std::abs(term.coef);
        std::string text = term.coef < 0.0 ? "- " : (first ? "" : "+ ");
        if (mag != 1.0) text += format_number(mag) + " ";
        text += model.variables()[term.var].name;
        w.token(text);
        first = false;
    }
    if (terms.empty()) w.token("0 " + model.variables().front().name);
}

const char* sense_token(RowSense s) {
    switch (s) {
    case RowSense::LessEqual:
        return "<=";
    case RowSense::Equal:
        return "=";
    case RowSense::GreaterEqual:
        return ">=";
    }
    return "=";
}

bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) <= tol; }

} // namespace

std::size_t MilpModel::count(VarKind kind) const {
    std::size_t n = 0;
    for (const auto& v : vars_) n += v.kind == kind;
    return n;
}

std::size_t MilpModel::variable_index(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return i;
    throw ParseError("unknown variable '" + name + "'");
}

MilpModel build_milp(const Instance& inst, const ConfigSpace& space, const MilpOptions& options) {
    validate(inst);
    const int m = inst.size();
    const int e = options.event_points > 0 ? options.event_points : 2 * m;
    const std::size_t K = space.size();
    const std::size_t points = static_cast<std::size_t>(e) + 1;
    if (points * K > options.variable_cap)
        throw CapacityError("model needs " + std::to_string(points * K) + " duration variables, above the cap of " +
                            std::to_string(options.variable_cap));

    const SpeedTable table = resolve_speed_table(inst, space);
    const auto ideal = inst.ideal_times();

    MilpModel model;
    model.jobs_ = m;
    model.cores_ = inst.cores;
    model.e_ = e;
    model.literal_order_ = options.literal_order;
    model.configs_ = space.configs();
    for (double s : ideal) model.t_max_ += s;
    const double T = model.t_max_;

    auto name_nk = [](const char* prefix, int n, std::size_t k) {
        return std::string(prefix) + "_" + std::to_string(n) + "_" + std::to_string(k);
    };
    for (int n = 0; n <= e; ++n)
        for (std::size_t k = 0; k < K; ++k) model.vars_.push_back({name_nk("t", n, k), VarKind::Continuous, 0.0, 0.0, false});
    for (int n = 0; n <= e; ++n)
        for (std::size_t k = 0; k < K; ++k) {
            // Event point 0 runs the zero configuration.
            const double fixed = (n == 0) ? (k == 0 ? 1.0 : 0.0) : -1.0;
            model.vars_.push_back({name_nk("d", n, k), VarKind::Binary, fixed < 0 ? 0.0 : fixed, fixed < 0 ? 1.0 : fixed, true});
        }
    for (JobId p = 1; p <= m; ++p)
        for (int n = 0; n <= e; ++n) model.vars_.push_back({name_nk("y", p, n), VarKind::Binary, 0.0, 1.0, true});

    for (int n = 0; n <= e; ++n)
        for (std::size_t k = 0; k < K; ++k) model.objective_.push_back({model.t(n, k), 1.0});

    auto& rows = model.rows_;
    for (int n = 0; n <= e; ++n)
        for (std::size_t k = 0; k < K; ++k)
            rows.push_back({name_nk("dur", n, k), {{model.t(n, k), 1.0}, {model.d(n, k), -T}}, RowSense::LessEqual, 0.0});

    for (int n = 0; n <= e; ++n) {
        MilpConstraint row{"one_" + std::to_string(n), {}, RowSense::Equal, 1.0};
        for (std::size_t k = 0; k < K; ++k) row.terms.push_back({model.d(n, k), 1.0});
        rows.push_back(std::move(row));
    }

    for (JobId p = 1; p <= m; ++p) {
        MilpConstraint row{"work_" + std::to_string(p), {}, RowSense::Equal, ideal[static_cast<std::size_t>(p - 1)]};
        for (int n = 0; n <= e; ++n)
            for (std::size_t k = 1; k < K; ++k)
                if (space.member(p, k)) row.terms.push_back({model.t(n, k), table.speed(p, space[k])});
        rows.push_back(std::move(row));
    }

    for (JobId p = 1; p <= m; ++p)
        for (int n = 0; n <= e; ++n) {
            MilpConstraint row{name_nk("start", n, static_cast<std::size_t>(p)), {}, RowSense::LessEqual, 0.0};
            for (std::size_t k = 1; k < K; ++k)
                if (space.member(p, k)) row.terms.push_back({model.d(n, k), 1.0});
            if (n > 0)
                for (std::size_t k = 1; k < K; ++k)
                    if (space.member(p, k)) row.terms.push_back({model.d(n - 1, k), -1.0});
            row.terms.push_back({model.y(p, n), -1.0});
            rows.push_back(std::move(row));
        }

    for (JobId p = 1; p <= m; ++p) {
        MilpConstraint row{"once_" + std::to_string(p), {}, RowSense::Equal, 1.0};
        for (int n = 0; n <= e; ++n) row.terms.push_back({model.y(p, n), 1.0});
        rows.push_back(std::move(row));
    }

    // k1 after k2: k1 may not run at or before any point where k2 runs.
    for (std::size_t k1 = 1; k1 < K; ++k1)
        for (std::size_t k2 = 1; k2 < K; ++k2) {
            if (!space.after(k1, k2)) continue;
            const std::string base = "order_" + std::to_string(k1) + "_" + std::to_string(k2) + "_";
            if (!options.literal_order) {
                for (int n1 = 1; n1 <= e; ++n1)
                    for (int n2 = 1; n2 <= n1; ++n2)
                        rows.push_back({base + std::to_string(n1) + "_" + std::to_string(n2),
                                        {{model.d(n1, k2), 1.0}, {model.d(n2, k1), 1.0}},
                                        RowSense::LessEqual,
                                        1.0});
                continue;
            }
            for (int n1 = 0; n1 <= e; ++n1)
                for (int n2 = 0; n2 <= e; ++n2) {
                    MilpConstraint row{base + std::to_string(n1) + "_" + std::to_string(n2), {}, RowSense::LessEqual,
                                       static_cast<double>(e) * n2};
                    row.terms.push_back({model.d(n1, k2), static_cast<double>(n1 + 1)});
                    const double c2 = static_cast<double>(n2) * (e - 1);
                    if (c2 != 0.0) row.terms.push_back({model.d(n2, k1), c2});
                    rows.push_back(std::move(row));
                }
        }
    return model;
}

void write_lp(const MilpModel& model, std::ostream& out) {
    out << "\\ event-point scheduling model\n";
    out << "\\ jobs " << model.jobs() << ", cores " << model.cores() << ", configurations " << model.configs().size()
        << ", event points 0.." << model.event_points() << "\n";
    out << "\\ t_n_k: duration of configuration k at event point n; d_n_k: configuration k runs at n;\n";
    out << "\\ y_p_n: job p starts at n. Configuration indices are listed in the metadata file.\n";
    out << "\\ ordering constraints: " << (model.literal_order() ? "literal big-M form" : "pairwise conflicts") << "\n";
    out << "Minimize\n";
    LineWriter w(out);
    w.token("obj:");
    write_terms(w, model, model.objective());
    w.end_line();
    out << "Subject To\n";
    for (const MilpConstraint& row : model.constraints()) {
        w.token(row.name + ":");
        write_terms(w, model, row.terms);
        w.token(sense_token(row.sense));
        w.token(format_number(row.rhs));
        w.end_line();
    }
    out << "Bounds\n";
    for (const MilpVariable& v : model.variables()) {
        if (v.kind == VarKind::Binary && v.lower == v.upper) out << ' ' << v.name << " = " << format_number(v.lower) << '\n';
    }
    out << "Binaries\n";
    for (const MilpVariable& v : model.variables())
        if (v.kind == VarKind::Binary) w.token(v.name);
    w.end_line();
    out << "End\n";
}

void export_lp(const MilpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_lp(model, out);
    if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::json milp_metadata(const MilpModel& model) {
    nlohmann::json configs = nlohmann::json::array();
    for (const Configuration& c : model.configs()) configs.push_back(c.jobs());
    nlohmann::json vars = nlohmann::json::array();
    const std::size_t K = model.configs().size();
    for (int n = 0; n <= model.event_points(); ++n)
        for (std::size_t k = 0; k < K; ++k)
            vars.push_back({{"name", model.variables()[model.t(n, k)].name}, {"kind", "t"}, {"n", n}, {"k", k},
                            {"jobs", model.configs()[k].jobs()}});
    for (int n = 0; n <= model.event_points(); ++n)
        for (std::size_t k = 0; k < K; ++k)
            vars.push_back({{"name", model.variables()[model.d(n, k)].name}, {"kind", "d"}, {"n", n}, {"k", k},
                            {"jobs", model.configs()[k].jobs()}});
    for (JobId p = 1; p <= model.jobs(); ++p)
        for (int n = 0; n <= model.event_points(); ++n)
            vars.push_back({{"name", model.variables()[model.y(p, n)].name}, {"kind", "y"}, {"n", n}, {"job", p}});
    return {{"version", 1},
            {"jobs", model.jobs()},
            {"cores", model.cores()},
            {"event_points", model.event_points()},
            {"t_max", model.t_max()},
            {"literal_order", model.literal_order()},
            {"configurations", configs},
            {"variables", vars}};
}

void export_metadata(const MilpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << milp_metadata(model).dump(1) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

MilpSolution parse_solution(const MilpModel& model, std::istream& in) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < model.variables().size(); ++i) index.emplace(model.variables()[i].name, i);

    MilpSolution sol;
    sol.values.assign(model.variables().size(), 0.0);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string name;
        if (!(fields >> name) || name.front() == '#') continue;
        double value = 0.0;
        std::string extra;
        if (!(fields >> value) || (fields >> extra))
            throw ParseError("solution line " + std::to_string(line_no) + ": expected '<name> <value>'");
        auto it = index.find(name);
        if (it == index.end()) throw ParseError("solution line " + std::to_string(line_no) + ": unknown variable '" + name + "'");
        sol.values[it->second] = value;
    }
    for (const LinearTerm& term : model.objective()) sol.objective += term.coef * sol.values[term.var];
    return sol;
}

MilpSolution load_solution(const MilpModel& model, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    return parse_solution(model, in);
}

std::vector<std::string> solution_violations(const MilpModel& model, const MilpSolution& sol, double tol) {
    std::vector<std::string> out;
    const auto& vars = model.variables();
    if (sol.values.size() != vars.size()) {
        out.push_back("solution has " + std::to_string(sol.values.size()) + " values for " + std::to_string(vars.size()) +
                      " variables");
        return out;
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const double x = sol.values[i];
        if (x < vars[i].lower - tol) out.push_back(vars[i].name + " = " + format_number(x) + " below its lower bound");
        if (vars[i].bounded_above && x > vars[i].upper + tol)
            out.push_back(vars[i].name + " = " + format_number(x) + " above its upper bound");
        if (vars[i].kind == VarKind::Binary && !near_integer(x, tol))
            out.push_back(vars[i].name + " = " + format_number(x) + " is not integral");
    }
    for (const MilpConstraint& row : model.constraints()) {
        double lhs = 0.0;
        for (const LinearTerm& term : row.terms) lhs += term.coef * sol.values[term.var];
        const double slack = tol * std::max(1.0, std::abs(row.rhs));
        const bool ok = row.sense == RowSense::LessEqual   ? lhs <= row.rhs + slack
                        : row.sense == RowSense::Equal     ? std::abs(lhs - row.rhs) <= slack
                                                           : lhs >= row.rhs - slack;
        if (!ok)
            out.push_back(row.name + ": lhs " + format_number(lhs) + " " + sense_token(row.sense) + " " + format_number(row.rhs) +
                          " violated");
    }
    double total = 0.0;
    for (const LinearTerm& term : model.objective()) total += term.coef * sol.values[term.var];
    if (std::abs(total - sol.objective) > tol * std::max(1.0, std::abs(total)))
        out.push_back("objective " + format_number(sol.objective) + " differs from the duration sum " + format_number(total));
    return out;
}

Schedule schedule_from_solution(const MilpModel& model, const MilpSolution& sol, double tol) {
    const auto& vars = model.variables();
    if (sol.values.size() != vars.size()) throw ValidationError("solution size does not match the model");
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].kind == VarKind::Binary && !near_integer(sol.values[i], tol))
            throw ValidationError(vars[i].name + " = " + format_number(sol.values[i]) + " is not integral");

    const std::size_t K = model.configs().size();
    const int e = model.event_points();
    std::vector<std::size_t> chosen(static_cast<std::size_t>(e) + 1);
    std::vector<double> duration(static_cast<std::size_t>(e) + 1);
    for (int n = 0; n <= e; ++n) {
        std::size_t picks = 0;
        for (std::size_t k = 0; k < K; ++k)
            if (sol.values[model.d(n, k)] > 0.5) {
                chosen[static_cast<std::size_t>(n)] = k;
                ++picks;
            }
        if (picks != 1)
            throw ValidationError("event point " + std::to_string(n) + " runs " + std::to_string(picks) + " configurations");
        for (std::size_t k = 0; k < K; ++k) {
            const double t = sol.values[model.t(n, k)];
            if (k != chosen[static_cast<std::size_t>(n)] && t > tol)
                throw ValidationError(vars[model.t(n, k)].name + " is positive but its configuration is not selected");
        }
        duration[static_cast<std::size_t>(n)] = sol.values[model.t(n, chosen[static_cast<std::size_t>(n)])];
    }

    for (JobId p = 1; p <= model.jobs(); ++p) {
        int runs = 0;
        bool present_before = false;
        for (int n = 0; n <= e; ++n) {
            const bool present = model.configs()[chosen[static_cast<std::size_t>(n)]].contains(p);
            if (present && !present_before) ++runs;
            present_before = present;
        }
        if (runs != 1)
            throw ValidationError("job " + std::to_string(p) + (runs == 0 ? " never runs" : " runs at non-contiguous event points"));
    }

    std::vector<Step> steps;
    for (int n = 0; n <= e; ++n) {
        const double t = duration[static_cast<std::size_t>(n)];
        if (t <= tol) continue;
        const Configuration& config = model.configs()[chosen[static_cast<std::size_t>(n)]];
        if (config.empty())
            throw ValidationError("event point " + std::to_string(n) + " idles for " + format_number(t) +
                                  "; idle time is not representable in a schedule");
        if (!steps.empty() && steps.back().config == config) {
            steps.back().duration += t;
            continue;
        }
        steps.push_back({config, t});
    }
    Schedule sched = make_schedule(std::move(steps), model.cores());
    if (std::abs(sched.makespan - sol.objective) > tol * std::max(1.0, std::abs(sol.objective)))
        throw ValidationError("schedule makespan " + format_number(sched.makespan) + " differs from the objective " +
                              format_number(sol.objective));
    return sched;
}

MilpSolution solution_from_sequence(const MilpModel& model, const ConfigSpace& space, const ConfigSequence& seq,
                                    std::span<const double> durations) {
    const int e = model.event_points();
    if (seq.size() != durations.size()) throw InvalidArgument("sequence and durations differ in length");
    if (static_cast<int>(seq.size()) > e)
        throw InvalidArgument("sequence of length " + std::to_string(seq.size()) + " does not fit in " + std::to_string(e) +
                              " event points");
    if (space.size() != model.configs().size()) throw InvalidArgument("configuration space does not match the model");

    MilpSolution sol;
    sol.values.assign(model.variables().size(), 0.0);
    std::vector<std::size_t> at(static_cast<std::size_t>(e) + 1, 0);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        at[i + 1] = seq[i];
        sol.values[model.t(static_cast<int>(i) + 1, seq[i])] = durations[i];
    }
    for (int n = 0; n <= e; ++n) sol.values[model.d(n, at[static_cast<std::size_t>(n)])] = 1.0;
    for (JobId p = 1; p <= model.jobs(); ++p)
        for (int n = 1; n <= e; ++n)
            if (space.member(p, at[static_cast<std::size_t>(n)]) && !space.member(p, at[static_cast<std::size_t>(n) - 1])) {
                sol.values[model.y(p, n)] = 1.0;
                break;
            }
    for (const LinearTerm& term : model.objective()) sol.objective += term.coef * sol.values[term.var];
    return sol;
}

} // namespace busched
