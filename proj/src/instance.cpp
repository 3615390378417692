#include "busched/instance.hpp"

#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include "busched/error.hpp"
#include "busched/rng.hpp"

namespace busched {

using nlohmann::json;

const char* to_string(Flavor flavor) { return flavor == Flavor::F1 ? "F1" : "F2"; }

Flavor flavor_from_string(const std::string& text) {
    if (text == "F1") return Flavor::F1;
    if (text == "F2") return Flavor::F2;
    throw InvalidArgument("unknown flavor '" + text + "' (expected F1 or F2)");
}

std::string Configuration::str() const {
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < jobs_.size(); ++i) out << (i ? "," : "") << jobs_[i];
    out << '}';
    return out.str();
}

PrecedenceDag::PrecedenceDag(int m, std::vector<Edge> e) : jobs(m), edges(std::move(e)) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

std::vector<JobId> PrecedenceDag::predecessors(JobId q) const {
    std::vector<JobId> out;
    for (const Edge& e : edges)
        if (e.succ == q) out.push_back(e.pred);
    return out;
}

std::vector<JobId> PrecedenceDag::successors(JobId p) const {
    std::vector<JobId> out;
    for (const Edge& e : edges)
        if (e.pred == p) out.push_back(e.succ);
    return out;
}

std::optional<std::vector<JobId>> topological_order(const PrecedenceDag& dag) {
    const auto m = static_cast<std::size_t>(dag.jobs);
    std::vector<int> indegree(m + 1, 0);
    std::vector<std::vector<JobId>> out(m + 1);
    for (const Edge& e : dag.edges) {
        out[static_cast<std::size_t>(e.pred)].push_back(e.succ);
        ++indegree[static_cast<std::size_t>(e.succ)];
    }
    // Min-heap keeps the order deterministic (smallest ready id first).
    std::priority_queue<JobId, std::vector<JobId>, std::greater<>> ready;
    for (JobId p = 1; p <= dag.jobs; ++p)
        if (indegree[static_cast<std::size_t>(p)] == 0) ready.push(p);
    std::vector<JobId> order;
    while (!ready.empty()) {
        JobId p = ready.top();
        ready.pop();
        order.push_back(p);
        for (JobId q : out[static_cast<std::size_t>(p)])
            if (--indegree[static_cast<std::size_t>(q)] == 0) ready.push(q);
    }
    if (order.size() != m) return std::nullopt;
    return order;
}

TransitiveClosure::TransitiveClosure(const PrecedenceDag& dag)
    : m_(dag.jobs), reach_(static_cast<std::size_t>(dag.jobs) * static_cast<std::size_t>(dag.jobs), 0) {
    auto order = topological_order(dag);
    if (!order) throw ValidationError("precedence graph contains a cycle");
    // Reverse topological sweep: reach(p) = succ(p) ∪ reach(succ(p)).
    for (auto it = order->rbegin(); it != order->rend(); ++it) {
        JobId p = *it;
        for (JobId q : dag.successors(p)) {
            reach_[index(p, q)] = 1;
            for (JobId r = 1; r <= m_; ++r)
                if (reach_[index(q, r)]) reach_[index(p, r)] = 1;
        }
    }
}

void SpeedTable::set(const Configuration& config, std::vector<double> speeds) {
    if (speeds.size() != config.size())
        throw InvalidArgument("speed vector size does not match configuration " + config.str());
    entries_[config] = std::move(speeds);
}

double SpeedTable::speed(JobId p, const Configuration& config) const {
    int pos = config.position(p);
    if (pos < 0) return 0.0;
    const auto* speeds = find(config);
    if (!speeds) throw ModelCoverageError("speed table has no entry for configuration " + config.str());
    return (*speeds)[static_cast<std::size_t>(pos)];
}

const std::vector<double>* SpeedTable::find(const Configuration& config) const {
    auto it = entries_.find(config);
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<double> Instance::ideal_times() const {
    std::vector<double> out;
    out.reserve(jobs.size());
    for (const Job& j : jobs) out.push_back(j.ideal_time);
    return out;
}

std::vector<double> Instance::demands() const {
    std::vector<double> out;
    out.reserve(jobs.size());
    for (const Job& j : jobs) out.push_back(j.bus_demand);
    return out;
}

void validate(const Instance& inst) {
    const int m = inst.size();
    if (m < 1) throw ValidationError("instance has no jobs");
    if (inst.cores < 1) throw ValidationError("cores must be >= 1");
    for (int i = 0; i < m; ++i) {
        const Job& j = inst.jobs[static_cast<std::size_t>(i)];
        if (j.id != i + 1) throw ValidationError("job ids must be 1..m in order; found " + std::to_string(j.id));
        if (!(j.ideal_time > 0.0) || !std::isfinite(j.ideal_time))
            throw ValidationError("job " + std::to_string(j.id) + ": ideal_time must be > 0");
        if (!(j.bus_demand >= 0.0 && j.bus_demand <= 100.0))
            throw ValidationError("job " + std::to_string(j.id) + ": bus_demand must be in [0, 100]");
    }
    if (inst.dag.jobs != m) throw ValidationError("precedence graph size does not match job count");
    for (const Edge& e : inst.dag.edges) {
        if (e.pred < 1 || e.pred > m || e.succ < 1 || e.succ > m)
            throw ValidationError("edge (" + std::to_string(e.pred) + "," + std::to_string(e.succ) +
                                  ") references an unknown job");
        if (e.pred == e.succ) throw ValidationError("self-loop on job " + std::to_string(e.pred));
    }
    if (!topological_order(inst.dag)) throw ValidationError("precedence graph contains a cycle");

    if (inst.flavor == Flavor::F1) {
        if (!inst.speed_table) throw ValidationError("F1 instance requires a speed_table");
        TransitiveClosure closure(inst.dag);
        for (const auto& [config, speeds] : *inst.speed_table) {
            if (config.empty()) throw ValidationError("speed_table entry for the zero configuration");
            if (static_cast<int>(config.size()) > inst.cores)
                throw ValidationError("speed_table entry " + config.str() + " exceeds the core count");
            for (JobId p : config) {
                if (p < 1 || p > m) throw ValidationError("speed_table entry " + config.str() + " has unknown job");
                for (JobId q : config)
                    if (closure.precedes(p, q))
                        throw ValidationError("speed_table entry " + config.str() + " is not an antichain");
            }
            for (double v : speeds)
                if (!(v > 0.0 && v <= 1.0))
                    throw ValidationError("speed_table entry " + config.str() + " has speed outside (0, 1]");
            if (config.size() == 1 && speeds[0] != 1.0)
                throw ValidationError("singleton configuration " + config.str() + " must have speed 1");
        }
    } else if (inst.speed_table) {
        throw ValidationError("F2 instance must not carry a speed_table");
    }
}

const char* to_string(OrderKind kind) {
    switch (kind) {
    case OrderKind::Trivial: return "trivial";
    case OrderKind::Random: return "random";
    case OrderKind::Bitree: return "bitree";
    case OrderKind::OneToManyToOne: return "one_to_many_to_one";
    }
    return "?";
}

OrderKind order_kind_from_string(const std::string& text) {
    if (text == "trivial") return OrderKind::Trivial;
    if (text == "random") return OrderKind::Random;
    if (text == "bitree") return OrderKind::Bitree;
    if (text == "one_to_many_to_one" || text == "one-to-many-to-one") return OrderKind::OneToManyToOne;
    throw InvalidArgument("unknown order kind '" + text + "'");
}

PrecedenceDag gen_partial_order(OrderKind kind, int m, std::uint64_t seed) {
    if (m < 1) throw InvalidArgument("partial order needs m >= 1");
    std::vector<Edge> edges;
    switch (kind) {
    case OrderKind::Trivial: break;
    case OrderKind::Random: {
        // Each pair (p1, p2) with p1 > p2: with probability 1/2, p1 runs after p2.
        Rng rng(seed);
        for (JobId p1 = 2; p1 <= m; ++p1)
            for (JobId p2 = 1; p2 < p1; ++p2)
                if (rng.coin()) edges.push_back({p2, p1});
        break;
    }
    case OrderKind::Bitree:
        for (JobId i = 2; i <= m; ++i) edges.push_back({i / 2, i});
        break;
    case OrderKind::OneToManyToOne:
        if (m < 3) throw InvalidArgument("one_to_many_to_one needs m >= 3");
        for (JobId i = 2; i < m; ++i) {
            edges.push_back({1, i});
            edges.push_back({i, m});
        }
        break;
    }
    return PrecedenceDag(m, std::move(edges));
}

Instance gen_instance(int m, int cores, OrderKind order, std::uint64_t seed, const GenerateOptions& options) {
    if (m < 1) throw InvalidArgument("m must be >= 1");
    if (cores < 1) throw InvalidArgument("cores must be >= 1");
    const Range& t = options.time_range;
    const Range& b = options.demand_range;
    if (!(t.lo <= t.hi) || !(t.lo > 0.0)) throw InvalidArgument("time range must satisfy 0 < lo <= hi");
    if (!(b.lo <= b.hi) || b.lo < 0.0 || b.hi > 100.0)
        throw InvalidArgument("demand range must satisfy 0 <= lo <= hi <= 100");

    Instance inst;
    inst.cores = cores;
    inst.flavor = Flavor::F2;
    inst.dag = gen_partial_order(order, m, seed);
    // Separate stream from the order generator so that changing the order
    // kind leaves job data untouched.
    Rng rng(mix64(seed ^ 0x6a6f62732d646174ULL));
    inst.jobs.reserve(static_cast<std::size_t>(m));
    for (JobId p = 1; p <= m; ++p) {
        double ideal = rng.uniform(t.lo, t.hi);
        double demand = rng.uniform(b.lo, b.hi);
        inst.jobs.push_back({p, ideal, demand});
    }
    return inst;
}

nlohmann::json to_json(const Instance& inst) {
    json doc;
    doc["version"] = kInstanceFormatVersion;
    doc["m"] = inst.size();
    doc["cores"] = inst.cores;
    doc["flavor"] = to_string(inst.flavor);
    json jobs = json::array();
    for (const Job& j : inst.jobs) jobs.push_back({{"id", j.id}, {"ideal_time", j.ideal_time}, {"bus_demand", j.bus_demand}});
    doc["jobs"] = std::move(jobs);
    json edges = json::array();
    for (const Edge& e : inst.dag.edges) edges.push_back({e.pred, e.succ});
    doc["edges"] = std::move(edges);
    if (inst.speed_table) {
        json table = json::array();
        for (const auto& [config, speeds] : *inst.speed_table)
            table.push_back({{"jobs", config.jobs()}, {"speeds", speeds}});
        doc["speed_table"] = std::move(table);
    }
    return doc;
}

namespace {

const json& require(const json& obj, const char* field, const std::string& where) {
    if (!obj.is_object() || !obj.contains(field)) throw ParseError(where + ": missing required field '" + field + "'");
    return obj.at(field);
}

template <class T>
T get_as(const json& value, const std::string& where) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw ParseError(where + ": wrong type");
    }
}

} // namespace

Instance instance_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("instance: top level must be an object");
    int version = get_as<int>(require(doc, "version", "instance"), "field 'version'");
    if (version != kInstanceFormatVersion) throw ParseError("field 'version': unsupported version " + std::to_string(version));

    Instance inst;
    int m = get_as<int>(require(doc, "m", "instance"), "field 'm'");
    inst.cores = get_as<int>(require(doc, "cores", "instance"), "field 'cores'");
    inst.flavor = flavor_from_string(get_as<std::string>(require(doc, "flavor", "instance"), "field 'flavor'"));

    const json& jobs = require(doc, "jobs", "instance");
    if (!jobs.is_array()) throw ParseError("field 'jobs': must be an array");
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        std::string where = "jobs[" + std::to_string(i) + "]";
        Job j;
        j.id = get_as<int>(require(jobs[i], "id", where), where + ".id");
        j.ideal_time = get_as<double>(require(jobs[i], "ideal_time", where), where + ".ideal_time");
        j.bus_demand = get_as<double>(require(jobs[i], "bus_demand", where), where + ".bus_demand");
        inst.jobs.push_back(j);
    }
    if (static_cast<int>(inst.jobs.size()) != m) throw ParseError("field 'm': does not match the number of jobs");

    const json& edges = require(doc, "edges", "instance");
    if (!edges.is_array()) throw ParseError("field 'edges': must be an array");
    std::vector<Edge> list;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const json& e = edges[i];
        if (!e.is_array() || e.size() != 2) throw ParseError("edges[" + std::to_string(i) + "]: must be [pred, succ]");
        list.push_back({get_as<int>(e[0], "edges[" + std::to_string(i) + "]"), get_as<int>(e[1], "edges[" + std::to_string(i) + "]")});
    }
    inst.dag = PrecedenceDag(m, std::move(list));

    if (doc.contains("speed_table")) {
        const json& table = doc.at("speed_table");
        if (!table.is_array()) throw ParseError("field 'speed_table': must be an array");
        SpeedTable speeds;
        for (std::size_t i = 0; i < table.size(); ++i) {
            std::string where = "speed_table[" + std::to_string(i) + "]";
            auto ids = get_as<std::vector<int>>(require(table[i], "jobs", where), where + ".jobs");
            auto v = get_as<std::vector<double>>(require(table[i], "speeds", where), where + ".speeds");
            Configuration config(ids);
            if (config.size() != ids.size()) throw ParseError(where + ".jobs: duplicate job id");
            if (!std::is_sorted(ids.begin(), ids.end())) throw ParseError(where + ".jobs: ids must be sorted");
            if (v.size() != ids.size()) throw ParseError(where + ".speeds: length does not match jobs");
            if (speeds.find(config)) throw ParseError(where + ": duplicate configuration " + config.str());
            speeds.set(config, std::move(v));
        }
        inst.speed_table = std::move(speeds);
    }
    validate(inst);
    return inst;
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << to_json(inst).dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return instance_from_json(doc);
}

} // namespace busched
