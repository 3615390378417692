#include "busched/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "busched/error.hpp"

namespace busched {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double interpolate(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void header(std::ostream& out, const char* kind, const char* columns) {
    out << "# " << kind << " v" << kCsvSchemaVersion << '\n' << columns << '\n';
}

} // namespace

std::vector<HistogramBin> deviation_histogram(std::span<const double> deviation_pct) {
    if (deviation_pct.empty()) throw InvalidArgument("histogram needs at least one deviation");
    double largest = 0.0;
    for (double d : deviation_pct) largest = std::max(largest, std::abs(d));
    const auto bins = static_cast<std::size_t>(std::floor(largest)) + 1;
    std::vector<HistogramBin> out(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        out[i].lo = static_cast<double>(i);
        out[i].hi = static_cast<double>(i + 1);
    }
    for (double d : deviation_pct) ++out[static_cast<std::size_t>(std::floor(std::abs(d)))].count;
    for (auto& b : out) b.pct = 100.0 * static_cast<double>(b.count) / static_cast<double>(deviation_pct.size());
    return out;
}

BoxSummary box_summary(std::span<const double> values) {
    if (values.empty()) throw InvalidArgument("box summary needs at least one value");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return {sorted.size(),          sorted.front(), interpolate(sorted, 0.25), interpolate(sorted, 0.5),
            interpolate(sorted, 0.75), sorted.back()};
}

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows) {
    header(out, "report", "instance_id,solver,planned,measured,deviation_pct");
    for (const auto& r : rows)
        out << r.instance_id << ',' << r.solver << ',' << num(r.planned) << ',' << num(r.measured) << ','
            << num(r.deviation_pct) << '\n';
}

void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins) {
    header(out, "histogram", "bin_lo,bin_hi,count,pct");
    for (const auto& b : bins) out << num(b.lo) << ',' << num(b.hi) << ',' << b.count << ',' << num(b.pct) << '\n';
}

void write_boxplot_csv(std::ostream& out, std::span<const BoxRow> rows) {
    header(out, "boxplot", "m,min,q1,median,q3,max");
    for (const auto& r : rows)
        out << r.m << ',' << num(r.box.min) << ',' << num(r.box.q1) << ',' << num(r.box.median) << ',' << num(r.box.q3) << ','
            << num(r.box.max) << '\n';
}

void write_runtime_csv(std::ostream& out, std::span<const RuntimeRow> rows) {
    header(out, "runtime", "m,cores,order,solver,instances,mean_s,max_s");
    for (const auto& r : rows)
        out << r.m << ',' << r.cores << ',' << r.order << ',' << r.solver << ',' << r.instances << ',' << num(r.mean_seconds)
            << ',' << num(r.max_seconds) << '\n';
}

} // namespace busched
