#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace busched {

inline constexpr int kCsvSchemaVersion = 1;

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double pct = 0.0;
};

// 1%-wide bins of |deviation|, from [0, 1) up to the bin holding the
// largest value. Throws InvalidArgument on empty input.
std::vector<HistogramBin> deviation_histogram(std::span<const double> deviation_pct);

struct BoxSummary {
    std::size_t count = 0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

// Quartiles by linear interpolation between order statistics. Throws
// InvalidArgument on empty input.
BoxSummary box_summary(std::span<const double> values);

struct ReportRow {
    std::string instance_id;
    std::string solver;
    double planned = 0.0;
    double measured = 0.0;
    double deviation_pct = 0.0;
};

struct BoxRow {
    int m = 0;
    BoxSummary box;
};

struct RuntimeRow {
    int m = 0;
    int cores = 0;
    std::string order;
    std::string solver;
    std::size_t instances = 0;
    double mean_seconds = 0.0;
    double max_seconds = 0.0;
};

// Each writer emits a "# <kind> v<version>" line, a header, then rows.
void write_report_csv(std::ostream& out, std::span<const ReportRow> rows);
void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins);
void write_boxplot_csv(std::ostream& out, std::span<const BoxRow> rows);
void write_runtime_csv(std::ostream& out, std::span<const RuntimeRow> rows);

} // namespace busched
