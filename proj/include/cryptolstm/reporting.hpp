#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cryptolstm/market_data.hpp"

namespace cryptolstm {

enum class SeriesRole { History, Actual, Predicted, Loss };

/// green / blue / red / black
std::string_view role_color(SeriesRole role);

struct ChartSeries {
	std::string name;
	SeriesRole role = SeriesRole::Actual;
	std::vector<double> x;
	std::vector<double> y;
};

enum class XAxisKind { Dates, Numeric };

struct ChartSpec {
	std::string title;
	std::string x_label;
	std::string y_label;
	XAxisKind x_kind = XAxisKind::Dates;
	std::vector<ChartSeries> series;
	std::string output_path;
};

/// Days since 1970-01-01, the x coordinate used for date axes.
double day_number(const Date& d);
ChartSeries dated_series(std::string name, SeriesRole role, std::span<const Date> dates, std::span<const double> values);

/// Deterministic SVG 1.1 line chart: one polyline per series, padded
/// linear scales, a legend naming every series.
std::string render_chart(const ChartSpec& spec);

/// Renders and writes to spec.output_path.
void write_chart(const ChartSpec& spec);

/// Single-use phase timer on the monotonic clock; also records the wall
/// clock at start for the report.
class Stopwatch {
public:
	explicit Stopwatch(std::string name) : name_(std::move(name)) {}

	void start();
	void stop();

	const std::string& name() const { return name_; }
	bool finished() const { return stopped_; }
	double elapsed_seconds() const;
	std::chrono::system_clock::time_point started_at() const { return wall_start_; }

private:
	std::string name_;
	bool started_ = false;
	bool stopped_ = false;
	std::chrono::steady_clock::time_point start_{};
	std::chrono::steady_clock::duration elapsed_{};
	std::chrono::system_clock::time_point wall_start_{};
};

struct SystemInfo {
	std::string cpu_cores = "unknown";
	std::string cpu_threads = "unknown";
	std::string cpu_frequency = "unknown";
	std::string mem_total = "unknown";
	std::string mem_available = "unknown";
	std::string mem_used = "unknown";
	std::string mem_percent = "unknown";
	std::string compiler = "unknown";
	std::string uname_processor = "unknown";
	std::string uname_system = "unknown";
	std::string uname_version = "unknown";
};

/// Best effort; anything unreadable stays "unknown".
SystemInfo collect_system_info();

struct PhaseRow {
	std::string name;
	double elapsed_s = 0.0;
	std::string start;
	std::string os;
};

struct BenchmarkReport {
	std::vector<PhaseRow> rows;
	SystemInfo system;
};

/// Rows in the given order. Every timer must have been stopped.
BenchmarkReport benchmark_report(std::span<const Stopwatch> timers, const SystemInfo& system);

/// Aligned plain-text tables: phases (Name/Time/Start/OS) then system attributes.
std::string format_benchmark_table(const BenchmarkReport& report);
std::string format_phase_table(const BenchmarkReport& report);
std::string format_system_table(const SystemInfo& system);
std::string benchmark_json(const BenchmarkReport& report);

} // namespace cryptolstm
