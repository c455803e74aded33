#include "cryptolstm/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <sys/utsname.h>

#include <json.hpp>

#include "cryptolstm/error.hpp"

namespace cryptolstm {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;
constexpr int kTicks = 5;

std::string xml_escape(std::string_view s) {
	std::string out;
	out.reserve(s.size());
	for (char ch : s) {
		switch (ch) {
		case '&': out += "&amp;"; break;
		case '<': out += "&lt;"; break;
		case '>': out += "&gt;"; break;
		case '"': out += "&quot;"; break;
		case '\'': out += "&apos;"; break;
		default: out += ch;
		}
	}
	return out;
}

std::string fmt(const char* format, double v) {
	char buf[64];
	std::snprintf(buf, sizeof(buf), format, v);
	return buf;
}

struct Range {
	double lo = std::numeric_limits<double>::infinity();
	double hi = -std::numeric_limits<double>::infinity();

	void add(double v) {
		lo = std::min(lo, v);
		hi = std::max(hi, v);
	}
	void pad(double fraction) {
		const double span = hi - lo;
		const double p = span > 0.0 ? span * fraction : std::max(std::abs(lo) * 0.05, 1.0);
		lo -= p;
		hi += p;
	}
};

std::string x_tick_label(double x, XAxisKind kind) {
	if (kind == XAxisKind::Dates) {
		const auto day = std::chrono::sys_days{std::chrono::days{static_cast<int>(std::lround(x))}};
		return format_date(Date{day});
	}
	return fmt("%g", std::round(x * 100.0) / 100.0);
}

std::string read_file(const char* path) {
	std::ifstream in(path);
	if (!in) return {};
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

std::string gib(double kib) { return fmt("%.1f GiB", kib / (1024.0 * 1024.0)); }

std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
	const std::time_t t = std::chrono::system_clock::to_time_t(tp);
	std::tm tm{};
	gmtime_r(&t, &tm);
	char buf[32];
	std::strftime(buf, sizeof(buf), "%Y-%m-%d %H:%M:%S", &tm);
	return buf;
}

} // namespace

std::string_view role_color(SeriesRole role) {
	switch (role) {
	case SeriesRole::History: return "green";
	case SeriesRole::Actual: return "blue";
	case SeriesRole::Predicted: return "red";
	case SeriesRole::Loss: return "black";
	}
	return "gray";
}

double day_number(const Date& d) {
	return static_cast<double>(std::chrono::sys_days{d}.time_since_epoch().count());
}

ChartSeries dated_series(std::string name, SeriesRole role, std::span<const Date> dates, std::span<const double> values) {
	if (dates.size() != values.size()) throw Error(ErrorCode::LengthMismatch, "series dates vs values");
	ChartSeries s{std::move(name), role, {}, std::vector<double>(values.begin(), values.end())};
	s.x.reserve(dates.size());
	for (const auto& d : dates) s.x.push_back(day_number(d));
	return s;
}

std::string render_chart(const ChartSpec& spec) {
	if (spec.series.empty()) throw Error(ErrorCode::EmptyChart, "chart '" + spec.title + "' has no series");
	Range xr, yr;
	for (const auto& s : spec.series) {
		if (s.x.empty()) throw Error(ErrorCode::EmptyChart, "series '" + s.name + "' has no points");
		if (s.x.size() != s.y.size()) throw Error(ErrorCode::LengthMismatch, "series '" + s.name + "' x vs y");
		for (std::size_t k = 0; k < s.x.size(); ++k) {
			if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) {
				throw Error(ErrorCode::InvalidArgument, "series '" + s.name + "' has a non-finite point");
			}
			xr.add(s.x[k]);
			yr.add(s.y[k]);
		}
	}
	if (xr.hi == xr.lo) xr.pad(0.0);
	yr.pad(0.05);

	const double plot_w = kWidth - kLeft - kRight;
	const double plot_h = kHeight - kTop - kBottom;
	const auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
	const auto sy = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

	std::string svg;
	svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
	svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"960\" height=\"540\" "
	       "viewBox=\"0 0 960 540\" font-family=\"sans-serif\" font-size=\"12\">\n";
	svg += "<rect x=\"0\" y=\"0\" width=\"960\" height=\"540\" fill=\"white\"/>\n";
	svg += "<text x=\"" + fmt("%.2f", kLeft + plot_w / 2) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" +
		xml_escape(spec.title) + "</text>\n";

	svg += "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
	for (int k = 0; k <= kTicks; ++k) {
		const double y = kTop + plot_h * k / kTicks;
		const double x = kLeft + plot_w * k / kTicks;
		svg += "<line x1=\"" + fmt("%.2f", kLeft) + "\" y1=\"" + fmt("%.2f", y) + "\" x2=\"" + fmt("%.2f", kLeft + plot_w) +
			"\" y2=\"" + fmt("%.2f", y) + "\"/>\n";
		svg += "<line x1=\"" + fmt("%.2f", x) + "\" y1=\"" + fmt("%.2f", kTop) + "\" x2=\"" + fmt("%.2f", x) +
			"\" y2=\"" + fmt("%.2f", kTop + plot_h) + "\"/>\n";
	}
	svg += "</g>\n";
	svg += "<rect x=\"" + fmt("%.2f", kLeft) + "\" y=\"" + fmt("%.2f", kTop) + "\" width=\"" + fmt("%.2f", plot_w) +
		"\" height=\"" + fmt("%.2f", plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

	svg += "<g>\n";
	for (int k = 0; k <= kTicks; ++k) {
		const double yv = yr.lo + (yr.hi - yr.lo) * k / kTicks;
		svg += "<text x=\"" + fmt("%.2f", kLeft - 6) + "\" y=\"" + fmt("%.2f", sy(yv) + 4) +
			"\" text-anchor=\"end\">" + fmt("%.4g", yv) + "</text>\n";
		const double xv = xr.lo + (xr.hi - xr.lo) * k / kTicks;
		svg += "<text x=\"" + fmt("%.2f", sx(xv)) + "\" y=\"" + fmt("%.2f", kTop + plot_h + 18) +
			"\" text-anchor=\"middle\">" + xml_escape(x_tick_label(xv, spec.x_kind)) + "</text>\n";
	}
	svg += "<text x=\"" + fmt("%.2f", kLeft + plot_w / 2) + "\" y=\"" + fmt("%.2f", kHeight - 14) +
		"\" text-anchor=\"middle\">" + xml_escape(spec.x_label) + "</text>\n";
	svg += "<text x=\"18\" y=\"" + fmt("%.2f", kTop + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
		fmt("%.2f", kTop + plot_h / 2) + ")\">" + xml_escape(spec.y_label) + "</text>\n";
	svg += "</g>\n";

	for (const auto& s : spec.series) {
		svg += "<polyline fill=\"none\" stroke=\"" + std::string(role_color(s.role)) +
			"\" stroke-width=\"1.5\" data-name=\"" + xml_escape(s.name) + "\" points=\"";
		for (std::size_t k = 0; k < s.x.size(); ++k) {
			if (k > 0) svg += ' ';
			svg += fmt("%.2f", sx(s.x[k]));
			svg += ',';
			svg += fmt("%.2f", sy(s.y[k]));
		}
		svg += "\"/>\n";
	}

	svg += "<g class=\"legend\">\n";
	const double lx = kLeft + plot_w + 16;
	for (std::size_t k = 0; k < spec.series.size(); ++k) {
		const double ly = kTop + 10 + 22.0 * static_cast<double>(k);
		const auto& s = spec.series[k];
		svg += "<line x1=\"" + fmt("%.2f", lx) + "\" y1=\"" + fmt("%.2f", ly) + "\" x2=\"" + fmt("%.2f", lx + 24) +
			"\" y2=\"" + fmt("%.2f", ly) + "\" stroke=\"" + std::string(role_color(s.role)) + "\" stroke-width=\"3\"/>\n";
		svg += "<text x=\"" + fmt("%.2f", lx + 30) + "\" y=\"" + fmt("%.2f", ly + 4) + "\">" + xml_escape(s.name) +
			"</text>\n";
	}
	svg += "</g>\n</svg>\n";
	return svg;
}

void write_chart(const ChartSpec& spec) {
	const auto svg = render_chart(spec);
	std::ofstream out(spec.output_path, std::ios::binary);
	if (!out || !(out << svg)) throw Error(ErrorCode::IoError, "cannot write " + spec.output_path);
}

void Stopwatch::start() {
	if (started_) throw Error(ErrorCode::TimerMisuse, "timer '" + name_ + "' started twice");
	started_ = true;
	wall_start_ = std::chrono::system_clock::now();
	start_ = std::chrono::steady_clock::now();
}

void Stopwatch::stop() {
	if (!started_) throw Error(ErrorCode::TimerMisuse, "timer '" + name_ + "' stopped before start");
	if (stopped_) throw Error(ErrorCode::TimerMisuse, "timer '" + name_ + "' stopped twice");
	elapsed_ = std::chrono::steady_clock::now() - start_;
	stopped_ = true;
}

double Stopwatch::elapsed_seconds() const {
	if (!stopped_) throw Error(ErrorCode::TimerMisuse, "timer '" + name_ + "' is still running");
	return std::chrono::duration<double>(elapsed_).count();
}

SystemInfo collect_system_info() {
	SystemInfo info;
	if (const auto n = std::thread::hardware_concurrency(); n > 0) info.cpu_threads = std::to_string(n);

	std::istringstream cpuinfo(read_file("/proc/cpuinfo"));
	std::set<std::pair<std::string, std::string>> cores;
	std::string line, physical;
	while (std::getline(cpuinfo, line)) {
		const auto colon = line.find(':');
		if (colon == std::string::npos) continue;
		auto key = line.substr(0, colon);
		key.erase(key.find_last_not_of(" \t") + 1);
		const auto value = colon + 2 <= line.size() ? line.substr(colon + 2) : std::string{};
		if (key == "physical id") physical = value;
		else if (key == "core id") cores.emplace(physical, value);
		else if (key == "cpu MHz" && info.cpu_frequency == "unknown") info.cpu_frequency = value + " MHz";
		else if (key == "model name" && info.uname_processor == "unknown") info.uname_processor = value;
	}
	if (!cores.empty()) info.cpu_cores = std::to_string(cores.size());
	else if (info.cpu_threads != "unknown") info.cpu_cores = info.cpu_threads;

	std::istringstream meminfo(read_file("/proc/meminfo"));
	double total = -1, available = -1;
	std::string key;
	double value = 0;
	while (meminfo >> key >> value) {
		if (key == "MemTotal:") total = value;
		else if (key == "MemAvailable:") available = value;
		meminfo.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
	}
	if (total > 0) info.mem_total = gib(total);
	if (available >= 0) info.mem_available = gib(available);
	if (total > 0 && available >= 0) {
		info.mem_used = gib(total - available);
		info.mem_percent = fmt("%.1f %%", 100.0 * (total - available) / total);
	}

	struct utsname u {};
	if (uname(&u) == 0) {
		info.uname_system = u.sysname;
		info.uname_version = u.release;
		if (info.uname_processor == "unknown") info.uname_processor = u.machine;
	}
#ifdef __VERSION__
	info.compiler = __VERSION__;
#endif
	return info;
}

BenchmarkReport benchmark_report(std::span<const Stopwatch> timers, const SystemInfo& system) {
	BenchmarkReport report;
	report.system = system;
	const std::string os = system.uname_system + " " + system.uname_version;
	for (const auto& t : timers) {
		report.rows.push_back(PhaseRow{t.name(), t.elapsed_seconds(), utc_timestamp(t.started_at()), os});
	}
	return report;
}

std::string format_phase_table(const BenchmarkReport& report) {
	std::vector<std::array<std::string, 4>> cells{{"Name", "Time", "Start", "OS Version"}};
	for (const auto& r : report.rows) cells.push_back({r.name, fmt("%.3f s", r.elapsed_s), r.start, r.os});
	std::array<std::size_t, 4> width{};
	for (const auto& row : cells) {
		for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], row[c].size());
	}
	std::string out;
	auto emit = [&](const std::array<std::string, 4>& row) {
		for (std::size_t c = 0; c < 4; ++c) {
			const auto pad = std::string(width[c] - row[c].size(), ' ');
			out += c == 1 ? pad + row[c] : row[c] + pad; // time column right-aligned
			out += c + 1 < 4 ? " | " : "\n";
		}
	};
	emit(cells.front());
	for (std::size_t c = 0; c < 4; ++c) out += std::string(width[c], '-') + (c + 1 < 4 ? "-+-" : "\n");
	for (std::size_t r = 1; r < cells.size(); ++r) emit(cells[r]);
	return out;
}

std::string format_system_table(const SystemInfo& s) {
	const std::pair<const char*, const std::string*> attrs[] = {
		{"cpu cores", &s.cpu_cores}, {"cpu threads", &s.cpu_threads}, {"cpu frequency", &s.cpu_frequency},
		{"mem.available", &s.mem_available}, {"mem.percent", &s.mem_percent}, {"mem.total", &s.mem_total},
		{"mem.used", &s.mem_used}, {"compiler", &s.compiler}, {"uname.processor", &s.uname_processor},
		{"uname.system", &s.uname_system}, {"uname.version", &s.uname_version},
	};
	std::string out;
	std::size_t key_w = std::string_view("Attribute").size();
	for (const auto& [k, v] : attrs) key_w = std::max(key_w, std::string_view(k).size());
	out += "Attribute" + std::string(key_w - 9, ' ') + " | Value\n";
	out += std::string(key_w, '-') + "-+------\n";
	for (const auto& [k, v] : attrs) out += std::string(k) + std::string(key_w - std::string_view(k).size(), ' ') + " | " + *v + "\n";
	return out;
}

std::string format_benchmark_table(const BenchmarkReport& report) {
	return format_phase_table(report) + "\n" + format_system_table(report.system);
}

std::string benchmark_json(const BenchmarkReport& report) {
	nlohmann::ordered_json doc;
	auto& phases = doc["phases"] = nlohmann::ordered_json::array();
	for (const auto& r : report.rows) {
		phases.push_back({{"name", r.name}, {"time_s", r.elapsed_s}, {"start", r.start}, {"os", r.os}});
	}
	const auto& s = report.system;
	doc["system"] = {
		{"cpu_cores", s.cpu_cores}, {"cpu_threads", s.cpu_threads}, {"cpu_frequency", s.cpu_frequency},
		{"mem_available", s.mem_available}, {"mem_percent", s.mem_percent}, {"mem_total", s.mem_total},
		{"mem_used", s.mem_used}, {"compiler", s.compiler}, {"uname_processor", s.uname_processor},
		{"uname_system", s.uname_system}, {"uname_version", s.uname_version},
	};
	return doc.dump(2) + "\n";
}

} // namespace cryptolstm
