#include "cryptolstm/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "cryptolstm/error.hpp"

namespace cryptolstm {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
	while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
	while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
	return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
	std::vector<std::string_view> out;
	std::size_t begin = 0;
	for (;;) {
		const auto comma = line.find(',', begin);
		out.push_back(trim(line.substr(begin, comma - begin)));
		if (comma == std::string_view::npos) break;
		begin = comma + 1;
	}
	return out;
}

std::optional<double> parse_number(std::string_view s) {
	if (s.empty() || s == "null" || s == "NaN") return std::nullopt;
	double value = 0.0;
	const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
	if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
	return value;
}

std::optional<std::uint64_t> to_volume(double v) {
	if (!std::isfinite(v) || v < 0.0 || v > 1.8e19) return std::nullopt;
	return static_cast<std::uint64_t>(std::llround(v));
}

std::string format_number(double v) {
	char buf[64];
	const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
	return std::string(buf, ptr);
}

// Sorts by date, drops duplicate days (first occurrence wins) and fails on
// an empty result.
IngestResult finalize(std::string ticker, std::vector<Candle> candles, std::size_t dropped) {
	std::stable_sort(candles.begin(), candles.end(),
		[](const Candle& a, const Candle& b) { return a.date < b.date; });
	const auto last = std::unique(candles.begin(), candles.end(),
		[](const Candle& a, const Candle& b) { return a.date == b.date; });
	dropped += static_cast<std::size_t>(std::distance(last, candles.end()));
	candles.erase(last, candles.end());
	if (candles.empty()) {
		throw Error(ErrorCode::EmptySeries, "no valid rows for '" + ticker + "'");
	}
	return IngestResult{CandleSeries{std::move(ticker), std::move(candles)}, dropped};
}

struct ParsedUrl {
	std::string scheme_host_port;
	std::string path_prefix;
	bool https = false;
};

ParsedUrl parse_base_url(const std::string& url) {
	const auto scheme_end = url.find("://");
	if (scheme_end == std::string::npos) {
		throw Error(ErrorCode::InvalidArgument, "base URL needs a scheme: " + url);
	}
	const auto path_begin = url.find('/', scheme_end + 3);
	ParsedUrl out;
	out.scheme_host_port = url.substr(0, path_begin);
	if (path_begin != std::string::npos) out.path_prefix = url.substr(path_begin);
	while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
	out.https = url.compare(0, 8, "https://") == 0;
	return out;
}

std::optional<std::string> proxy_from_env(bool https) {
	const char* names_https[] = {"HTTPS_PROXY", "https_proxy"};
	const char* names_http[] = {"HTTP_PROXY", "http_proxy"};
	for (const char* name : https ? names_https : names_http) {
		if (const char* v = std::getenv(name); v != nullptr && *v != '\0') return std::string(v);
	}
	return std::nullopt;
}

void apply_proxy(httplib::Client& client, const std::string& proxy) {
	std::string_view rest = proxy;
	if (const auto p = rest.find("://"); p != std::string_view::npos) rest.remove_prefix(p + 3);
	if (const auto at = rest.rfind('@'); at != std::string_view::npos) rest.remove_prefix(at + 1);
	while (!rest.empty() && rest.back() == '/') rest.remove_suffix(1);
	int port = 80;
	std::string host(rest);
	if (const auto colon = rest.rfind(':'); colon != std::string_view::npos) {
		host = std::string(rest.substr(0, colon));
		const auto digits = rest.substr(colon + 1);
		std::from_chars(digits.data(), digits.data() + digits.size(), port);
	}
	client.set_proxy(host, port);
}

const json& require(const json& node, const char* key, const std::string& where) {
	if (!node.is_object() || !node.contains(key) || node.at(key).is_null()) {
		throw Error(ErrorCode::ApiShapeError, "missing '" + where + "." + key + "'");
	}
	return node.at(key);
}

const json& first_element(const json& node, const std::string& where) {
	if (!node.is_array() || node.empty()) {
		throw Error(ErrorCode::ApiShapeError, "'" + where + "' is not a non-empty array");
	}
	return node.front();
}

std::optional<double> json_number(const json& arr, std::size_t i) {
	if (i >= arr.size() || !arr[i].is_number()) return std::nullopt;
	const double v = arr[i].get<double>();
	if (!std::isfinite(v)) return std::nullopt;
	return v;
}

} // namespace

std::optional<Date> parse_date(std::string_view text) {
	text = trim(text);
	if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
	int y = 0;
	unsigned m = 0;
	unsigned d = 0;
	auto field = [&](std::size_t pos, std::size_t len, auto& out) {
		const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
		return ec == std::errc{} && ptr == text.data() + pos + len;
	};
	if (!field(0, 4, y) || !field(5, 2, m) || !field(8, 2, d)) return std::nullopt;
	const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
	if (!date.ok()) return std::nullopt;
	return date;
}

std::string format_date(const Date& date) {
	char buf[16];
	std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
		static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
	return buf;
}

bool Candle::is_sane() const {
	for (double p : {open, high, low, close, adj_close}) {
		if (!std::isfinite(p) || p < 0.0) return false;
	}
	return low <= open && open <= high && low <= close && close <= high;
}

IngestResult parse_ohlcv_csv(std::istream& in, std::string ticker) {
	std::string line;
	if (!std::getline(in, line)) {
		throw Error(ErrorCode::MissingHeader, "empty input");
	}
	if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3); // UTF-8 BOM
	if (trim(line) != kCsvHeader) {
		throw Error(ErrorCode::MissingHeader, "expected '" + std::string(kCsvHeader) + "'");
	}

	std::vector<Candle> candles;
	std::size_t dropped = 0;
	std::size_t line_no = 1;
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty()) continue;
		const auto f = split_fields(line);
		if (f.size() != 7) {
			throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + " has " +
				std::to_string(f.size()) + " columns, expected 7");
		}
		const auto date = parse_date(f[0]);
		std::optional<double> num[6];
		for (int k = 0; k < 6; ++k) num[k] = parse_number(f[k + 1]);
		const bool complete = date && std::all_of(std::begin(num), std::end(num), [](auto& v) { return v.has_value(); });
		if (!complete) {
			++dropped;
			continue;
		}
		const auto volume = to_volume(*num[5]);
		Candle c{*date, *num[0], *num[1], *num[2], *num[3], *num[4], volume.value_or(0)};
		if (!volume || !c.is_sane()) {
			++dropped;
			continue;
		}
		candles.push_back(c);
	}
	return finalize(std::move(ticker), std::move(candles), dropped);
}

IngestResult parse_ohlcv_csv(std::string_view text, std::string ticker) {
	std::istringstream in{std::string(text)};
	return parse_ohlcv_csv(in, std::move(ticker));
}

IngestResult load_ohlcv_csv(const std::string& path, std::string ticker) {
	std::ifstream in(path);
	if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
	return parse_ohlcv_csv(in, std::move(ticker));
}

std::string serialize_ohlcv_csv(const CandleSeries& series) {
	std::string out(kCsvHeader);
	out += '\n';
	for (const auto& c : series.candles) {
		out += format_date(c.date);
		for (double v : {c.open, c.high, c.low, c.close, c.adj_close}) {
			out += ',';
			out += format_number(v);
		}
		out += ',';
		out += std::to_string(c.volume);
		out += '\n';
	}
	return out;
}

IngestResult parse_chart_json(std::string_view body, std::string ticker) {
	json doc;
	try {
		doc = json::parse(body);
	} catch (const json::parse_error& e) {
		throw Error(ErrorCode::ApiShapeError, std::string("invalid JSON: ") + e.what());
	}
	const auto& chart = require(doc, "chart", "$");
	const auto& result = first_element(require(chart, "result", "chart"), "chart.result");
	const auto& timestamps = require(result, "timestamp", "chart.result[0]");
	const auto& indicators = require(result, "indicators", "chart.result[0]");
	const auto& quote = first_element(require(indicators, "quote", "indicators"), "indicators.quote");
	const char* fields[] = {"open", "high", "low", "close", "volume"};
	const json* cols[5];
	for (int k = 0; k < 5; ++k) cols[k] = &require(quote, fields[k], "indicators.quote[0]");

	const json* adj = nullptr;
	if (indicators.contains("adjclose") && indicators["adjclose"].is_array() && !indicators["adjclose"].empty()) {
		const auto& a = indicators["adjclose"].front();
		if (a.is_object() && a.contains("adjclose") && a["adjclose"].is_array()) adj = &a["adjclose"];
	}
	if (!timestamps.is_array()) throw Error(ErrorCode::ApiShapeError, "'timestamp' is not an array");

	std::vector<Candle> candles;
	std::size_t dropped = 0;
	for (std::size_t i = 0; i < timestamps.size(); ++i) {
		if (!timestamps[i].is_number_integer()) {
			++dropped;
			continue;
		}
		const auto secs = timestamps[i].get<std::int64_t>();
		const auto day = std::chrono::floor<std::chrono::days>(std::chrono::sys_seconds{std::chrono::seconds{secs}});
		std::optional<double> v[5];
		for (int k = 0; k < 5; ++k) v[k] = json_number(*cols[k], i);
		const auto adj_close = adj ? json_number(*adj, i) : v[3];
		const bool complete = std::all_of(std::begin(v), std::end(v), [](auto& x) { return x.has_value(); }) && adj_close;
		const auto volume = complete ? to_volume(*v[4]) : std::nullopt;
		if (!volume) {
			++dropped;
			continue;
		}
		Candle c{Date{day}, *v[0], *v[1], *v[2], *v[3], *adj_close, *volume};
		if (!c.is_sane()) {
			++dropped;
			continue;
		}
		candles.push_back(c);
	}
	return finalize(std::move(ticker), std::move(candles), dropped);
}

IngestResult fetch_daily_history(const std::string& ticker, const FetchOptions& options) {
	if (ticker.empty()) throw Error(ErrorCode::InvalidArgument, "ticker must not be empty");
	const auto url = parse_base_url(options.base_url);
	httplib::Client client(url.scheme_host_port);
	client.set_connection_timeout(options.timeout);
	client.set_read_timeout(options.timeout);
	client.set_follow_location(true);
	if (const auto proxy = options.proxy ? options.proxy : proxy_from_env(url.https)) {
		apply_proxy(client, *proxy);
	}
	const std::string path = url.path_prefix + "/v8/finance/chart/" + httplib::detail::encode_url(ticker) +
		"?range=" + options.range + "&interval=" + options.interval;
	const httplib::Headers headers{{"Accept", "application/json"}, {"User-Agent", "cryptolstm/1.0"}};

	const auto res = client.Get(path, headers);
	if (!res) {
		throw Error(ErrorCode::HttpError, "request for '" + ticker + "' failed: " + httplib::to_string(res.error()));
	}
	if (res->status != 200) {
		throw Error(ErrorCode::HttpError, "request for '" + ticker + "' returned HTTP " + std::to_string(res->status));
	}
	try {
		return parse_chart_json(res->body, ticker);
	} catch (const Error& e) {
		if (e.code() == ErrorCode::ApiShapeError || e.code() == ErrorCode::EmptySeries) {
			throw Error(e.code(), "ticker '" + ticker + "': " + e.detail());
		}
		throw;
	}
}

PriceVector extract_close(const CandleSeries& series) {
	PriceVector out;
	out.ticker = series.ticker;
	out.values.reserve(series.size());
	out.dates.reserve(series.size());
	for (const auto& c : series.candles) {
		out.values.push_back(c.close);
		out.dates.push_back(c.date);
	}
	return out;
}

} // namespace cryptolstm
