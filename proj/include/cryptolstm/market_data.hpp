#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cryptolstm {

using Date = std::chrono::year_month_day;

/// Parses `YYYY-MM-DD`. Returns nullopt on anything else, including
/// impossible calendar days.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& date);

struct Candle {
	Date date;
	double open = 0.0;
	double high = 0.0;
	double low = 0.0;
	double close = 0.0;
	double adj_close = 0.0;
	std::uint64_t volume = 0;

	/// Finite non-negative prices with low <= open, close <= high.
	bool is_sane() const;

	bool operator==(const Candle&) const = default;
};

struct CandleSeries {
	std::string ticker;
	std::vector<Candle> candles;

	std::size_t size() const { return candles.size(); }
	bool operator==(const CandleSeries&) const = default;
};

/// Result of ingesting raw vendor data. Rows with missing numeric fields,
/// unparseable dates, failed OHLC sanity checks or duplicate dates are
/// dropped and counted here rather than failing the whole series.
struct IngestResult {
	CandleSeries series;
	std::size_t dropped_rows = 0;
};

/// Close prices with their aligned calendar days.
struct PriceVector {
	std::string ticker;
	std::vector<double> values;
	std::vector<Date> dates;

	std::size_t size() const { return values.size(); }
};

inline constexpr std::string_view kCsvHeader = "Date,Open,High,Low,Close,Adj Close,Volume";

IngestResult parse_ohlcv_csv(std::istream& in, std::string ticker);
IngestResult parse_ohlcv_csv(std::string_view text, std::string ticker);
IngestResult load_ohlcv_csv(const std::string& path, std::string ticker);

/// Writes the series in the Yahoo export layout. Prices are printed with
/// enough digits to round-trip through parse_ohlcv_csv exactly.
std::string serialize_ohlcv_csv(const CandleSeries& series);

struct FetchOptions {
	std::string base_url = "https://query1.finance.yahoo.com";
	std::string range = "max";
	std::string interval = "1d";
	std::chrono::seconds timeout{30};
	/// `http://host:port` style proxy. When unset, HTTPS_PROXY / https_proxy
	/// (or HTTP_PROXY / http_proxy for plain-http base URLs) is consulted.
	std::optional<std::string> proxy;
};

/// GET {base_url}/v8/finance/chart/{ticker}?range=..&interval=.. and decode.
IngestResult fetch_daily_history(const std::string& ticker, const FetchOptions& options = {});

/// Decodes a chart-API JSON body. Exposed separately so recorded responses
/// can be replayed without a server.
IngestResult parse_chart_json(std::string_view body, std::string ticker);

PriceVector extract_close(const CandleSeries& series);

} // namespace cryptolstm
