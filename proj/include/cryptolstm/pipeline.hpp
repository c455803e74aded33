#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "cryptolstm/evaluation.hpp"
#include "cryptolstm/forecast.hpp"
#include "cryptolstm/market_data.hpp"
#include "cryptolstm/preprocess.hpp"
#include "cryptolstm/reporting.hpp"

namespace cryptolstm {

/// Everything one end-to-end run needs. With csv_path unset the history is
/// downloaded for `ticker` through the chart API.
struct RunConfig {
	std::string ticker = "EOS-USD";
	std::optional<std::string> csv_path;
	SplitSpec split;
	TrainConfig train;
	std::filesystem::path out_dir = "out";
	FetchOptions fetch;

	void validate() const;
};

struct LoadedPrices {
	PriceVector prices;
	std::size_t dropped_rows = 0;
};

LoadedPrices load_prices(const RunConfig& config);

struct RunOutcome {
	LoadedPrices loaded;
	PreparedData data;
	TrainResult trained;
	ForecastResult forecast;
	LagDiagnostic lag;
	BenchmarkReport benchmark;
	std::string report_json;
};

/// Load -> split/scale/window -> train -> predict -> write artifacts:
/// forecast.csv, forecast.svg, forecast_zoomed.svg, loss.svg,
/// benchmark.txt, benchmark.json, report.json and model.json.
RunOutcome run_pipeline(const RunConfig& config, std::ostream& log);

/// `date,actual_usd,predicted_usd`
std::string forecast_to_csv(const ForecastResult& result);

/// Full-span chart (history, actual, predicted) and the test-window zoom.
ChartSpec forecast_chart(const PriceVector& prices, const ForecastResult& result, std::string output_path);
ChartSpec forecast_zoomed_chart(const std::string& ticker, const ForecastResult& result, std::string output_path);
ChartSpec loss_chart(const std::string& ticker, const LossHistory& history, std::string output_path);

/// Overwrites `path` with `contents`; IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& contents);

} // namespace cryptolstm
