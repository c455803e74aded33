#include "cryptolstm/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "cryptolstm/error.hpp"

namespace cryptolstm {

namespace {

using nlohmann::ordered_json;

ordered_json config_json(const RunConfig& c) {
	return {
		{"ticker", c.ticker},
		{"source", c.csv_path ? "csv" : "fetch"},
		{"lookback", c.split.lookback},
		{"test_len", c.split.test_len},
		{"epochs", c.train.epochs},
		{"batch_size", c.train.batch_size},
		{"hidden_size", c.train.hidden_size},
		{"dropout", c.train.dropout},
		{"seed", c.train.seed},
		{"optimizer", {{"name", "adam"}, {"learning_rate", c.train.adam.learning_rate},
			{"beta1", c.train.adam.beta1}, {"beta2", c.train.adam.beta2}, {"epsilon", c.train.adam.epsilon}}},
	};
}

} // namespace

void RunConfig::validate() const {
	if (ticker.empty()) throw Error(ErrorCode::InvalidArgument, "ticker must not be empty");
	if (split.lookback != train.lookback) {
		throw Error(ErrorCode::InvalidArgument, "split and training lookback disagree");
	}
	if (split.test_len < 1) throw Error(ErrorCode::InvalidArgument, "test_len must be >= 1");
	train.validate();
}

LoadedPrices load_prices(const RunConfig& config) {
	IngestResult ingest;
	if (config.csv_path) {
		if (!std::filesystem::exists(*config.csv_path)) {
			throw Error(ErrorCode::InvalidArgument, "input CSV not found: " + *config.csv_path);
		}
		ingest = load_ohlcv_csv(*config.csv_path, config.ticker);
	} else {
		try {
			ingest = fetch_daily_history(config.ticker, config.fetch);
		} catch (const Error& e) {
			// An empty download is an API-side failure for the caller.
			if (e.code() == ErrorCode::EmptySeries) throw Error(ErrorCode::ApiShapeError, e.detail());
			throw;
		}
	}
	return LoadedPrices{extract_close(ingest.series), ingest.dropped_rows};
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out || !(out << contents) || !out.flush()) {
		throw Error(ErrorCode::IoError, "cannot write " + path.string());
	}
}

std::string forecast_to_csv(const ForecastResult& result) {
	std::string out = "date,actual_usd,predicted_usd\n";
	char buf[96];
	for (std::size_t k = 0; k < result.actual_usd.size(); ++k) {
		const auto date = k < result.dates.size() ? format_date(result.dates[k]) : std::to_string(k);
		std::snprintf(buf, sizeof(buf), ",%.6f,%.6f\n", result.actual_usd[k], result.predicted_usd[k]);
		out += date;
		out += buf;
	}
	return out;
}

ChartSpec forecast_chart(const PriceVector& prices, const ForecastResult& result, std::string output_path) {
	const auto test_len = result.actual_usd.size();
	const auto history_len = prices.size() - test_len;
	ChartSpec spec{prices.ticker + " close with the last " + std::to_string(test_len) + " days predicted",
		"Date", "Close (USD)", XAxisKind::Dates, {}, std::move(output_path)};
	const std::span<const Date> dates(prices.dates);
	const std::span<const double> values(prices.values);
	if (history_len > 0) {
		spec.series.push_back(dated_series("history", SeriesRole::History, dates.first(history_len), values.first(history_len)));
	}
	spec.series.push_back(dated_series("actual", SeriesRole::Actual, dates.last(test_len), values.last(test_len)));
	spec.series.push_back(dated_series("predicted", SeriesRole::Predicted, result.dates, result.predicted_usd));
	return spec;
}

ChartSpec forecast_zoomed_chart(const std::string& ticker, const ForecastResult& result, std::string output_path) {
	ChartSpec spec{ticker + " test window (zoomed)", "Date", "Close (USD)", XAxisKind::Dates, {}, std::move(output_path)};
	spec.series.push_back(dated_series("actual", SeriesRole::Actual, result.dates, result.actual_usd));
	spec.series.push_back(dated_series("predicted", SeriesRole::Predicted, result.dates, result.predicted_usd));
	return spec;
}

ChartSpec loss_chart(const std::string& ticker, const LossHistory& history, std::string output_path) {
	ChartSeries s{"loss", SeriesRole::Loss, {}, history};
	for (std::size_t k = 0; k < history.size(); ++k) s.x.push_back(static_cast<double>(k + 1));
	return ChartSpec{ticker + " training loss", "Epoch", "MSE (normalized)", XAxisKind::Numeric, {std::move(s)},
		std::move(output_path)};
}

RunOutcome run_pipeline(const RunConfig& config, std::ostream& log) {
	config.validate();
	std::vector<Stopwatch> timers{Stopwatch("Overall time"), Stopwatch("Training time"), Stopwatch("Prediction time")};
	auto& overall = timers[0];
	auto& training = timers[1];
	auto& prediction = timers[2];
	overall.start();

	auto loaded = load_prices(config);
	const auto& prices_ref = loaded.prices;
	log << "loaded " << prices_ref.size() << " closes for " << config.ticker;
	if (loaded.dropped_rows > 0) log << " (" << loaded.dropped_rows << " rows dropped)";
	log << "\n";

	auto data = prepare(prices_ref, config.split);
	RunOutcome run{std::move(loaded), std::move(data), {}, {}, {}, {}, {}};
	const auto& prices = run.loaded.prices;

	std::error_code ec;
	std::filesystem::create_directories(config.out_dir, ec);
	if (ec) throw Error(ErrorCode::IoError, "cannot create " + config.out_dir.string() + ": " + ec.message());

	training.start();
	run.trained = train(run.data.train, config.train);
	training.stop();

	prediction.start();
	run.forecast = predict(run.trained.params, run.data.test, run.data.scaler);
	prediction.stop();
	run.forecast.loss_history = run.trained.loss_history;
	run.forecast.config = config.train;

	const auto test_len = config.split.test_len;
	run.lag = lag_diagnostic(run.forecast.actual_usd, run.forecast.predicted_usd, 5,
		prices.values[prices.size() - test_len - 1]);

	const auto& dir = config.out_dir;
	write_text(dir / "forecast.csv", forecast_to_csv(run.forecast));
	write_chart(forecast_chart(prices, run.forecast, (dir / "forecast.svg").string()));
	write_chart(forecast_zoomed_chart(config.ticker, run.forecast, (dir / "forecast_zoomed.svg").string()));
	write_chart(loss_chart(config.ticker, run.trained.loss_history, (dir / "loss.svg").string()));
	write_text(dir / "model.json", save_checkpoint(run.trained.params, config.train.seed));

	overall.stop();
	run.benchmark = benchmark_report(timers, collect_system_info());
	write_text(dir / "benchmark.txt", format_benchmark_table(run.benchmark));
	write_text(dir / "benchmark.json", benchmark_json(run.benchmark));

	ordered_json report;
	report["ticker"] = config.ticker;
	report["data"] = {
		{"closes", prices.size()},
		{"dropped_rows", run.loaded.dropped_rows},
		{"first_date", format_date(prices.dates.front())},
		{"last_date", format_date(prices.dates.back())},
		{"train_len", run.data.train_len},
		{"test_len", test_len},
		{"train_windows", run.data.train.size()},
	};
	report["config"] = config_json(config);
	report["scaler"] = {{"min_usd", run.data.scaler.min_value()}, {"max_usd", run.data.scaler.max_value()}};
	report["loss_history"] = run.trained.loss_history;
	report["rmse_usd"] = run.forecast.rmse_usd;
	report["persistence_rmse_usd"] = run.lag.rmse_persistence_usd;
	report["lag_diagnostic"] = {
		{"best_lag", run.lag.best_lag},
		{"correlation_at_best", run.lag.correlation_at_best},
		{"correlations", run.lag.correlations},
	};
	report["timings"] = {
		{"overall_s", overall.elapsed_seconds()},
		{"training_s", training.elapsed_seconds()},
		{"prediction_s", prediction.elapsed_seconds()},
	};
	run.report_json = report.dump(2) + "\n";
	write_text(dir / "report.json", run.report_json);

	char line[160];
	std::snprintf(line, sizeof(line), "RMSE: %.4f USD (persistence baseline %.4f USD), best lag %+d days (r=%.4f)\n",
		run.forecast.rmse_usd, run.lag.rmse_persistence_usd, run.lag.best_lag, run.lag.correlation_at_best);
	log << line << format_phase_table(run.benchmark);
	return run;
}

} // namespace cryptolstm
