#include "cryptolstm/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cryptolstm/error.hpp"
#include "cryptolstm/pipeline.hpp"

namespace cryptolstm {

namespace {

int exit_code_for(const Error& e) {
	switch (e.code()) {
	case ErrorCode::HttpError:
	case ErrorCode::ApiShapeError: return kExitNetwork;
	case ErrorCode::IoError: return kExitOutput;
	case ErrorCode::SeriesTooShort:
	case ErrorCode::DegenerateRange:
	case ErrorCode::EmptySeries: return kExitData;
	default: return kExitFailure;
	}
}

std::vector<std::size_t> parse_epoch_list(const std::string& text) {
	std::vector<std::size_t> out;
	std::stringstream ss(text);
	std::string item;
	while (std::getline(ss, item, ',')) {
		if (item.empty()) continue;
		std::size_t pos = 0;
		const auto v = std::stoull(item, &pos);
		if (pos != item.size() || v == 0) throw Error(ErrorCode::InvalidArgument, "bad epoch count '" + item + "'");
		out.push_back(v);
	}
	if (out.empty()) throw Error(ErrorCode::InvalidArgument, "epoch list is empty");
	return out;
}

void add_run_options(CLI::App& cmd, RunConfig& cfg, bool with_source) {
	if (with_source) {
		cmd.add_option("--ticker", cfg.ticker, "Ticker symbol, e.g. EOS-USD, BTC-USD")->capture_default_str();
		cmd.add_option("--csv", cfg.csv_path,
			"Read history from a CSV in the Yahoo export layout instead of downloading it");
	}
	cmd.add_option("--lookback", cfg.train.lookback, "Days of closes per input window")->capture_default_str();
	cmd.add_option("--test-len", cfg.split.test_len, "Trailing days held out and predicted")->capture_default_str();
	cmd.add_option("--epochs", cfg.train.epochs, "Training epochs")->capture_default_str();
	cmd.add_option("--batch-size", cfg.train.batch_size, "Minibatch size")->capture_default_str();
	cmd.add_option("--hidden", cfg.train.hidden_size, "LSTM hidden units")->capture_default_str();
	cmd.add_option("--dropout", cfg.train.dropout, "Dropout rate between LSTM and dense layer")->capture_default_str();
	cmd.add_option("--seed", cfg.train.seed, "Seed for initialization, shuffling and dropout")->capture_default_str();
	cmd.add_option("--learning-rate", cfg.train.adam.learning_rate, "Adam learning rate")->capture_default_str();
	cmd.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
}

void add_fetch_options(CLI::App& cmd, FetchOptions& fetch) {
	cmd.add_option("--range", fetch.range, "Chart-API range parameter")->capture_default_str();
	cmd.add_option_function<long>("--timeout", [&fetch](long s) { fetch.timeout = std::chrono::seconds(s); },
		"HTTP timeout in seconds (default 30)");
}

void write_or_fail(const std::filesystem::path& path, const std::string& text) {
	if (path.has_parent_path()) {
		std::error_code ec;
		std::filesystem::create_directories(path.parent_path(), ec);
		if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
	}
	write_text(path, text);
}

int cmd_fetch(const std::string& ticker, const std::string& out_path, const FetchOptions& fetch, std::ostream& out) {
	IngestResult ingest;
	try {
		ingest = fetch_daily_history(ticker, fetch);
	} catch (const Error& e) {
		if (e.code() == ErrorCode::EmptySeries) throw Error(ErrorCode::ApiShapeError, e.detail());
		throw;
	}
	write_or_fail(out_path, serialize_ohlcv_csv(ingest.series));
	out << "wrote " << ingest.series.size() << " rows for " << ticker << " to " << out_path;
	if (ingest.dropped_rows > 0) out << " (" << ingest.dropped_rows << " rows dropped)";
	out << "\n";
	return kExitOk;
}

int cmd_run(const RunConfig& cfg, std::ostream& out) {
	const auto run = run_pipeline(cfg, out);
	out << "artifacts written to " << cfg.out_dir.string() << "\n";
	return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const std::vector<std::size_t>& epochs, std::ostream& out) {
	cfg.validate();
	const auto loaded = load_prices(cfg);
	const auto rows = epoch_sweep(loaded.prices, epochs, cfg.train, cfg.split.test_len);
	const auto csv = sweep_to_csv(rows);
	write_or_fail(cfg.out_dir / "sweep.csv", csv);
	out << csv;
	return kExitOk;
}

int cmd_diagnose(const RunConfig& cfg, const std::string& model, int max_lag, std::ostream& out) {
	cfg.validate();
	const auto loaded = load_prices(cfg);
	const auto& prices = loaded.prices;
	const auto data = prepare(prices, cfg.split);
	ForecastResult forecast;
	if (model == "persistence") {
		forecast = predict_with([](std::span<const double> window) { return window.back(); }, data.test, data.scaler);
	} else {
		const auto trained = train(data.train, cfg.train);
		forecast = predict(trained.params, data.test, data.scaler);
	}
	const double previous = prices.values[prices.size() - cfg.split.test_len - 1];
	const auto diag = lag_diagnostic(forecast.actual_usd, forecast.predicted_usd, max_lag, previous);

	nlohmann::ordered_json doc{
		{"ticker", cfg.ticker},
		{"model", model},
		{"max_lag", max_lag},
		{"best_lag", diag.best_lag},
		{"correlation_at_best", diag.correlation_at_best},
		{"rmse_model_usd", diag.rmse_model_usd},
		{"rmse_persistence_usd", diag.rmse_persistence_usd},
		{"correlations", diag.correlations},
	};
	write_or_fail(cfg.out_dir / "diagnostic.json", doc.dump(2) + "\n");
	char line[200];
	std::snprintf(line, sizeof(line),
		"model=%s best_lag=%d correlation=%.6f rmse_model_usd=%.6f rmse_persistence_usd=%.6f\n", model.c_str(),
		diag.best_lag, diag.correlation_at_best, diag.rmse_model_usd, diag.rmse_persistence_usd);
	out << line;
	return kExitOk;
}

int cmd_batch(const RunConfig& base, const std::vector<std::string>& tickers, const std::string& data_dir,
	std::ostream& out, std::ostream& err) {
	std::size_t ok = 0;
	std::vector<std::string> failed;
	for (const auto& ticker : tickers) {
		auto cfg = base;
		cfg.ticker = ticker;
		cfg.out_dir = base.out_dir / ticker;
		if (!data_dir.empty()) cfg.csv_path = (std::filesystem::path(data_dir) / (ticker + ".csv")).string();
		try {
			out << "== " << ticker << "\n";
			run_pipeline(cfg, out);
			++ok;
		} catch (const Error& e) {
			err << ticker << ": " << e.what() << "\n";
			failed.push_back(ticker);
		}
	}
	out << "batch: " << ok << "/" << tickers.size() << " tickers succeeded";
	if (!failed.empty()) {
		out << "; failed:";
		for (const auto& t : failed) out << " " << t;
	}
	out << "\n";
	return ok == 0 ? kExitFailure : kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
	CLI::App app{"LSTM close-price forecaster for daily crypto/stock history"};
	app.require_subcommand(1);
	app.set_help_all_flag("--help-all", "Show help for every subcommand");

	RunConfig cfg;
	if (const char* base = std::getenv(kApiBaseEnv); base != nullptr && *base != '\0') cfg.fetch.base_url = base;

	auto* fetch = app.add_subcommand("fetch", "Download daily history and save it as CSV");
	std::string fetch_out;
	fetch->add_option("--ticker", cfg.ticker, "Ticker symbol")->required();
	fetch->add_option("--out", fetch_out, "Destination CSV file")->required();
	add_fetch_options(*fetch, cfg.fetch);

	auto* run = app.add_subcommand("run", "Full pipeline: load, scale, train, predict, report");
	add_run_options(*run, cfg, true);
	add_fetch_options(*run, cfg.fetch);

	auto* sweep = app.add_subcommand("sweep", "RMSE after each of several epoch counts");
	std::string epoch_list = "5,15,25,50,100";
	add_run_options(*sweep, cfg, true);
	add_fetch_options(*sweep, cfg.fetch);
	sweep->add_option("--epochs-list", epoch_list, "Comma-separated epoch counts")->capture_default_str();

	auto* diagnose = app.add_subcommand("diagnose", "Lag diagnostic of test-window predictions");
	std::string model = "lstm";
	int max_lag = 5;
	add_run_options(*diagnose, cfg, true);
	add_fetch_options(*diagnose, cfg.fetch);
	diagnose->add_option("--model", model, "lstm, or persistence (yesterday's close)")
		->check(CLI::IsMember({"lstm", "persistence"}))->capture_default_str();
	diagnose->add_option("--max-lag", max_lag, "Largest lag tested in both directions")
		->check(CLI::NonNegativeNumber)->capture_default_str();

	auto* batch = app.add_subcommand("batch", "Run the pipeline for several tickers");
	std::vector<std::string> tickers{"EOS-USD", "DOGE-USD", "ETH-USD", "BTC-USD"};
	std::string data_dir;
	add_run_options(*batch, cfg, false);
	add_fetch_options(*batch, cfg.fetch);
	batch->add_option("--tickers", tickers, "Tickers to process")->delimiter(',')->capture_default_str();
	batch->add_option("--data-dir", data_dir, "Directory holding <TICKER>.csv files; download when omitted");

	std::vector<const char*> argv;
	for (const auto& a : args) argv.push_back(a.c_str());
	try {
		app.parse(static_cast<int>(argv.size()), argv.data());
	} catch (const CLI::ParseError& e) {
		return app.exit(e, out, err);
	}
	cfg.split.lookback = cfg.train.lookback;

	try {
		if (*fetch) return cmd_fetch(cfg.ticker, fetch_out, cfg.fetch, out);
		if (*run) return cmd_run(cfg, out);
		if (*sweep) return cmd_sweep(cfg, parse_epoch_list(epoch_list), out);
		if (*diagnose) return cmd_diagnose(cfg, model, max_lag, out);
		if (*batch) return cmd_batch(cfg, tickers, data_dir, out, err);
	} catch (const Error& e) {
		err << "error: " << e.what() << "\n";
		return exit_code_for(e);
	} catch (const std::exception& e) {
		err << "error: " << e.what() << "\n";
		return kExitFailure;
	}
	return kExitFailure;
}

} // namespace cryptolstm
