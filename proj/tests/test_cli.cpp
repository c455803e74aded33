#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "cryptolstm/cli.hpp"
#include "cryptolstm/market_data.hpp"
#include "cryptolstm/neural.hpp"
#include "fixture_server.hpp"
#include "test_support.hpp"

using namespace cryptolstm;
namespace fs = std::filesystem;

namespace {

struct CliResult {
	int code;
	std::string out;
	std::string err;
};

CliResult cli(std::vector<std::string> args) {
	args.insert(args.begin(), "cryptolstm");
	std::ostringstream out, err;
	const int code = run_cli(args, out, err);
	return {code, out.str(), err.str()};
}

/// Sets an environment variable for the lifetime of the object.
class ScopedEnv {
public:
	ScopedEnv(const char* name, const std::string& value) : name_(name) {
		if (const char* old = std::getenv(name)) old_ = old;
		::setenv(name, value.c_str(), 1);
	}
	~ScopedEnv() {
		if (old_) ::setenv(name_, old_->c_str(), 1);
		else ::unsetenv(name_);
	}

private:
	const char* name_;
	std::optional<std::string> old_;
};

/// Writes a CSV of n days whose closes come from f(k).
template <class F>
std::string write_series_csv(const fs::path& path, std::size_t n, F f) {
	CandleSeries s{"SYN", {}};
	auto day = std::chrono::sys_days{Date{std::chrono::year{2020}, std::chrono::month{1}, std::chrono::day{1}}};
	for (std::size_t k = 0; k < n; ++k) {
		const double c = f(k);
		s.candles.push_back({Date{day + std::chrono::days{static_cast<int>(k)}}, c, c, c, c, c, 1000});
	}
	std::ofstream(path, std::ios::binary) << serialize_ohlcv_csv(s);
	return path.string();
}

double sine(std::size_t k) { return 10.0 + 3.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(k) / 25.0); }

std::vector<std::string> small_run(const std::string& csv, const fs::path& out) {
	return {"--csv", csv, "--lookback", "10", "--test-len", "30", "--epochs", "2", "--hidden", "6", "--out", out.string()};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
	a.insert(a.end(), b.begin(), b.end());
	return a;
}

std::string strip_timings(const std::string& report) {
	auto doc = nlohmann::ordered_json::parse(report);
	doc.erase("timings");
	return doc.dump();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("fetch writes the replayed history as CSV") {
	const auto body = cryptolstm::test::read_all(cryptolstm::test::fixture_dir() / "eos_chart_response.json");
	cryptolstm::test::FixtureServer server(cryptolstm::test::FixtureServer::replay("EOS-USD", body));
	ScopedEnv env(kApiBaseEnv, server.base_url());
	const auto dir = cryptolstm::test::scratch_dir("cli_fetch");
	const auto out = (dir / "eos.csv").string();

	const auto r = cli({"fetch", "--ticker", "EOS-USD", "--out", out});
	CHECK(r.code == kExitOk);
	CHECK(r.out.find("wrote 3 rows") != std::string::npos);
	const auto csv = cryptolstm::test::read_all(out);
	CHECK(csv.rfind(std::string(kCsvHeader), 0) == 0);
	CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
	CHECK(load_ohlcv_csv(out, "EOS-USD").series.size() == 3);

	SUBCASE("unknown ticker exits 2 naming the ticker") {
		const auto bad = cli({"fetch", "--ticker", "NOPE-USD", "--out", out});
		CHECK(bad.code == kExitNetwork);
		CHECK(bad.err.find("NOPE-USD") != std::string::npos);
	}
	SUBCASE("empty result from the API also exits 2") {
		cryptolstm::test::FixtureServer empty(cryptolstm::test::FixtureServer::replay(
			"EMPTY-USD", R"({"chart":{"result":[{"timestamp":[],"indicators":{"quote":[{"open":[],"high":[],"low":[],"close":[],"volume":[]}]}}],"error":null}})"));
		ScopedEnv env2(kApiBaseEnv, empty.base_url());
		const auto bad = cli({"fetch", "--ticker", "EMPTY-USD", "--out", out});
		CHECK(bad.code == kExitNetwork);
		CHECK(bad.err.find("EMPTY-USD") != std::string::npos);
	}
	SUBCASE("an unwritable destination exits 3") {
		CHECK(cli({"fetch", "--ticker", "EOS-USD", "--out", dir.string()}).code == kExitOutput);
		CHECK(cli({"fetch", "--ticker", "EOS-USD", "--out", "/dev/null/sub/eos.csv"}).code == kExitOutput);
	}
}

TEST_CASE("run writes the artifact manifest and is reproducible") {
	const auto dir = cryptolstm::test::scratch_dir("cli_run");
	const auto csv = write_series_csv(dir / "sine.csv", 150, sine);
	const auto a = cli(concat({"run"}, small_run(csv, dir / "a")));
	REQUIRE(a.code == kExitOk);
	CHECK(std::regex_search(a.out, std::regex(R"(RMSE: \d+\.\d{4} USD)")));
	CHECK(a.out.find("Training time") != std::string::npos);
	CHECK(a.out.find("Prediction time") != std::string::npos);
	for (const auto* f : {"forecast.csv", "forecast.svg", "forecast_zoomed.svg", "loss.svg", "benchmark.txt",
			 "benchmark.json", "report.json", "model.json"}) {
		CHECK_MESSAGE(fs::exists(dir / "a" / f), f);
	}
	const auto forecast = cryptolstm::test::read_all(dir / "a" / "forecast.csv");
	CHECK(forecast.rfind("date,actual_usd,predicted_usd\n", 0) == 0);
	CHECK(std::count(forecast.begin(), forecast.end(), '\n') == 31);

	const auto report = nlohmann::json::parse(cryptolstm::test::read_all(dir / "a" / "report.json"));
	CHECK(report["loss_history"].size() == 2);
	CHECK(report["config"]["seed"] == 42);
	CHECK(report["config"]["batch_size"] == 32);
	CHECK(report["data"]["test_len"] == 30);

	const auto ckpt = load_checkpoint(cryptolstm::test::read_all(dir / "a" / "model.json"));
	CHECK(ckpt.params.lstm.hidden_size == 6);

	const auto b = cli(concat({"run"}, small_run(csv, dir / "b")));
	REQUIRE(b.code == kExitOk);
	CHECK(strip_timings(cryptolstm::test::read_all(dir / "a" / "report.json")) ==
		strip_timings(cryptolstm::test::read_all(dir / "b" / "report.json")));
	for (const auto* f : {"forecast.csv", "forecast.svg", "forecast_zoomed.svg", "loss.svg", "model.json"}) {
		CHECK_MESSAGE(cryptolstm::test::read_all(dir / "a" / f) == cryptolstm::test::read_all(dir / "b" / f), f);
	}

	// A different seed changes non-timing output.
	const auto c = cli(concat(concat({"run"}, small_run(csv, dir / "c")), {"--seed", "7"}));
	REQUIRE(c.code == kExitOk);
	CHECK(cryptolstm::test::read_all(dir / "a" / "model.json") != cryptolstm::test::read_all(dir / "c" / "model.json"));
}

TEST_CASE("run: data errors exit 4, missing input and bad flags exit nonzero") {
	const auto dir = cryptolstm::test::scratch_dir("cli_errors");
	const auto flat = write_series_csv(dir / "flat.csv", 150, [](std::size_t) { return 2.5; });
	const auto r = cli(concat({"run"}, small_run(flat, dir / "out")));
	CHECK(r.code == kExitData);
	CHECK(r.err.find("DegenerateRange") != std::string::npos);

	const auto tiny = write_series_csv(dir / "tiny.csv", 20, sine);
	const auto s = cli(concat({"run"}, small_run(tiny, dir / "out")));
	CHECK(s.code == kExitData);
	CHECK(s.err.find("SeriesTooShort") != std::string::npos);

	CHECK(cli(concat({"run"}, small_run((dir / "absent.csv").string(), dir / "out"))).code == kExitFailure);
	CHECK(cli({"run", "--epochs", "zero"}).code != kExitOk);
	CHECK(cli({}).code != kExitOk);
	CHECK(cli(concat(concat({"run"}, small_run(flat, dir / "out")), {"--dropout", "1.5"})).code == kExitFailure);
}

TEST_CASE("run: an unwritable output directory exits 3") {
	const auto dir = cryptolstm::test::scratch_dir("cli_unwritable");
	const auto csv = write_series_csv(dir / "sine.csv", 150, sine);
	std::ofstream(dir / "blocker") << "x";
	CHECK(cli(concat({"run"}, small_run(csv, dir / "blocker" / "out"))).code == kExitOutput);
}

TEST_CASE("sweep on a sine wave: two rows, more epochs fit better") {
	const auto dir = cryptolstm::test::scratch_dir("cli_sweep");
	const auto csv = write_series_csv(dir / "sine.csv", 200, sine);
	auto args = concat({"sweep"}, small_run(csv, dir / "out"));
	args = concat(args, {"--epochs-list", "5,25"});
	const auto r = cli(args);
	REQUIRE(r.code == kExitOk);
	std::istringstream in(cryptolstm::test::read_all(dir / "out" / "sweep.csv"));
	std::string header, row5, row25, extra;
	std::getline(in, header);
	std::getline(in, row5);
	std::getline(in, row25);
	CHECK(header == "epochs,rmse_usd,wall_time_s");
	CHECK(!std::getline(in, extra));
	const auto rmse_of = [](const std::string& row) {
		const auto a = row.find(',');
		return std::stod(row.substr(a + 1, row.find(',', a + 1) - a - 1));
	};
	CHECK(row5.rfind("5,", 0) == 0);
	CHECK(row25.rfind("25,", 0) == 0);
	CHECK(rmse_of(row25) < rmse_of(row5));
	CHECK(cli(concat(concat({"sweep"}, small_run(csv, dir / "out")), {"--epochs-list", "5,x"})).code == kExitFailure);
}

TEST_CASE("diagnose with the persistence model reports lag 1") {
	const auto dir = cryptolstm::test::scratch_dir("cli_diagnose");
	const auto r = cli({"diagnose", "--csv", cryptolstm::test::eos_csv(), "--ticker", "EOS-USD", "--model",
		"persistence", "--out", (dir / "out").string()});
	REQUIRE(r.code == kExitOk);
	CHECK(r.out.find("model=persistence best_lag=1 ") != std::string::npos);
	const auto doc = nlohmann::json::parse(cryptolstm::test::read_all(dir / "out" / "diagnostic.json"));
	CHECK(doc["best_lag"] == 1);
	CHECK(doc["correlations"].size() == 11);
	CHECK(doc["correlation_at_best"].get<double>() > 0.999);
	CHECK(cli({"diagnose", "--model", "arima"}).code != kExitOk);
}

TEST_CASE("batch over two fixtures writes one chart pair each") {
	const auto dir = cryptolstm::test::scratch_dir("cli_batch");
	const auto r = cli({"batch", "--tickers", "EOS-USD,DOGE-USD", "--data-dir", cryptolstm::test::data_dir().string(),
		"--epochs", "1", "--hidden", "4", "--lookback", "10", "--out", dir.string()});
	REQUIRE(r.code == kExitOk);
	for (const auto* t : {"EOS-USD", "DOGE-USD"}) {
		CHECK(fs::exists(dir / t / "forecast.svg"));
		CHECK(fs::exists(dir / t / "loss.svg"));
	}
	CHECK(r.out.find("batch: 2/2 tickers succeeded") != std::string::npos);

	const auto partial = cli({"batch", "--tickers", "EOS-USD,NOPE-USD", "--data-dir",
		cryptolstm::test::data_dir().string(), "--epochs", "1", "--hidden", "4", "--lookback", "10", "--out",
		dir.string()});
	CHECK(partial.code == kExitOk);
	CHECK(partial.out.find("batch: 1/2 tickers succeeded; failed: NOPE-USD") != std::string::npos);

	const auto none = cli({"batch", "--tickers", "NOPE-USD", "--data-dir", cryptolstm::test::data_dir().string(),
		"--out", dir.string()});
	CHECK(none.code != kExitOk);
}

TEST_CASE("help documents every run flag with its default") {
	const auto r = cli({"run", "--help"});
	CHECK(r.code == kExitOk);
	for (const auto* flag : {"--ticker", "--csv", "--lookback", "--test-len", "--epochs", "--batch-size", "--hidden",
			 "--dropout", "--seed", "--learning-rate", "--out"}) {
		CHECK_MESSAGE(r.out.find(flag) != std::string::npos, flag);
	}
	for (const auto* def : {"EOS-USD", "60", "200", "50", "32", "0.2", "42", "0.001"}) {
		CHECK_MESSAGE(r.out.find(def) != std::string::npos, def);
	}
}

} // TEST_SUITE
