// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit if
// any criterion fails. Optional arguments (e.g. "AC1 AC8") select a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cryptolstm/evaluation.hpp"
#include "cryptolstm/pipeline.hpp"
#include "oracles.hpp"

using namespace cryptolstm;
namespace fs = std::filesystem;

namespace {

// Tolerances and bounds.
constexpr double kGradRelTol = 1e-4;
constexpr double kGradBudgetS = 60.0;
constexpr double kRoundTripRelTol = 1e-12;
constexpr double kRoundTripBudgetS = 1.0;
constexpr double kRmse50Lo = 0.10;
constexpr double kRmse50Hi = 0.45;
constexpr double kSweepBudgetS = 30.0 * 60.0;
constexpr double kModelLagCorr = 0.9;
constexpr double kPersistenceLagCorr = 0.999;
constexpr double kTrainingBudgetS = 300.0;
constexpr double kPredictionBudgetS = 5.0;
constexpr int kWindowTrials = 200;

// Reference epoch -> RMSE (USD) values, printed alongside for comparison only.
constexpr std::pair<std::size_t, double> kReferenceSweep[] = {{5, 0.523}, {15, 0.286}, {25, 0.260}, {50, 0.235},
	{100, 0.229}};

struct Verdict {
	bool pass;
	std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
	return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
	char buf[256];
	std::snprintf(buf, sizeof(buf), f, a, b, c, d);
	return buf;
}

PriceVector eos_prices() {
	return extract_close(load_ohlcv_csv((fs::path(CRYPTOLSTM_DATA_DIR) / "EOS-USD.csv").string(), "EOS-USD").series);
}

RunConfig default_run(const fs::path& out) {
	RunConfig c;
	c.ticker = "EOS-USD";
	c.csv_path = (fs::path(CRYPTOLSTM_DATA_DIR) / "EOS-USD.csv").string();
	c.out_dir = out;
	return c;
}

/// Two default runs shared by AC4 - AC7.
struct DefaultRuns {
	RunOutcome first;
	RunOutcome second;
	fs::path dir_a;
	fs::path dir_b;
};

const DefaultRuns& default_runs() {
	static const DefaultRuns runs = [] {
		const auto root = fs::temp_directory_path() / "cryptolstm_acceptance";
		fs::remove_all(root);
		std::ostringstream log;
		DefaultRuns r{run_pipeline(default_run(root / "a"), log), run_pipeline(default_run(root / "b"), log),
			root / "a", root / "b"};
		return r;
	}();
	return runs;
}

std::string read_file(const fs::path& p) {
	std::ifstream in(p, std::ios::binary);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

Verdict ac1_gradients() {
	const auto t0 = std::chrono::steady_clock::now();
	double worst = 0.0;
	std::size_t cases = 0, entries = 0;
	for (std::uint64_t seed = 1; seed <= 10; ++seed) {
		for (std::size_t hidden : {2, 4, 8}) {
			for (std::size_t lookback : {3, 5, 10}) {
				const auto params = test::random_params(hidden, seed * 1000 + hidden * 10 + lookback);
				std::mt19937_64 gen(seed);
				std::uniform_real_distribution<double> u(0.0, 1.0);
				std::vector<double> seq(lookback);
				for (double& x : seq) x = u(gen);
				const double target = u(gen);

				LstmCache cache;
				const double pred = predict_window(seq, params, DropoutConfig{0.0, 0}, Mode::Infer, cache);
				auto grads = NetworkParams::zeros_like(params);
				backward(cache, params, 2.0 * (pred - target), grads);

				const auto check = test::finite_difference_check(params, seq, std::vector<double>(hidden, 1.0), target, grads);
				worst = std::max(worst, check.max_rel_error);
				entries += check.entries;
				++cases;
			}
		}
	}
	const double elapsed = seconds_since(t0);
	return {worst < kGradRelTol && elapsed < kGradBudgetS,
		fmt("gradient check: max rel error %.3g (< %g) over %.0f cases", worst, kGradRelTol, static_cast<double>(cases)) +
			fmt(" / %.0f entries, %.2f s (< %.0f s)", static_cast<double>(entries), elapsed, kGradBudgetS)};
}

Verdict ac2_round_trip() {
	const auto t0 = std::chrono::steady_clock::now();
	std::mt19937_64 gen(2);
	std::uniform_real_distribution<double> mag(-6.0, 6.0);
	std::uniform_int_distribution<std::size_t> len(2, 500);
	// Prices are non-negative: error relative to |v| itself. Sign-crossing
	// vectors: relative to max(|v|, range), since v - min cancels near zero.
	double worst_price = 0.0, worst_signed = 0.0;
	for (int trial = 0; trial < 1000; ++trial) {
		const bool signed_case = trial % 2 == 1;
		std::vector<double> v(len(gen));
		const double scale = std::pow(10.0, mag(gen));
		std::uniform_real_distribution<double> u(signed_case ? -scale : 0.0, scale);
		for (double& x : v) x = u(gen);
		const auto p = fit_minmax(v);
		const auto back = inverse_transform(transform(v, p), p);
		for (std::size_t k = 0; k < v.size(); ++k) {
			const double err = std::abs(back[k] - v[k]);
			if (signed_case) {
				worst_signed = std::max(worst_signed, err / std::max(std::abs(v[k]), p.range()));
			} else if (v[k] != 0.0) {
				worst_price = std::max(worst_price, err / std::abs(v[k]));
			} else {
				worst_price = std::max(worst_price, err == 0.0 ? 0.0 : 1.0);
			}
		}
	}
	const double elapsed = seconds_since(t0);
	return {worst_price <= kRoundTripRelTol && worst_signed <= kRoundTripRelTol && elapsed < kRoundTripBudgetS,
		fmt("scaler round-trip: max rel error %.3g (non-negative) / %.3g (signed, range-relative), <= %g", worst_price,
			worst_signed, kRoundTripRelTol) +
			fmt(", 1000 vectors, %.3f s (< %.0f s)", elapsed, kRoundTripBudgetS)};
}

Verdict ac3_sweep() {
	const auto t0 = std::chrono::steady_clock::now();
	const std::vector<std::size_t> epochs{5, 15, 25, 50, 100};
	const auto rows = epoch_sweep(eos_prices(), epochs, TrainConfig{}, 200);
	const double elapsed = seconds_since(t0);
	const double r5 = rows[0].rmse_usd, r15 = rows[1].rmse_usd, r25 = rows[2].rmse_usd, r50 = rows[3].rmse_usd,
				 r100 = rows[4].rmse_usd;
	for (std::size_t k = 0; k < rows.size(); ++k) {
		std::printf("       epochs %3zu: rmse %.4f USD (reference %.3f), %.1f s\n", rows[k].epochs, rows[k].rmse_usd,
			kReferenceSweep[k].second, rows[k].wall_time_s);
	}
	const bool decreasing = r5 > r15 && r15 > r25;
	const bool flattening = std::abs(r100 - r50) < 0.5 * std::abs(r25 - r5);
	const bool band = r50 >= kRmse50Lo && r50 <= kRmse50Hi;
	return {decreasing && flattening && band && elapsed < kSweepBudgetS,
		std::string("epoch sweep: ") + (decreasing ? "5>15>25 ok" : "5>15>25 VIOLATED") +
			fmt(", |r100-r50|=%.4f vs 0.5|r25-r5|=%.4f", std::abs(r100 - r50), 0.5 * std::abs(r25 - r5)) +
			fmt(", rmse(50)=%.4f in [%.2f, %.2f]", r50, kRmse50Lo, kRmse50Hi) + fmt(", %.0f s", elapsed)};
}

Verdict ac4_loss_shape() {
	const auto& loss = default_runs().first.trained.loss_history;
	const double l5 = loss.at(4), l25 = loss.at(24), l50 = loss.at(49);
	const bool lower = l50 < l5;
	const bool early = (l5 - l25) > (l25 - l50);
	return {lower && early, fmt("loss curve: loss(5)=%.3g loss(25)=%.3g loss(50)=%.3g", l5, l25, l50) +
		fmt("; drop 5->25 %.3g vs 25->50 %.3g", l5 - l25, l25 - l50)};
}

Verdict ac5_lag() {
	const auto& run = default_runs().first;
	const auto& model = run.lag;
	const auto& prices = run.loaded.prices;
	const auto baseline = persistence_baseline(prices.values, 200);
	const auto persistence = lag_diagnostic(run.forecast.actual_usd, baseline, 5);
	const bool model_ok = model.best_lag == 1 && model.correlation_at_best > kModelLagCorr;
	const bool persistence_ok = persistence.best_lag == 1 && persistence.correlation_at_best > kPersistenceLagCorr;
	std::string corr;
	for (std::size_t k = 0; k < model.correlations.size(); ++k) {
		corr += fmt(" %+.0f:%.4f", static_cast<double>(static_cast<int>(k) - 5), model.correlations[k]);
	}
	std::printf("       model correlations by lag:%s\n", corr.c_str());
	return {model_ok && persistence_ok,
		fmt("lag diagnostic: model best_lag=%+.0f r=%.4f (want +1, > %.1f)", model.best_lag, model.correlation_at_best,
			kModelLagCorr) +
			fmt("; persistence best_lag=%+.0f r=%.5f (want +1, > %.3f)", persistence.best_lag,
				persistence.correlation_at_best, kPersistenceLagCorr)};
}

Verdict ac6_benchmark() {
	const auto& b = default_runs().first.benchmark;
	const bool shape = b.rows.size() == 3 && b.rows[0].name == "Overall time" && b.rows[1].name == "Training time" &&
		b.rows[2].name == "Prediction time";
	if (!shape) return {false, "benchmark: phase table does not have the three expected rows"};
	const double training = b.rows[1].elapsed_s, prediction = b.rows[2].elapsed_s;
	std::printf("%s", format_phase_table(b).c_str());
	return {training < kTrainingBudgetS && prediction < kPredictionBudgetS,
		fmt("benchmark: 3 phase rows, training %.3f s (< %.0f), prediction %.3f s (< %.0f)", training,
			kTrainingBudgetS, prediction, kPredictionBudgetS)};
}

Verdict ac7_determinism() {
	const auto& runs = default_runs();
	auto strip = [](const std::string& text) {
		auto doc = nlohmann::ordered_json::parse(text);
		doc.erase("timings");
		return doc.dump();
	};
	const bool report = strip(read_file(runs.dir_a / "report.json")) == strip(read_file(runs.dir_b / "report.json"));
	std::vector<std::string> differing;
	for (const auto* f : {"forecast.svg", "forecast_zoomed.svg", "loss.svg"}) {
		const auto a = read_file(runs.dir_a / f);
		if (a.empty() || a != read_file(runs.dir_b / f)) differing.push_back(f);
	}
	std::string detail = std::string("determinism: report.json ") + (report ? "identical" : "DIFFERS") +
		" without timings, SVGs " + (differing.empty() ? "byte-identical" : "differ:");
	for (const auto& f : differing) detail += " " + f;
	return {report && differing.empty(), detail};
}

Verdict ac8_windows() {
	std::mt19937_64 gen(8);
	int mismatches = 0;
	for (int trial = 0; trial < kWindowTrials; ++trial) {
		const auto c = test::random_window_case(gen);
		if (!test::windows_match_oracle(c, prepare(c.prices, SplitSpec{c.test_len, c.lookback}))) ++mismatches;
	}
	return {mismatches == 0, fmt("window oracle: %.0f / %.0f random (length, lookback, test_len) cases match",
		static_cast<double>(kWindowTrials - mismatches), static_cast<double>(kWindowTrials))};
}

} // namespace

int main(int argc, char** argv) {
	const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
		{"AC1", ac1_gradients}, {"AC2", ac2_round_trip}, {"AC3", ac3_sweep}, {"AC4", ac4_loss_shape},
		{"AC5", ac5_lag}, {"AC6", ac6_benchmark}, {"AC7", ac7_determinism}, {"AC8", ac8_windows}};
	std::set<std::string> wanted(argv + 1, argv + argc);

	int failed = 0, ran = 0;
	for (const auto& [id, fn] : criteria) {
		if (!wanted.empty() && !wanted.count(id)) continue;
		++ran;
		Verdict v{false, ""};
		try {
			v = fn();
		} catch (const std::exception& e) {
			v = {false, std::string("threw: ") + e.what()};
		}
		std::printf("[%s] %s %s\n", v.pass ? "PASS" : "FAIL", id.c_str(), v.detail.c_str());
		std::fflush(stdout);
		if (!v.pass) ++failed;
	}
	std::printf("acceptance: %d/%d criteria passed\n", ran - failed, ran);
	return failed == 0 ? 0 : 1;
}
