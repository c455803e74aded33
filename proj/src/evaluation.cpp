#include "cryptolstm/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "cryptolstm/error.hpp"

namespace cryptolstm {

double rmse(std::span<const double> actual, std::span<const double> predicted) {
	if (actual.size() != predicted.size() || actual.empty()) {
		throw Error(ErrorCode::LengthMismatch, std::to_string(actual.size()) + " actual vs " +
			std::to_string(predicted.size()) + " predicted");
	}
	double sum = 0.0;
	for (std::size_t k = 0; k < actual.size(); ++k) {
		const double e = actual[k] - predicted[k];
		sum += e * e;
	}
	return std::sqrt(sum / static_cast<double>(actual.size()));
}

double pearson(std::span<const double> a, std::span<const double> b) {
	if (a.size() != b.size() || a.size() < 2) {
		throw Error(ErrorCode::LengthMismatch, "pearson needs two equal slices of length >= 2");
	}
	const auto n = static_cast<double>(a.size());
	double mean_a = 0.0, mean_b = 0.0;
	for (std::size_t k = 0; k < a.size(); ++k) {
		mean_a += a[k];
		mean_b += b[k];
	}
	mean_a /= n;
	mean_b /= n;
	double sab = 0.0, saa = 0.0, sbb = 0.0;
	for (std::size_t k = 0; k < a.size(); ++k) {
		const double da = a[k] - mean_a;
		const double db = b[k] - mean_b;
		sab += da * db;
		saa += da * da;
		sbb += db * db;
	}
	if (saa == 0.0 || sbb == 0.0) throw Error(ErrorCode::DegenerateVariance, "constant slice in correlation");
	return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> persistence_baseline(std::span<const double> closes, std::size_t test_len) {
	if (test_len < 1 || closes.size() < test_len + 1) {
		throw Error(ErrorCode::SeriesTooShort, std::to_string(closes.size()) +
			" closes cannot supply a previous day for " + std::to_string(test_len) + " test days");
	}
	const auto first = closes.size() - test_len;
	return std::vector<double>(closes.begin() + static_cast<std::ptrdiff_t>(first - 1), closes.end() - 1);
}

LagDiagnostic lag_diagnostic(std::span<const double> actual, std::span<const double> predicted, int max_lag,
	std::optional<double> previous_close) {
	if (actual.size() != predicted.size()) {
		throw Error(ErrorCode::LengthMismatch, "actual and predicted differ in length");
	}
	if (max_lag < 0 || actual.size() <= 2 * static_cast<std::size_t>(max_lag)) {
		throw Error(ErrorCode::SeriesTooShort, "need more than 2 * max_lag points");
	}
	const auto n = actual.size();
	LagDiagnostic out;
	bool have_best = false;
	for (int lag = -max_lag; lag <= max_lag; ++lag) {
		const auto shift = static_cast<std::size_t>(std::abs(lag));
		const auto len = n - shift;
		// lag > 0: predicted[t] vs actual[t - lag]
		const auto pred = lag >= 0 ? predicted.subspan(shift, len) : predicted.first(len);
		const auto act = lag >= 0 ? actual.first(len) : actual.subspan(shift, len);
		const double r = pearson(pred, act);
		out.correlations.push_back(r);
		const bool better = !have_best || r > out.correlation_at_best ||
			(r == out.correlation_at_best && (std::abs(lag) < std::abs(out.best_lag) ||
				(std::abs(lag) == std::abs(out.best_lag) && lag > out.best_lag)));
		if (better) {
			out.best_lag = lag;
			out.correlation_at_best = r;
			have_best = true;
		}
	}
	out.rmse_model_usd = rmse(actual, predicted);
	if (previous_close) {
		std::vector<double> baseline{*previous_close};
		baseline.insert(baseline.end(), actual.begin(), actual.end() - 1);
		out.rmse_persistence_usd = rmse(actual, baseline);
	} else {
		out.rmse_persistence_usd = rmse(actual.subspan(1), actual.first(n - 1));
	}
	return out;
}

std::vector<EpochSweepRow> epoch_sweep(const PriceVector& prices, std::span<const std::size_t> epoch_counts,
	const TrainConfig& config, std::size_t test_len) {
	if (epoch_counts.empty()) throw Error(ErrorCode::InvalidArgument, "epoch list is empty");
	for (auto e : epoch_counts) {
		if (e < 1) throw Error(ErrorCode::InvalidArgument, "epoch counts must be >= 1");
	}
	const auto data = prepare(prices, SplitSpec{test_len, config.lookback});
	auto run = config;
	run.epochs = *std::max_element(epoch_counts.begin(), epoch_counts.end());

	std::map<std::size_t, EpochSweepRow> at_epoch;
	for (auto e : epoch_counts) at_epoch[e] = EpochSweepRow{e, 0.0, 0.0};
	using clock = std::chrono::steady_clock;
	clock::duration excluded{0};
	const auto t0 = clock::now();
	train(data.train, run, [&](std::size_t epoch, const NetworkParams& params) {
		const auto it = at_epoch.find(epoch);
		if (it == at_epoch.end()) return;
		const auto t_eval = clock::now();
		it->second.wall_time_s = std::chrono::duration<double>(t_eval - t0 - excluded).count();
		it->second.rmse_usd = predict(params, data.test, data.scaler).rmse_usd;
		excluded += clock::now() - t_eval;
	});

	std::vector<EpochSweepRow> rows;
	rows.reserve(epoch_counts.size());
	for (auto e : epoch_counts) rows.push_back(at_epoch.at(e));
	return rows;
}

std::string sweep_to_csv(std::span<const EpochSweepRow> rows) {
	std::string out = "epochs,rmse_usd,wall_time_s\n";
	char buf[128];
	for (const auto& r : rows) {
		std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.3f\n", r.epochs, r.rmse_usd, r.wall_time_s);
		out += buf;
	}
	return out;
}

} // namespace cryptolstm
