#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cryptolstm/forecast.hpp"
#include "cryptolstm/market_data.hpp"

namespace cryptolstm {

double rmse(std::span<const double> actual, std::span<const double> predicted);

/// Pearson correlation. Throws DegenerateVariance when either side is constant.
double pearson(std::span<const double> a, std::span<const double> b);

/// Tomorrow = today: prediction for each of the last test_len days is the
/// previous day's close.
std::vector<double> persistence_baseline(std::span<const double> closes, std::size_t test_len);

struct LagDiagnostic {
	int best_lag = 0;
	double correlation_at_best = 0.0;
	double rmse_model_usd = 0.0;
	double rmse_persistence_usd = 0.0;
	/// correlations[k] belongs to lag k - max_lag.
	std::vector<double> correlations;
};

/// For every lag l in [-max_lag, max_lag], correlates predicted[t] with
/// actual[t - l] over the overlapping region. A model that copies
/// yesterday's price peaks at l = +1. Ties go to the smaller |l|, then to
/// the positive lag. `previous_close` (the day before actual[0]) lets the
/// persistence RMSE cover the whole window; without it the first day is
/// skipped.
LagDiagnostic lag_diagnostic(std::span<const double> actual, std::span<const double> predicted,
	int max_lag = 5, std::optional<double> previous_close = std::nullopt);

struct EpochSweepRow {
	std::size_t epochs = 0;
	double rmse_usd = 0.0;
	double wall_time_s = 0.0;
};

/// Trains from one seed and reports the test RMSE after each requested
/// epoch count. Training is deterministic, so the weights after e epochs of
/// a longer run equal those of a run configured for exactly e epochs; a
/// single pass to max(epoch_counts) therefore yields every row.
/// wall_time_s is the cumulative training time up to that epoch.
std::vector<EpochSweepRow> epoch_sweep(const PriceVector& prices, std::span<const std::size_t> epoch_counts,
	const TrainConfig& config, std::size_t test_len = 200);

std::string sweep_to_csv(std::span<const EpochSweepRow> rows);

} // namespace cryptolstm
