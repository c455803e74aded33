#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cryptolstm/market_data.hpp"

namespace cryptolstm {

/// Min/max pair of a manual min-max scaler. Only constructible with
/// finite bounds and max > min.
class ScalerParams {
public:
	static ScalerParams from_bounds(double min_value, double max_value);

	double min_value() const { return min_; }
	double max_value() const { return max_; }
	double range() const { return max_ - min_; }

	double transform(double x) const { return (x - min_) / (max_ - min_); }
	double inverse(double y) const { return y * (max_ - min_) + min_; }

	bool operator==(const ScalerParams&) const = default;

private:
	ScalerParams(double lo, double hi) : min_(lo), max_(hi) {}
	double min_;
	double max_;
};

ScalerParams fit_minmax(std::span<const double> values);
std::vector<double> transform(std::span<const double> values, const ScalerParams& params);
std::vector<double> inverse_transform(std::span<const double> normalized, const ScalerParams& params);

struct SplitSpec {
	std::size_t test_len = 200;
	std::size_t lookback = 60;
};

struct ChronologicalSplit {
	std::vector<double> train;
	std::vector<double> test;
};

/// test = last test_len values, train = everything before. Requires
/// values.size() > test_len + lookback so at least one training window exists.
ChronologicalSplit chronological_split(std::span<const double> values, const SplitSpec& spec);

/// Supervised (window -> next value) pairs. inputs is stored flat,
/// row i occupying [i * lookback, (i + 1) * lookback).
struct WindowedDataset {
	std::size_t lookback = 0;
	std::vector<double> inputs;
	std::vector<double> targets;
	std::vector<Date> target_dates;

	std::size_t size() const { return targets.size(); }
	bool empty() const { return targets.empty(); }
	std::span<const double> input(std::size_t i) const {
		return std::span<const double>(inputs).subspan(i * lookback, lookback);
	}
};

/// For each target index t >= max(lookback, start_offset):
/// input = values[t - lookback, t), target = values[t]. `dates` is either
/// empty or aligned with `values`.
WindowedDataset make_windows(std::span<const double> values, std::span<const Date> dates,
	std::size_t lookback, std::size_t start_offset = 0);

/// Everything the training and prediction phases need from one close series:
/// scaler fit on the training slice only, training windows that stay inside
/// the training slice, and test windows whose inputs may reach back into it.
struct PreparedData {
	ScalerParams scaler;
	SplitSpec spec;
	std::size_t train_len = 0;
	std::vector<double> normalized;
	WindowedDataset train;
	WindowedDataset test;
};

PreparedData prepare(const PriceVector& prices, const SplitSpec& spec);

} // namespace cryptolstm
