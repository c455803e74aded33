#include "cryptolstm/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cryptolstm/error.hpp"

namespace cryptolstm {

ScalerParams ScalerParams::from_bounds(double min_value, double max_value) {
	if (!std::isfinite(min_value) || !std::isfinite(max_value)) {
		throw Error(ErrorCode::InvalidArgument, "scaler bounds must be finite");
	}
	if (!(max_value > min_value)) {
		throw Error(ErrorCode::DegenerateRange, "max (" + std::to_string(max_value) +
			") must exceed min (" + std::to_string(min_value) + ")");
	}
	return ScalerParams(min_value, max_value);
}

ScalerParams fit_minmax(std::span<const double> values) {
	if (values.empty()) throw Error(ErrorCode::InvalidArgument, "cannot fit a scaler on no values");
	if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
		throw Error(ErrorCode::InvalidArgument, "cannot fit a scaler on non-finite values");
	}
	const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
	if (*lo == *hi) {
		throw Error(ErrorCode::DegenerateRange, "constant series (every value is " + std::to_string(*lo) + ")");
	}
	return ScalerParams::from_bounds(*lo, *hi);
}

std::vector<double> transform(std::span<const double> values, const ScalerParams& params) {
	std::vector<double> out(values.size());
	std::transform(values.begin(), values.end(), out.begin(), [&](double x) { return params.transform(x); });
	return out;
}

std::vector<double> inverse_transform(std::span<const double> normalized, const ScalerParams& params) {
	std::vector<double> out(normalized.size());
	std::transform(normalized.begin(), normalized.end(), out.begin(), [&](double y) { return params.inverse(y); });
	return out;
}

ChronologicalSplit chronological_split(std::span<const double> values, const SplitSpec& spec) {
	if (spec.test_len < 1 || spec.lookback < 1) {
		throw Error(ErrorCode::InvalidArgument, "test_len and lookback must be >= 1");
	}
	if (values.size() <= spec.test_len + spec.lookback) {
		throw Error(ErrorCode::SeriesTooShort, std::to_string(values.size()) + " values cannot cover test_len " +
			std::to_string(spec.test_len) + " plus lookback " + std::to_string(spec.lookback));
	}
	const auto cut = values.size() - spec.test_len;
	return {std::vector<double>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(cut)),
		std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(cut), values.end())};
}

WindowedDataset make_windows(std::span<const double> values, std::span<const Date> dates,
	std::size_t lookback, std::size_t start_offset) {
	if (lookback < 1) throw Error(ErrorCode::InvalidArgument, "lookback must be >= 1");
	if (!dates.empty() && dates.size() != values.size()) {
		throw Error(ErrorCode::LengthMismatch, "dates and values differ in length");
	}
	if (values.size() <= lookback) {
		throw Error(ErrorCode::SeriesTooShort, std::to_string(values.size()) +
			" values leave no target for lookback " + std::to_string(lookback));
	}
	WindowedDataset out;
	out.lookback = lookback;
	const auto first = std::max(lookback, start_offset);
	if (first >= values.size()) return out;
	const auto count = values.size() - first;
	out.inputs.reserve(count * lookback);
	out.targets.reserve(count);
	for (auto t = first; t < values.size(); ++t) {
		out.inputs.insert(out.inputs.end(), values.begin() + static_cast<std::ptrdiff_t>(t - lookback),
			values.begin() + static_cast<std::ptrdiff_t>(t));
		out.targets.push_back(values[t]);
		if (!dates.empty()) out.target_dates.push_back(dates[t]);
	}
	return out;
}

PreparedData prepare(const PriceVector& prices, const SplitSpec& spec) {
	const auto split = chronological_split(prices.values, spec);
	PreparedData out{fit_minmax(split.train), spec, split.train.size(), {}, {}, {}};
	out.normalized = transform(prices.values, out.scaler);
	const std::span<const double> all(out.normalized);
	const std::span<const Date> dates(prices.dates);
	out.train = make_windows(all.first(out.train_len), dates.empty() ? dates : dates.first(out.train_len), spec.lookback);
	out.test = make_windows(all, dates, spec.lookback, out.train_len);
	return out;
}

} // namespace cryptolstm
