#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cryptolstm/neural.hpp"
#include "cryptolstm/preprocess.hpp"

namespace cryptolstm {

struct TrainConfig {
	std::size_t epochs = 50;
	std::size_t batch_size = 32;
	std::size_t lookback = 60;
	std::size_t hidden_size = 50;
	double dropout = 0.2;
	std::uint64_t seed = 42;
	AdamHyper adam;

	void validate() const;
};

/// Mean training loss per epoch, normalized units.
using LossHistory = std::vector<double>;

/// Called after every completed epoch (1-based) with the current weights.
using EpochCallback = std::function<void(std::size_t epoch, const NetworkParams& params)>;

struct TrainResult {
	NetworkParams params;
	LossHistory loss_history;
};

/// Minibatch Adam training. Every epoch visits the samples in a fresh
/// seeded permutation; the last partial batch is kept. Each batch gets one
/// Adam step on the gradient of the batch mean squared error.
TrainResult train(const WindowedDataset& dataset, const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Maps one normalized lookback window to a normalized next-day prediction.
using WindowPredictor = std::function<double(std::span<const double> window)>;

struct ForecastResult {
	std::vector<Date> dates;
	std::vector<double> actual_usd;
	std::vector<double> predicted_usd;
	double rmse_usd = 0.0;
	LossHistory loss_history;
	TrainConfig config;
};

ForecastResult predict(const NetworkParams& params, const WindowedDataset& test, const ScalerParams& scaler);
ForecastResult predict_with(const WindowPredictor& model, const WindowedDataset& test, const ScalerParams& scaler);

/// Infer-mode forward over every window; does not touch the parameters.
std::vector<double> predict_normalized(const NetworkParams& params, const WindowedDataset& dataset);

} // namespace cryptolstm
