#include "cryptolstm/forecast.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cryptolstm/error.hpp"
#include "cryptolstm/evaluation.hpp"
#include "cryptolstm/random.hpp"

namespace cryptolstm {

namespace {

// Independent random streams derived from the single user seed.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kDropoutStream = 2;

} // namespace

void TrainConfig::validate() const {
	if (epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs must be >= 1");
	if (batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
	if (lookback < 1) throw Error(ErrorCode::InvalidArgument, "lookback must be >= 1");
	if (hidden_size < 1) throw Error(ErrorCode::InvalidArgument, "hidden_size must be >= 1");
	if (!(dropout >= 0.0 && dropout < 1.0)) throw Error(ErrorCode::InvalidArgument, "dropout must lie in [0, 1)");
	if (!(adam.learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be > 0");
}

TrainResult train(const WindowedDataset& dataset, const TrainConfig& config, const EpochCallback& on_epoch) {
	config.validate();
	if (dataset.empty()) throw Error(ErrorCode::SeriesTooShort, "training set has no windows");
	if (dataset.lookback != config.lookback) {
		throw Error(ErrorCode::InvalidArgument, "dataset lookback " + std::to_string(dataset.lookback) +
			" differs from config lookback " + std::to_string(config.lookback));
	}

	TrainResult out{init_params(1, config.hidden_size, mix_seed(config.seed, kInitStream)), {}};
	auto& params = out.params;
	auto grads = NetworkParams::zeros_like(params);
	auto adam = AdamState::for_params(params);
	Rng order_rng(mix_seed(config.seed, kShuffleStream));
	Rng dropout_rng(mix_seed(config.seed, kDropoutStream));
	LstmCache cache;

	std::vector<std::size_t> order(dataset.size());
	std::iota(order.begin(), order.end(), std::size_t{0});

	for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
		order_rng.shuffle(std::span<std::size_t>(order));
		double loss_sum = 0.0;
		for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
			const auto end = std::min(order.size(), begin + config.batch_size);
			const auto n = static_cast<double>(end - begin);
			grads.set_zero();
			for (auto k = begin; k < end; ++k) {
				const auto idx = order[k];
				const DropoutConfig dropout{config.dropout, dropout_rng.next_u64()};
				double pred = 0.0;
				try {
					pred = predict_window(dataset.input(idx), params, dropout, Mode::Train, cache);
					const double err = pred - dataset.targets[idx];
					loss_sum += err * err;
					backward(cache, params, 2.0 * err / n, grads);
				} catch (const Error& e) {
					throw Error(e.code(), "epoch " + std::to_string(epoch) + ", batch " +
						std::to_string(begin / config.batch_size) + ": " + e.detail());
				}
			}
			for (const auto& t : tensors(grads)) {
				if (!all_finite(t.data)) {
					throw Error(ErrorCode::NonFiniteGradient, "epoch " + std::to_string(epoch) + ", batch " +
						std::to_string(begin / config.batch_size) + ": " + std::string(t.name));
				}
			}
			adam_step(params, grads, adam, config.adam);
		}
		out.loss_history.push_back(loss_sum / static_cast<double>(dataset.size()));
		if (on_epoch) on_epoch(epoch, params);
	}
	return out;
}

std::vector<double> predict_normalized(const NetworkParams& params, const WindowedDataset& dataset) {
	std::vector<double> out;
	out.reserve(dataset.size());
	LstmCache cache;
	const DropoutConfig no_dropout{0.0, 0};
	for (std::size_t k = 0; k < dataset.size(); ++k) {
		out.push_back(predict_window(dataset.input(k), params, no_dropout, Mode::Infer, cache));
	}
	return out;
}

ForecastResult predict_with(const WindowPredictor& model, const WindowedDataset& test, const ScalerParams& scaler) {
	if (test.empty()) throw Error(ErrorCode::SeriesTooShort, "test set has no windows");
	std::vector<double> normalized;
	normalized.reserve(test.size());
	for (std::size_t k = 0; k < test.size(); ++k) normalized.push_back(model(test.input(k)));
	ForecastResult out;
	out.dates = test.target_dates;
	out.actual_usd = inverse_transform(test.targets, scaler);
	out.predicted_usd = inverse_transform(normalized, scaler);
	out.rmse_usd = rmse(out.actual_usd, out.predicted_usd);
	return out;
}

ForecastResult predict(const NetworkParams& params, const WindowedDataset& test, const ScalerParams& scaler) {
	if (test.empty()) throw Error(ErrorCode::SeriesTooShort, "test set has no windows");
	ForecastResult out;
	out.dates = test.target_dates;
	out.actual_usd = inverse_transform(test.targets, scaler);
	out.predicted_usd = inverse_transform(predict_normalized(params, test), scaler);
	out.rmse_usd = rmse(out.actual_usd, out.predicted_usd);
	return out;
}

} // namespace cryptolstm
