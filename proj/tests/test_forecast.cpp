#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cryptolstm/evaluation.hpp"
#include "cryptolstm/forecast.hpp"
#include "test_support.hpp"

using namespace cryptolstm;
using cryptolstm::test::error_of;

namespace {

PriceVector sine_prices(std::size_t n, double phase = 0.0) {
	PriceVector p{"SINE", {}, {}};
	for (std::size_t k = 0; k < n; ++k) {
		p.values.push_back(10.0 + 3.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(k) / 25.0 + phase));
	}
	return p;
}

TrainConfig small_config(std::size_t epochs, std::uint64_t seed = 42) {
	TrainConfig c;
	c.epochs = epochs;
	c.lookback = 10;
	c.hidden_size = 8;
	c.batch_size = 16;
	c.seed = seed;
	return c;
}

} // namespace

TEST_SUITE("forecast") {

TEST_CASE("TrainConfig validation") {
	TrainConfig c;
	CHECK_NOTHROW(c.validate());
	c.epochs = 0;
	CHECK(error_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
	c = TrainConfig{};
	c.batch_size = 0;
	CHECK(error_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
	c = TrainConfig{};
	c.dropout = 1.0;
	CHECK(error_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("a single constant sample: loss drops after the first update") {
	WindowedDataset ds;
	ds.lookback = 4;
	ds.inputs = {0.5, 0.5, 0.5, 0.5};
	ds.targets = {0.5};
	auto c = small_config(2);
	c.lookback = 4;
	c.dropout = 0.0;
	// With one sample per epoch, epoch e's loss is evaluated at the weights
	// left by e - 1 Adam steps.
	const auto r = train(ds, c);
	REQUIRE(r.loss_history.size() == 2);
	CHECK(r.loss_history[1] < r.loss_history[0]);
}

TEST_CASE("training is deterministic for a fixed seed") {
	const auto data = prepare(sine_prices(150), SplitSpec{30, 10});
	const auto a = train(data.train, small_config(4));
	const auto b = train(data.train, small_config(4));
	CHECK(a.loss_history == b.loss_history);
	CHECK(a.params == b.params);
	const auto other = train(data.train, small_config(4, 7));
	CHECK(other.loss_history != a.loss_history);
}

TEST_CASE("weights after epoch e of a longer run equal an e-epoch run") {
	const auto data = prepare(sine_prices(150), SplitSpec{30, 10});
	NetworkParams at3;
	std::size_t calls = 0;
	train(data.train, small_config(6), [&](std::size_t epoch, const NetworkParams& p) {
		++calls;
		if (epoch == 3) at3 = p;
	});
	CHECK(calls == 6);
	CHECK(at3 == train(data.train, small_config(3)).params);
}

TEST_CASE("loss history is finite, non-negative and one entry per epoch") {
	const auto data = prepare(sine_prices(150), SplitSpec{30, 10});
	const auto r = train(data.train, small_config(5));
	CHECK(r.loss_history.size() == 5);
	for (double l : r.loss_history) CHECK((std::isfinite(l) && l >= 0.0));
}

TEST_CASE("training errors") {
	CHECK(error_of([] { train(WindowedDataset{10, {}, {}, {}}, small_config(1)); }) == ErrorCode::SeriesTooShort);
	const auto data = prepare(sine_prices(150), SplitSpec{30, 10});
	auto c = small_config(1);
	c.lookback = 11;
	CHECK(error_of([&] { train(data.train, c); }) == ErrorCode::InvalidArgument);

	auto bad = data.train;
	bad.inputs[3] = NAN;
	try {
		train(bad, small_config(1));
		FAIL("expected NonFiniteActivation");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::NonFiniteActivation);
		CHECK(std::string(e.what()).find("epoch 1, batch") != std::string::npos);
	}
}

TEST_CASE("a previous-close predictor reproduces the persistence baseline") {
	const auto prices = extract_close(load_ohlcv_csv(cryptolstm::test::eos_csv(), "EOS-USD").series);
	const auto data = prepare(prices, SplitSpec{200, 60});
	const auto r = predict_with([](std::span<const double> w) { return w.back(); }, data.test, data.scaler);
	const auto baseline = persistence_baseline(prices.values, 200);
	REQUIRE(r.predicted_usd.size() == 200);
	for (std::size_t k = 0; k < 200; ++k) {
		CHECK(std::abs(r.predicted_usd[k] - baseline[k]) <= 1e-12 * std::max(1.0, baseline[k]));
		CHECK(std::abs(r.actual_usd[k] - prices.values[prices.size() - 200 + k]) <= 1e-12 * std::max(1.0, r.actual_usd[k]));
	}
	CHECK(r.dates == data.test.target_dates);
	CHECK(std::abs(r.rmse_usd - rmse(r.actual_usd, baseline)) < 1e-12);
}

TEST_CASE("predict: empty test set and parameter immutability") {
	const auto data = prepare(sine_prices(150), SplitSpec{30, 10});
	const auto trained = train(data.train, small_config(2)).params;
	CHECK(error_of([&] { predict(trained, WindowedDataset{10, {}, {}, {}}, data.scaler); }) ==
		ErrorCode::SeriesTooShort);

	const auto before = save_checkpoint(trained, 42);
	const auto r = predict(trained, data.test, data.scaler);
	CHECK(save_checkpoint(trained, 42) == before);
	CHECK(r.actual_usd.size() == 30);
	CHECK(r.predicted_usd.size() == 30);
	CHECK(r.dates == data.test.target_dates);
	CHECK(r.rmse_usd >= 0.0);
	// Infer mode ignores dropout, so predicting twice gives identical output.
	CHECK(predict(trained, data.test, data.scaler).predicted_usd == r.predicted_usd);
}

TEST_CASE("property: median RMSE over 5 seeds improves from 5 to 25 epochs") {
	const auto prices = sine_prices(200, 0.3);
	std::vector<double> at5, at25;
	for (std::uint64_t seed = 1; seed <= 5; ++seed) {
		const std::vector<std::size_t> epochs{5, 25};
		const auto rows = epoch_sweep(prices, epochs, small_config(1, seed), 40);
		at5.push_back(rows[0].rmse_usd);
		at25.push_back(rows[1].rmse_usd);
	}
	std::sort(at5.begin(), at5.end());
	std::sort(at25.begin(), at25.end());
	CHECK(at25[2] < at5[2]);
}

} // TEST_SUITE
