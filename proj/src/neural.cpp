#include "cryptolstm/neural.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "cryptolstm/error.hpp"
#include "cryptolstm/random.hpp"

namespace cryptolstm {

namespace {

double sigmoid(double z) {
	if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
	const double e = std::exp(z);
	return e / (1.0 + e);
}

void glorot(Mat& m, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
	const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
	for (double& w : m.flat()) w = rng.uniform(-limit, limit);
}

void require_shape(bool ok, const std::string& what) {
	if (!ok) throw Error(ErrorCode::InvalidArgument, "shape mismatch: " + what);
}

template <class P, class T>
std::array<TensorView<T>, kTensorCount> make_views(P& p) {
	auto& l = p.lstm;
	const auto H = l.hidden_size;
	const auto I = l.input_size;
	return {{
		{"lstm.w_f", H, I, l.w_f.flat()}, {"lstm.w_i", H, I, l.w_i.flat()},
		{"lstm.w_g", H, I, l.w_g.flat()}, {"lstm.w_o", H, I, l.w_o.flat()},
		{"lstm.u_f", H, H, l.u_f.flat()}, {"lstm.u_i", H, H, l.u_i.flat()},
		{"lstm.u_g", H, H, l.u_g.flat()}, {"lstm.u_o", H, H, l.u_o.flat()},
		{"lstm.b_f", H, 1, std::span<T>(l.b_f)}, {"lstm.b_i", H, 1, std::span<T>(l.b_i)},
		{"lstm.b_g", H, 1, std::span<T>(l.b_g)}, {"lstm.b_o", H, 1, std::span<T>(l.b_o)},
		{"dense.weight", 1, H, std::span<T>(p.dense.weight)},
		{"dense.bias", 1, 1, std::span<T>(&p.dense.bias, 1)},
	}};
}

} // namespace

NetworkParams NetworkParams::zeros(std::size_t input_size, std::size_t hidden_size) {
	NetworkParams p;
	auto& l = p.lstm;
	l.input_size = input_size;
	l.hidden_size = hidden_size;
	for (Mat* w : {&l.w_f, &l.w_i, &l.w_g, &l.w_o}) *w = Mat(hidden_size, input_size);
	for (Mat* u : {&l.u_f, &l.u_i, &l.u_g, &l.u_o}) *u = Mat(hidden_size, hidden_size);
	for (Vec* b : {&l.b_f, &l.b_i, &l.b_g, &l.b_o}) b->assign(hidden_size, 0.0);
	p.dense.weight.assign(hidden_size, 0.0);
	p.dense.bias = 0.0;
	return p;
}

NetworkParams NetworkParams::zeros_like(const NetworkParams& like) {
	return zeros(like.lstm.input_size, like.lstm.hidden_size);
}

void NetworkParams::set_zero() {
	for (auto& t : tensors(*this)) std::fill(t.data.begin(), t.data.end(), 0.0);
}

std::array<TensorView<double>, kTensorCount> tensors(NetworkParams& params) {
	return make_views<NetworkParams, double>(params);
}

std::array<TensorView<const double>, kTensorCount> tensors(const NetworkParams& params) {
	return make_views<const NetworkParams, const double>(params);
}

std::size_t parameter_count(const NetworkParams& params) {
	std::size_t n = 0;
	for (const auto& t : tensors(params)) n += t.data.size();
	return n;
}

NetworkParams init_params(std::size_t input_size, std::size_t hidden_size, std::uint64_t seed) {
	if (input_size < 1 || hidden_size < 1) {
		throw Error(ErrorCode::InvalidArgument, "input_size and hidden_size must be >= 1");
	}
	auto p = NetworkParams::zeros(input_size, hidden_size);
	Rng rng(seed);
	auto& l = p.lstm;
	for (Mat* w : {&l.w_f, &l.w_i, &l.w_g, &l.w_o}) glorot(*w, input_size, hidden_size, rng);
	for (Mat* u : {&l.u_f, &l.u_i, &l.u_g, &l.u_o}) glorot(*u, hidden_size, hidden_size, rng);
	l.b_f.assign(hidden_size, 1.0);
	const double limit = std::sqrt(6.0 / static_cast<double>(hidden_size + 1));
	for (double& w : p.dense.weight) w = rng.uniform(-limit, limit);
	return p;
}

void lstm_forward(std::span<const double> sequence, const LstmParams& params, const DropoutConfig& dropout,
	Mode mode, LstmCache& cache) {
	const auto I = params.input_size;
	const auto H = params.hidden_size;
	require_shape(I > 0 && sequence.size() % I == 0 && !sequence.empty(), "sequence length vs input_size");
	if (!(dropout.rate >= 0.0 && dropout.rate < 1.0)) {
		throw Error(ErrorCode::InvalidArgument, "dropout rate must lie in [0, 1)");
	}
	const auto T = sequence.size() / I;
	if (cache.steps != T || cache.hidden_size != H || cache.input_size != I) {
		cache.steps = T;
		cache.input_size = I;
		cache.hidden_size = H;
		for (Mat* m : {&cache.f, &cache.i, &cache.g, &cache.o, &cache.c, &cache.tanh_c, &cache.h}) *m = Mat(T, H);
		cache.mask.assign(H, 1.0);
		cache.output.assign(H, 0.0);
	}
	cache.inputs.assign(sequence.begin(), sequence.end());

	const Vec zeros(H, 0.0);
	for (std::size_t t = 0; t < T; ++t) {
		const auto x = sequence.subspan(t * I, I);
		const std::span<const double> h_prev = t == 0 ? std::span<const double>(zeros) : cache.h.row(t - 1);
		const std::span<const double> c_prev = t == 0 ? std::span<const double>(zeros) : cache.c.row(t - 1);
		auto f = cache.f.row(t);
		auto i = cache.i.row(t);
		auto g = cache.g.row(t);
		auto o = cache.o.row(t);
		std::copy(params.b_f.begin(), params.b_f.end(), f.begin());
		std::copy(params.b_i.begin(), params.b_i.end(), i.begin());
		std::copy(params.b_g.begin(), params.b_g.end(), g.begin());
		std::copy(params.b_o.begin(), params.b_o.end(), o.begin());
		gemv_acc(params.w_f, x, f);
		gemv_acc(params.w_i, x, i);
		gemv_acc(params.w_g, x, g);
		gemv_acc(params.w_o, x, o);
		if (t > 0) {
			gemv_acc(params.u_f, h_prev, f);
			gemv_acc(params.u_i, h_prev, i);
			gemv_acc(params.u_g, h_prev, g);
			gemv_acc(params.u_o, h_prev, o);
		}
		auto c = cache.c.row(t);
		auto tc = cache.tanh_c.row(t);
		auto h = cache.h.row(t);
		for (std::size_t k = 0; k < H; ++k) {
			f[k] = sigmoid(f[k]);
			i[k] = sigmoid(i[k]);
			g[k] = std::tanh(g[k]);
			o[k] = sigmoid(o[k]);
			c[k] = f[k] * c_prev[k] + i[k] * g[k];
			tc[k] = std::tanh(c[k]);
			h[k] = o[k] * tc[k];
		}
		if (!all_finite(c) || !all_finite(h)) {
			throw Error(ErrorCode::NonFiniteActivation, "LSTM state at step " + std::to_string(t));
		}
	}

	if (mode == Mode::Train && dropout.rate > 0.0) {
		Rng rng(dropout.seed);
		const double keep_scale = 1.0 / (1.0 - dropout.rate);
		for (double& m : cache.mask) m = rng.uniform() < dropout.rate ? 0.0 : keep_scale;
	} else {
		std::fill(cache.mask.begin(), cache.mask.end(), 1.0);
	}
	const auto last = cache.h.row(T - 1);
	for (std::size_t k = 0; k < H; ++k) cache.output[k] = last[k] * cache.mask[k];
}

LstmCache lstm_forward(std::span<const double> sequence, const LstmParams& params, const DropoutConfig& dropout,
	Mode mode) {
	LstmCache cache;
	lstm_forward(sequence, params, dropout, mode, cache);
	return cache;
}

double dense_forward(std::span<const double> h, const DenseParams& params) {
	require_shape(h.size() == params.weight.size(), "dense input");
	return dot(params.weight, h) + params.bias;
}

double predict_window(std::span<const double> window, const NetworkParams& params, const DropoutConfig& dropout,
	Mode mode, LstmCache& cache) {
	lstm_forward(window, params.lstm, dropout, mode, cache);
	const double y = dense_forward(cache.output, params.dense);
	if (!std::isfinite(y)) throw Error(ErrorCode::NonFiniteActivation, "dense output");
	return y;
}

MseLoss mse_loss(std::span<const double> predictions, std::span<const double> targets) {
	if (predictions.size() != targets.size() || predictions.empty()) {
		throw Error(ErrorCode::LengthMismatch, std::to_string(predictions.size()) + " predictions vs " +
			std::to_string(targets.size()) + " targets");
	}
	const auto n = static_cast<double>(predictions.size());
	MseLoss out;
	out.grad.resize(predictions.size());
	double sum = 0.0;
	for (std::size_t k = 0; k < predictions.size(); ++k) {
		const double e = predictions[k] - targets[k];
		sum += e * e;
		out.grad[k] = 2.0 * e / n;
	}
	out.value = sum / n;
	return out;
}

void backward(const LstmCache& cache, const NetworkParams& params, double dloss, NetworkParams& grads) {
	const auto H = cache.hidden_size;
	const auto I = cache.input_size;
	const auto T = cache.steps;
	require_shape(T > 0 && H == params.lstm.hidden_size && I == params.lstm.input_size, "cache vs params");
	require_shape(grads.lstm.hidden_size == H && grads.lstm.input_size == I, "grads vs params");
	if (!std::isfinite(dloss)) throw Error(ErrorCode::NonFiniteGradient, "loss gradient");

	const auto& p = params.lstm;
	auto& g = grads.lstm;

	axpy(dloss, cache.output, grads.dense.weight);
	grads.dense.bias += dloss;

	Vec dh(H), dc(H, 0.0), dz_f(H), dz_i(H), dz_g(H), dz_o(H), dh_prev(H);
	for (std::size_t k = 0; k < H; ++k) dh[k] = dloss * params.dense.weight[k] * cache.mask[k];

	const Vec zeros(H, 0.0);
	for (std::size_t step = T; step-- > 0;) {
		const auto f = cache.f.row(step);
		const auto i = cache.i.row(step);
		const auto gg = cache.g.row(step);
		const auto o = cache.o.row(step);
		const auto tc = cache.tanh_c.row(step);
		const std::span<const double> c_prev = step == 0 ? std::span<const double>(zeros) : cache.c.row(step - 1);
		for (std::size_t k = 0; k < H; ++k) {
			dz_o[k] = dh[k] * tc[k] * o[k] * (1.0 - o[k]);
			dc[k] += dh[k] * o[k] * (1.0 - tc[k] * tc[k]);
			dz_f[k] = dc[k] * c_prev[k] * f[k] * (1.0 - f[k]);
			dz_i[k] = dc[k] * gg[k] * i[k] * (1.0 - i[k]);
			dz_g[k] = dc[k] * i[k] * (1.0 - gg[k] * gg[k]);
			dc[k] *= f[k];
		}
		const auto x = std::span<const double>(cache.inputs).subspan(step * I, I);
		ger_acc(dz_f, x, g.w_f);
		ger_acc(dz_i, x, g.w_i);
		ger_acc(dz_g, x, g.w_g);
		ger_acc(dz_o, x, g.w_o);
		axpy(1.0, dz_f, g.b_f);
		axpy(1.0, dz_i, g.b_i);
		axpy(1.0, dz_g, g.b_g);
		axpy(1.0, dz_o, g.b_o);
		if (step == 0) break;
		const auto h_prev = cache.h.row(step - 1);
		ger_acc(dz_f, h_prev, g.u_f);
		ger_acc(dz_i, h_prev, g.u_i);
		ger_acc(dz_g, h_prev, g.u_g);
		ger_acc(dz_o, h_prev, g.u_o);
		std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
		gemv_t_acc(p.u_f, dz_f, dh_prev);
		gemv_t_acc(p.u_i, dz_i, dh_prev);
		gemv_t_acc(p.u_g, dz_g, dh_prev);
		gemv_t_acc(p.u_o, dz_o, dh_prev);
		dh.swap(dh_prev);
		if (!all_finite(dh) || !all_finite(dc)) {
			throw Error(ErrorCode::NonFiniteGradient, "BPTT state at step " + std::to_string(step));
		}
	}
}

AdamState AdamState::for_params(const NetworkParams& params) {
	return AdamState{NetworkParams::zeros_like(params), NetworkParams::zeros_like(params), 0};
}

void adam_step(NetworkParams& params, const NetworkParams& grads, AdamState& state, const AdamHyper& hyper) {
	require_shape(params.lstm.hidden_size == grads.lstm.hidden_size &&
		params.lstm.input_size == grads.lstm.input_size &&
		state.m.lstm.hidden_size == params.lstm.hidden_size &&
		state.m.lstm.input_size == params.lstm.input_size, "adam buffers");
	++state.step;
	const auto t = static_cast<double>(state.step);
	const double correction1 = 1.0 - std::pow(hyper.beta1, t);
	const double correction2 = 1.0 - std::pow(hyper.beta2, t);

	auto pv = tensors(params);
	const auto gv = tensors(grads);
	auto mv = tensors(state.m);
	auto vv = tensors(state.v);
	for (std::size_t n = 0; n < kTensorCount; ++n) {
		auto w = pv[n].data;
		const auto gr = gv[n].data;
		auto m = mv[n].data;
		auto v = vv[n].data;
		for (std::size_t k = 0; k < w.size(); ++k) {
			m[k] = hyper.beta1 * m[k] + (1.0 - hyper.beta1) * gr[k];
			v[k] = hyper.beta2 * v[k] + (1.0 - hyper.beta2) * gr[k] * gr[k];
			const double m_hat = m[k] / correction1;
			const double v_hat = v[k] / correction2;
			w[k] -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
		}
	}
}

std::string save_checkpoint(const NetworkParams& params, std::uint64_t seed) {
	nlohmann::ordered_json doc;
	doc["format"] = "cryptolstm-checkpoint";
	doc["version"] = 1;
	doc["seed"] = seed;
	doc["input_size"] = params.lstm.input_size;
	doc["hidden_size"] = params.lstm.hidden_size;
	auto& list = doc["tensors"] = nlohmann::ordered_json::array();
	for (const auto& t : tensors(params)) {
		list.push_back({{"name", t.name}, {"shape", {t.rows, t.cols}},
			{"data", std::vector<double>(t.data.begin(), t.data.end())}});
	}
	return doc.dump(1) + "\n";
}

Checkpoint load_checkpoint(std::string_view text) {
	nlohmann::json doc;
	try {
		doc = nlohmann::json::parse(text);
	} catch (const nlohmann::json::exception& e) {
		throw Error(ErrorCode::IoError, std::string("checkpoint is not valid JSON: ") + e.what());
	}
	try {
		if (doc.at("format") != "cryptolstm-checkpoint" || doc.at("version") != 1) {
			throw Error(ErrorCode::IoError, "unsupported checkpoint format/version");
		}
		Checkpoint out;
		out.seed = doc.at("seed").get<std::uint64_t>();
		out.params = NetworkParams::zeros(doc.at("input_size").get<std::size_t>(), doc.at("hidden_size").get<std::size_t>());
		const auto& list = doc.at("tensors");
		auto views = tensors(out.params);
		if (list.size() != views.size()) throw Error(ErrorCode::IoError, "checkpoint tensor count mismatch");
		for (std::size_t n = 0; n < views.size(); ++n) {
			const auto& entry = list[n];
			const auto data = entry.at("data").get<std::vector<double>>();
			if (entry.at("name") != views[n].name || data.size() != views[n].data.size()) {
				throw Error(ErrorCode::IoError, "checkpoint tensor '" + std::string(views[n].name) + "' mismatch");
			}
			std::copy(data.begin(), data.end(), views[n].data.begin());
		}
		return out;
	} catch (const nlohmann::json::exception& e) {
		throw Error(ErrorCode::IoError, std::string("malformed checkpoint: ") + e.what());
	}
}

} // namespace cryptolstm
