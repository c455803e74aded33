#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "cryptolstm/linalg.hpp"

namespace cryptolstm {

/// Single LSTM layer, gates ordered forget / input / candidate / output.
///   f = sigmoid(W_f x + U_f h + b_f)     i = sigmoid(W_i x + U_i h + b_i)
///   g = tanh(W_g x + U_g h + b_g)        o = sigmoid(W_o x + U_o h + b_o)
///   c = f * c_prev + i * g               h = o * tanh(c)
struct LstmParams {
	std::size_t input_size = 0;
	std::size_t hidden_size = 0;
	Mat w_f, w_i, w_g, w_o; // hidden x input
	Mat u_f, u_i, u_g, u_o; // hidden x hidden
	Vec b_f, b_i, b_g, b_o; // hidden

	bool operator==(const LstmParams&) const = default;
};

/// Scalar affine head: y = weight . h + bias.
struct DenseParams {
	Vec weight;
	double bias = 0.0;

	bool operator==(const DenseParams&) const = default;
};

struct NetworkParams {
	LstmParams lstm;
	DenseParams dense;

	/// Same shapes, every entry zero. Used for gradient and moment buffers.
	static NetworkParams zeros_like(const NetworkParams& like);
	static NetworkParams zeros(std::size_t input_size, std::size_t hidden_size);

	void set_zero();

	bool operator==(const NetworkParams&) const = default;
};

/// Named flat view of one parameter tensor.
template <class T>
struct TensorView {
	std::string_view name;
	std::size_t rows;
	std::size_t cols;
	std::span<T> data;
};

inline constexpr std::size_t kTensorCount = 14;

std::array<TensorView<double>, kTensorCount> tensors(NetworkParams& params);
std::array<TensorView<const double>, kTensorCount> tensors(const NetworkParams& params);

std::size_t parameter_count(const NetworkParams& params);

struct DropoutConfig {
	double rate = 0.2;
	std::uint64_t seed = 0;
};

enum class Mode { Train, Infer };

/// Glorot-uniform weights from a seeded generator; forget bias 1, all
/// other biases 0. Identical seeds give bitwise-identical parameters.
NetworkParams init_params(std::size_t input_size, std::size_t hidden_size, std::uint64_t seed);

/// Activations of every step, kept for backpropagation. Row t of each
/// matrix belongs to step t.
struct LstmCache {
	std::size_t steps = 0;
	std::size_t input_size = 0;
	std::size_t hidden_size = 0;
	Vec inputs; // steps x input_size, time-major
	Mat f, i, g, o, c, tanh_c, h;
	Vec mask;   // dropout multiplier applied to the final hidden state
	Vec output; // h[steps - 1] * mask, fed to the dense head

	std::span<const double> last_hidden() const { return h.row(steps - 1); }
};

/// Runs the layer over a time-major flattened sequence (steps x input_size)
/// from zero initial state. In Mode::Train an inverted-dropout mask drawn
/// from `dropout.seed` scales the final hidden state by 1/(1 - rate) where
/// kept; in Mode::Infer the mask is all ones. The cache is reused in place.
void lstm_forward(std::span<const double> sequence, const LstmParams& params, const DropoutConfig& dropout,
	Mode mode, LstmCache& cache);
LstmCache lstm_forward(std::span<const double> sequence, const LstmParams& params, const DropoutConfig& dropout,
	Mode mode);

double dense_forward(std::span<const double> h, const DenseParams& params);

struct MseLoss {
	double value = 0.0;
	Vec grad; // dL/dpred = 2 (pred - target) / N
};

MseLoss mse_loss(std::span<const double> predictions, std::span<const double> targets);

/// Accumulates (+=) the gradient of a loss with dL/dprediction = `dloss`
/// through the dense head, the dropout mask and every time step into `grads`.
void backward(const LstmCache& cache, const NetworkParams& params, double dloss, NetworkParams& grads);

/// Convenience: forward through LSTM and dense head.
double predict_window(std::span<const double> window, const NetworkParams& params, const DropoutConfig& dropout,
	Mode mode, LstmCache& cache);

struct AdamHyper {
	double learning_rate = 0.001;
	double beta1 = 0.9;
	double beta2 = 0.999;
	double epsilon = 1e-8;
};

struct AdamState {
	NetworkParams m;
	NetworkParams v;
	std::uint64_t step = 0;

	static AdamState for_params(const NetworkParams& params);
};

/// Bias-corrected Adam update of every parameter; increments state.step.
void adam_step(NetworkParams& params, const NetworkParams& grads, AdamState& state, const AdamHyper& hyper);

/// Versioned JSON checkpoint: shapes, seed and flat row-major arrays.
std::string save_checkpoint(const NetworkParams& params, std::uint64_t seed);

struct Checkpoint {
	NetworkParams params;
	std::uint64_t seed = 0;
};

Checkpoint load_checkpoint(std::string_view text);

} // namespace cryptolstm
