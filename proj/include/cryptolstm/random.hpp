#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace cryptolstm {

/// Seeded generator with portable derived distributions. The standard
/// library distributions are implementation-defined, which would make
/// parameter bytes differ between toolchains for the same seed.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : engine_(seed) {}

	std::uint64_t next_u64() { return engine_(); }

	/// Uniform on [0, 1) with 53 random bits.
	double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

	/// Uniform integer on [0, n) by rejection, n >= 1.
	std::uint64_t below(std::uint64_t n);

	/// Fisher-Yates.
	template <class T>
	void shuffle(std::span<T> items) {
		for (std::size_t i = items.size(); i > 1; --i) {
			const auto j = static_cast<std::size_t>(below(i));
			std::swap(items[i - 1], items[j]);
		}
	}

private:
	std::mt19937_64 engine_;
};

inline std::uint64_t Rng::below(std::uint64_t n) {
	const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
	std::uint64_t x = engine_();
	while (x >= limit) x = engine_();
	return x % n;
}

/// SplitMix64 finalizer, used to derive independent stream seeds from one
/// user-facing seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
	std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
	z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
	z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
	return z ^ (z >> 31);
}

} // namespace cryptolstm
