#include "cryptolstm/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace cryptolstm {

void Mat::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double dot(std::span<const double> a, std::span<const double> b) {
	assert(a.size() == b.size());
	// Four independent partial sums break the add dependency chain; the
	// order is fixed so results stay bitwise reproducible.
	double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
	const std::size_t n = a.size();
	std::size_t k = 0;
	for (; k + 4 <= n; k += 4) {
		s0 += a[k] * b[k];
		s1 += a[k + 1] * b[k + 1];
		s2 += a[k + 2] * b[k + 2];
		s3 += a[k + 3] * b[k + 3];
	}
	for (; k < n; ++k) s0 += a[k] * b[k];
	return (s0 + s1) + (s2 + s3);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
	assert(x.size() == y.size());
	const std::size_t n = x.size();
	const double* xs = x.data();
	double* ys = y.data();
	for (std::size_t k = 0; k < n; ++k) ys[k] += alpha * xs[k];
}

void gemv_acc(const Mat& a, std::span<const double> x, std::span<double> y) {
	assert(a.cols() == x.size() && a.rows() == y.size());
	for (std::size_t r = 0; r < a.rows(); ++r) y[r] += dot(a.row(r), x);
}

void gemv_t_acc(const Mat& a, std::span<const double> x, std::span<double> y) {
	assert(a.rows() == x.size() && a.cols() == y.size());
	for (std::size_t r = 0; r < a.rows(); ++r) {
		if (x[r] != 0.0) axpy(x[r], a.row(r), y);
	}
}

void ger_acc(std::span<const double> u, std::span<const double> v, Mat& a) {
	assert(a.rows() == u.size() && a.cols() == v.size());
	for (std::size_t r = 0; r < a.rows(); ++r) {
		if (u[r] != 0.0) axpy(u[r], v, a.row(r));
	}
}

bool all_finite(std::span<const double> v) {
	return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace cryptolstm
