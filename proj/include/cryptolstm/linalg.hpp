#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cryptolstm {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles.
class Mat {
public:
	Mat() = default;
	Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
		: rows_(rows), cols_(cols), data_(rows * cols, fill) {}

	std::size_t rows() const { return rows_; }
	std::size_t cols() const { return cols_; }
	std::size_t size() const { return data_.size(); }

	double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
	double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

	std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
	std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

	std::span<double> flat() { return data_; }
	std::span<const double> flat() const { return data_; }

	void fill(double v);

	bool operator==(const Mat&) const = default;

private:
	std::size_t rows_ = 0;
	std::size_t cols_ = 0;
	std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// y += A x
void gemv_acc(const Mat& a, std::span<const double> x, std::span<double> y);

/// y += A^T x
void gemv_t_acc(const Mat& a, std::span<const double> x, std::span<double> y);

/// A += u v^T
void ger_acc(std::span<const double> u, std::span<const double> v, Mat& a);

bool all_finite(std::span<const double> v);

} // namespace cryptolstm
