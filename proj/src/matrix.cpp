#include "l2v/matrix.hpp"

#include <cmath>
#include <string>

#include "l2v/error.hpp"

namespace l2v {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        fail(ErrorKind::dimension, "matrix data holds " + std::to_string(data_.size()) +
                                       " values, expected " + std::to_string(rows_ * cols_));
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        fail(ErrorKind::dimension, "dot: lengths " + std::to_string(a.size()) + " and " +
                                       std::to_string(b.size()) + " differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

}  // namespace l2v
