#pragma once

#include "tmnn/tensor.hpp"

#include <random>

namespace testutil {

using tmnn::Complex;
using tmnn::ComplexTensor3;
using tmnn::Index;
using tmnn::Matrix;

inline ComplexTensor3 random_tensor(Index n1, Index n2, Index n3, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexTensor3 x(n1, n2, n3);
    for (Index k = 0; k < x.size(); ++k) x.data()[k] = Complex(g(rng), g(rng));
    return x;
}

inline ComplexTensor3 random_real_tensor(Index n1, Index n2, Index n3, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexTensor3 x(n1, n2, n3);
    for (Index k = 0; k < x.size(); ++k) x.data()[k] = Complex(g(rng), 0.0);
    return x;
}

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) m(r, c) = Complex(g(rng), g(rng));
    return m;
}

inline double rel_err(const ComplexTensor3& got, const ComplexTensor3& want) {
    double num = 0.0;
    for (Index k = 0; k < want.size(); ++k) num += std::norm(got.data()[k] - want.data()[k]);
    const double den = want.norm();
    return std::sqrt(num) / (den > 0 ? den : 1.0);
}

inline double rel_err(const Matrix& got, const Matrix& want) {
    const double den = want.norm();
    return (got - want).norm() / (den > 0 ? den : 1.0);
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / (std::abs(want) > 0 ? std::abs(want) : 1.0);
}

}  // namespace testutil
