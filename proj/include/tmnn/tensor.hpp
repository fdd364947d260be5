#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmnn {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Dense complex 3-way array of shape n1 x n2 x n3.
///
/// Storage convention (shared by every module in this library): entry
/// (i, j, t) lives at data[i + n1*j + n1*n2*t]. Each frontal slice
/// (frame) is therefore a contiguous column-major n1 x n2 matrix, and
/// vectorizing a frame in storage order is exactly its column-major
/// vectorization. This is also what makes the Casorati view below a
/// plain reshape.
class ComplexTensor3 {
public:
    ComplexTensor3() = default;

    ComplexTensor3(Index n1, Index n2, Index n3)
        : n1_(n1), n2_(n2), n3_(n3), data_(static_cast<size_t>(check_dims(n1, n2, n3))) {}

    Index n1() const { return n1_; }
    Index n2() const { return n2_; }
    Index n3() const { return n3_; }
    Index size() const { return n1_ * n2_ * n3_; }

    Complex& operator()(Index i, Index j, Index t) {
        return data_[static_cast<size_t>(i + n1_ * j + n1_ * n2_ * t)];
    }
    const Complex& operator()(Index i, Index j, Index t) const {
        return data_[static_cast<size_t>(i + n1_ * j + n1_ * n2_ * t)];
    }

    Complex* data() { return data_.data(); }
    const Complex* data() const { return data_.data(); }

    /// Frame t as an n1 x n2 matrix view (no copy).
    Eigen::Map<Matrix> frontal_slice(Index t) {
        check_frame(t);
        return Eigen::Map<Matrix>(data() + n1_ * n2_ * t, n1_, n2_);
    }
    Eigen::Map<const Matrix> frontal_slice(Index t) const {
        check_frame(t);
        return Eigen::Map<const Matrix>(data() + n1_ * n2_ * t, n1_, n2_);
    }

    /// Casorati view: the (n1*n2) x n3 matrix whose column t is frame t
    /// vectorized in storage order. Same memory, no copy.
    Eigen::Map<Matrix> casorati() {
        return Eigen::Map<Matrix>(data(), n1_ * n2_, n3_);
    }
    Eigen::Map<const Matrix> casorati() const {
        return Eigen::Map<const Matrix>(data(), n1_ * n2_, n3_);
    }

    /// Whole buffer as one flat vector view.
    Eigen::Map<Eigen::VectorXcd> flat() {
        return Eigen::Map<Eigen::VectorXcd>(data(), size());
    }
    Eigen::Map<const Eigen::VectorXcd> flat() const {
        return Eigen::Map<const Eigen::VectorXcd>(data(), size());
    }

    double norm() const { return flat().norm(); }

    bool same_shape(const ComplexTensor3& o) const {
        return n1_ == o.n1_ && n2_ == o.n2_ && n3_ == o.n3_;
    }

    bool all_finite() const {
        for (const Complex& c : data_)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        return true;
    }

    friend bool operator==(const ComplexTensor3& a, const ComplexTensor3& b) {
        return a.n1_ == b.n1_ && a.n2_ == b.n2_ && a.n3_ == b.n3_ && a.data_ == b.data_;
    }

private:
    static Index check_dims(Index n1, Index n2, Index n3) {
        if (n1 <= 0 || n2 <= 0 || n3 <= 0)
            throw std::invalid_argument("ComplexTensor3: dimensions must be positive");
        return n1 * n2 * n3;
    }
    void check_frame(Index t) const {
        if (t < 0 || t >= n3_) throw std::out_of_range("ComplexTensor3: frame index out of range");
    }

    Index n1_ = 0, n2_ = 0, n3_ = 0;
    std::vector<Complex> data_;
};

/// Mode-3 unfolding (Casorati matrix): column t is frame t vectorized
/// column-major. Returns a copy; casorati() is the in-place view.
inline Matrix mode3_unfold(const ComplexTensor3& x) {
    return x.casorati();
}

/// Inverse of mode3_unfold. The matrix must be (n1*n2) x n3.
inline ComplexTensor3 mode3_fold(const Matrix& m, Index n1, Index n2, Index n3) {
    if (m.rows() != n1 * n2 || m.cols() != n3)
        throw std::invalid_argument("mode3_fold: matrix shape inconsistent with (n1, n2, n3)");
    ComplexTensor3 x(n1, n2, n3);
    x.casorati() = m;
    return x;
}

inline void check_same_shape(const ComplexTensor3& a, const ComplexTensor3& b, const char* what) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace tmnn
