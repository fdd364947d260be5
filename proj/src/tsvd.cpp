#include "tmnn/tsvd.hpp"

#include "tmnn/fft.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <string>

namespace tmnn {
namespace detail {
namespace {

SvdEcon svd_square_ish(const Matrix& m) {
    // BDCSVD falls back to Jacobi internally below its blocking threshold.
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("svd_econ: SVD failed to converge");
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

// Tall case: QR first, then a small dense SVD of R.
SvdEcon svd_tall(const Matrix& m) {
    const Index n = m.cols();
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("svd_econ: SVD failed to converge");
    Matrix q_thin = qr.householderQ() * Matrix::Identity(m.rows(), n);
    return {q_thin * svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

}  // namespace

SvdEcon svd_econ(const Matrix& m) {
    if (m.rows() >= 3 * m.cols()) return svd_tall(m);
    if (m.cols() >= 3 * m.rows()) {
        SvdEcon s = svd_tall(m.adjoint());
        return {std::move(s.v), std::move(s.sigma), std::move(s.u)};
    }
    return svd_square_ish(m);
}

Eigen::VectorXd singular_values(const Matrix& m) {
    if (m.rows() >= 3 * m.cols() || m.cols() >= 3 * m.rows()) {
        const bool tall = m.rows() >= m.cols();
        const Matrix& t = tall ? m : Matrix(m.adjoint());
        const Index n = t.cols();
        Eigen::HouseholderQR<Matrix> qr(t);
        Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
        return Eigen::JacobiSVD<Matrix>(r).singularValues();
    }
    return Eigen::BDCSVD<Matrix>(m).singularValues();
}

}  // namespace detail

Matrix bcirc(const ComplexTensor3& x) {
    const Index n1 = x.n1(), n2 = x.n2(), n3 = x.n3();
    Matrix b(n1 * n3, n2 * n3);
    for (Index r = 0; r < n3; ++r)
        for (Index c = 0; c < n3; ++c) {
            const Index k = ((r - c) % n3 + n3) % n3;
            b.block(r * n1, c * n2, n1, n2) = x.frontal_slice(k);
        }
    return b;
}

std::vector<Matrix> bdiag_spectral(const ComplexTensor3& x) {
    const ComplexTensor3 xh = dft3(x);
    std::vector<Matrix> blocks;
    blocks.reserve(static_cast<size_t>(x.n3()));
    for (Index k = 0; k < x.n3(); ++k) blocks.emplace_back(xh.frontal_slice(k));
    return blocks;
}

ComplexTensor3 t_product(const ComplexTensor3& a, const ComplexTensor3& b) {
    if (a.n3() != b.n3()) throw std::invalid_argument("t_product: n3 mismatch");
    if (a.n2() != b.n1()) throw std::invalid_argument("t_product: inner dimension mismatch");
    const ComplexTensor3 ah = dft3(a);
    const ComplexTensor3 bh = dft3(b);
    // With unitary dft3, slicewise products pick up a sqrt(n3) factor so the
    // result matches the block-circulant definition.
    const double scale = std::sqrt(double(a.n3()));
    ComplexTensor3 ch(a.n1(), b.n2(), a.n3());
    for (Index k = 0; k < a.n3(); ++k)
        ch.frontal_slice(k) = scale * (ah.frontal_slice(k) * bh.frontal_slice(k));
    return idft3(ch);
}

ComplexTensor3 conj_transpose(const ComplexTensor3& x) {
    const Index n3 = x.n3();
    ComplexTensor3 y(x.n2(), x.n1(), n3);
    y.frontal_slice(0) = x.frontal_slice(0).adjoint();
    for (Index t = 1; t < n3; ++t) y.frontal_slice(t) = x.frontal_slice(n3 - t).adjoint();
    return y;
}

ComplexTensor3 t_identity(Index k, Index n3) {
    ComplexTensor3 id(k, k, n3);
    id.frontal_slice(0) = Matrix::Identity(k, k);
    return id;
}

TSvdFactors t_svd(const ComplexTensor3& x) {
    const Index n3 = x.n3();
    const Index r = std::min(x.n1(), x.n2());
    const double inv_sqrt_n3 = 1.0 / std::sqrt(double(n3));

    const ComplexTensor3 xh = dft3(x);
    ComplexTensor3 uh(x.n1(), r, n3), sh(r, r, n3), vh(x.n2(), r, n3);
    TSvdFactors f;
    f.spectral_sigma.reserve(static_cast<size_t>(n3));
    for (Index k = 0; k < n3; ++k) {
        detail::SvdEcon svd;
        try {
            svd = detail::svd_econ(xh.frontal_slice(k));
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("t_svd: spectral slice " + std::to_string(k) + ": " + e.what());
        }
        // Scaling such that u, s, v match the classical image-domain
        // factors and u * s * v^H reproduces x under this t_product.
        uh.frontal_slice(k) = svd.u * inv_sqrt_n3;
        sh.frontal_slice(k) = svd.sigma.template cast<Complex>().asDiagonal();
        vh.frontal_slice(k) = svd.v * inv_sqrt_n3;
        // Unnormalized-DFT magnitudes, the scale of the bcirc singular values.
        f.spectral_sigma.push_back(svd.sigma * std::sqrt(double(n3)));
    }
    f.u = idft3(uh);
    f.s = idft3(sh);
    f.v = idft3(vh);
    return f;
}

double tnn(const ComplexTensor3& x) {
    const ComplexTensor3 xh = dft3(x);
    double sum = 0.0;
    for (Index k = 0; k < x.n3(); ++k)
        sum += detail::singular_values(xh.frontal_slice(k)).sum();
    // (1/n3)*||bcirc||_* with unitary slices scaled back by sqrt(n3).
    return sum / std::sqrt(double(x.n3()));
}

double casorati_nn(const ComplexTensor3& x) {
    return detail::singular_values(x.casorati()).sum();
}

}  // namespace tmnn
