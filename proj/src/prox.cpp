#include "tmnn/prox.hpp"

#include "tmnn/fft.hpp"
#include "tmnn/tsvd.hpp"

#include <cmath>
#include <stdexcept>

namespace tmnn {

Matrix svt(const Matrix& y, double tau) {
    if (!(tau > 0)) throw std::invalid_argument("svt: tau must be positive");
    detail::SvdEcon svd = detail::svd_econ(y);

    const double floor = 1e-14 * (svd.sigma.size() > 0 ? svd.sigma(0) : 0.0);
    Index rank = 0;
    for (Index i = 0; i < svd.sigma.size(); ++i) {
        const double s = svd.sigma(i) <= floor ? 0.0 : svd.sigma(i);
        if (s > tau)
            ++rank;
        else
            break;  // nonincreasing
    }
    if (rank == 0) return Matrix::Zero(y.rows(), y.cols());
    Eigen::VectorXd kept = svd.sigma.head(rank).array() - tau;
    return svd.u.leftCols(rank) * kept.asDiagonal() * svd.v.leftCols(rank).adjoint();
}

ComplexTensor3 tsvt(const ComplexTensor3& y, double tau) {
    if (!(tau > 0)) throw std::invalid_argument("tsvt: tau must be positive");
    const double slice_tau = tau / std::sqrt(double(y.n3()));
    ComplexTensor3 yh = dft3(y);
    for (Index k = 0; k < y.n3(); ++k)
        yh.frontal_slice(k) = svt(yh.frontal_slice(k), slice_tau);
    return idft3(yh);
}

}  // namespace tmnn
