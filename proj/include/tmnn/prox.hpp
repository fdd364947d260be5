#pragma once

#include "tmnn/tensor.hpp"

namespace tmnn {

/// Singular value thresholding: the proximal map of tau * ||.||_* at y.
/// Returns U diag(max(sigma - tau, 0)) V^H for y = U diag(sigma) V^H.
Matrix svt(const Matrix& y, double tau);

/// Tensor singular value thresholding: the proximal map of the tensor
/// nuclear norm, tau * ||.||_TNN. Computed as per-slice SVT in the
/// temporal-DFT domain; under the unitary dft3 used here the effective
/// per-slice threshold is tau / sqrt(n3).
ComplexTensor3 tsvt(const ComplexTensor3& y, double tau);

}  // namespace tmnn
