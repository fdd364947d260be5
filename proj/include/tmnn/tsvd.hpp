#pragma once

#include "tmnn/tensor.hpp"

#include <vector>

namespace tmnn {

/// Factors of the t-SVD  x = u * s * v^H  (economy size, r = min(n1, n2)):
/// u is n1 x r x n3, s is r x r x n3, v is n2 x r x n3. Every frontal
/// slice of s is diagonal. The singular values live in the temporal-DFT
/// domain, where each slice of dft3(s) has a real, nonnegative,
/// nonincreasing diagonal; for complex input the image-domain entries of
/// s are complex in general.
struct TSvdFactors {
    ComplexTensor3 u;
    ComplexTensor3 s;
    ComplexTensor3 v;

    /// Per-spectral-slice singular values: spectral_sigma[k] is the
    /// diagonal of slice k of dft3(s), scaled back to unnormalized-DFT
    /// magnitudes (the scale that matches the bcirc definition).
    std::vector<Eigen::VectorXd> spectral_sigma;
};

/// Block circulant matrix of x, shape (n1*n3) x (n2*n3): block (r, c)
/// is frontal slice ((r - c) mod n3).
Matrix bcirc(const ComplexTensor3& x);

/// Frontal slices of dft3(x), the diagonal blocks of the spectral
/// block-diagonalization of bcirc(x), up to the unitary DFT scaling.
std::vector<Matrix> bdiag_spectral(const ComplexTensor3& x);

/// Tensor-tensor product (a is n1 x k x n3, b is k x n2 x n3), computed
/// slicewise in the temporal-DFT domain. Equivalent to folding
/// bcirc(a) times the mode-1 stacking of b.
ComplexTensor3 t_product(const ComplexTensor3& a, const ComplexTensor3& b);

/// Slicewise conjugate transpose combined with the circulant index
/// reversal, so that t_product(x, conj_transpose(x)) matches
/// bcirc(x) * bcirc(x)^H.
ComplexTensor3 conj_transpose(const ComplexTensor3& x);

/// Identity element of the t-product for square k x k slices: identity
/// matrix on the first frontal slice, zero elsewhere.
ComplexTensor3 t_identity(Index k, Index n3);

/// Economy t-SVD via per-slice SVDs in the temporal-DFT domain.
TSvdFactors t_svd(const ComplexTensor3& x);

/// Tensor nuclear norm: (1/n3) * nuclear norm of bcirc(x), evaluated
/// spectrally without forming the block-circulant matrix.
double tnn(const ComplexTensor3& x);

/// Nuclear norm of the Casorati (mode-3 unfolding) matrix.
double casorati_nn(const ComplexTensor3& x);

namespace detail {

struct SvdEcon {
    Matrix u;
    Eigen::VectorXd sigma;
    Matrix v;
};

/// Thin SVD with QR preconditioning for strongly rectangular inputs.
SvdEcon svd_econ(const Matrix& m);

/// Singular values only (descending).
Eigen::VectorXd singular_values(const Matrix& m);

}  // namespace detail

}  // namespace tmnn
