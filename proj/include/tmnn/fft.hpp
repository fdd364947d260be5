#pragma once

#include "tmnn/tensor.hpp"

namespace tmnn {

/// Unitary DFT along the third (frame) dimension, applied to every
/// length-n3 tube independently. idft3 is its exact inverse/adjoint.
/// Both use 1/sqrt(n3) scaling, so Frobenius norms are preserved.
ComplexTensor3 dft3(const ComplexTensor3& x);
ComplexTensor3 idft3(const ComplexTensor3& x);

/// Unitary 2-D DFT applied to each frame, followed by the centering
/// shift that puts DC at (n1/2, n2/2). This is the k-space convention
/// used everywhere in this library: masks are defined geometrically
/// around that center. ifft2_per_frame is the exact inverse/adjoint.
ComplexTensor3 fft2_per_frame(const ComplexTensor3& x);
ComplexTensor3 ifft2_per_frame(const ComplexTensor3& x);

}  // namespace tmnn
