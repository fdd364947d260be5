#pragma once

#include "tmnn/tensor.hpp"

namespace tmnn {

/// Reconstruction SNR in dB: 20*log10(||reference|| / ||estimate - reference||).
/// +infinity when the estimate matches the reference exactly.
double snr_db(const ComplexTensor3& reference, const ComplexTensor3& estimate);

/// Normalized mean squared error ||estimate - reference||^2 / ||reference||^2.
double nmse(const ComplexTensor3& reference, const ComplexTensor3& estimate);

/// Per-pixel error magnitude |estimate - reference| for one frame.
/// Callers pick a shared display scale when rendering several methods.
RealMatrix error_image(const ComplexTensor3& reference, const ComplexTensor3& estimate,
                       Index frame);

}  // namespace tmnn
