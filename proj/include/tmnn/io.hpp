#pragma once

#include "tmnn/sampling.hpp"
#include "tmnn/tensor.hpp"

#include <stdexcept>
#include <string>

namespace tmnn {

/// Base class for tensor-file problems; subclasses distinguish the ways
/// a file can be unusable.
struct TensorIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// The file does not start with the CTN3 magic bytes.
struct BadMagicError : TensorIoError {
    using TensorIoError::TensorIoError;
};
/// Recognized container, unknown version byte.
struct UnsupportedVersionError : TensorIoError {
    using TensorIoError::TensorIoError;
};
/// Header or payload ends early (or carries trailing bytes).
struct CorruptFileError : TensorIoError {
    using TensorIoError::TensorIoError;
};

/// CTN3 container, version 1: bytes "CTN3", version u8, dims n1, n2, n3
/// as little-endian u64, then n1*n2*n3 (real, imag) float64 pairs in
/// storage order (i fastest, then j, then t). Round trips are bit-exact.
void save_tensor(const std::string& path, const ComplexTensor3& x);
ComplexTensor3 load_tensor(const std::string& path);

/// Masks travel in the same container with 0/1 real parts.
void save_mask(const std::string& path, const SamplingMask& mask);
SamplingMask load_mask(const std::string& path);

/// 8-bit binary PGM (P5). Values are clamped to [0, 255].
void write_pgm(const std::string& path, const RealMatrix& image);

/// Map a nonnegative image to 8-bit gray as round(255 * v / scale).
RealMatrix quantize_for_pgm(const RealMatrix& image, double scale);

}  // namespace tmnn
