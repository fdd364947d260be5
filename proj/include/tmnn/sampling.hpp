#pragma once

#include "tmnn/tensor.hpp"

#include <cstdint>

namespace tmnn {

/// Binary indicator of acquired Cartesian k-space locations, one value
/// per location per frame. Same index order as ComplexTensor3, with the
/// centered k-space convention of fft2_per_frame (DC at (n1/2, n2/2)).
class SamplingMask {
public:
    SamplingMask(Index n1, Index n2, Index n3)
        : n1_(n1), n2_(n2), n3_(n3), on_(static_cast<size_t>(n1 * n2 * n3), 0) {
        if (n1 <= 0 || n2 <= 0 || n3 <= 0)
            throw std::invalid_argument("SamplingMask: dimensions must be positive");
    }

    Index n1() const { return n1_; }
    Index n2() const { return n2_; }
    Index n3() const { return n3_; }

    bool at(Index i, Index j, Index t) const {
        return on_[static_cast<size_t>(i + n1_ * j + n1_ * n2_ * t)] != 0;
    }
    void set(Index i, Index j, Index t, bool v) {
        on_[static_cast<size_t>(i + n1_ * j + n1_ * n2_ * t)] = v ? 1 : 0;
    }

    Index ones_count() const;
    double ratio() const { return double(ones_count()) / double(n1_ * n2_ * n3_); }

    /// Zero out unsampled entries of x in place.
    void project(ComplexTensor3& x) const;

    /// 0/1 tensor (real parts carry the indicator).
    ComplexTensor3 to_tensor() const;
    /// Inverse of to_tensor; entries must be exactly 0 or 1.
    static SamplingMask from_tensor(const ComplexTensor3& x);

    static SamplingMask full(Index n1, Index n2, Index n3);

    bool same_shape(const ComplexTensor3& x) const {
        return n1_ == x.n1() && n2_ == x.n2() && n3_ == x.n3();
    }

private:
    Index n1_, n2_, n3_;
    std::vector<std::uint8_t> on_;
};

/// Undersampled k-space measurements stored on the full grid: entries at
/// unsampled locations are exactly zero.
struct KSpaceData {
    ComplexTensor3 grid;

    static KSpaceData from_grid(ComplexTensor3 g, const SamplingMask& mask) {
        mask.project(g);
        return {std::move(g)};
    }
};

/// Fourier sampling operator A = S o F: per-frame centered unitary FFT
/// followed by the mask projection.
KSpaceData apply_A(const ComplexTensor3& x, const SamplingMask& mask);

/// Adjoint A* = F^-1 o S (zero-filled inverse FFT).
ComplexTensor3 apply_A_star(const KSpaceData& b, const SamplingMask& mask);

/// Pseudo-radial Cartesian mask: per frame, `lines` straight lines
/// through the k-space center at angles j*pi/lines, rasterized onto the
/// grid; frame t's angles are offset by t*pi/(lines*n3) when
/// vary_per_frame is set. `seed` is accepted for interface uniformity
/// with the random generator; the construction is deterministic.
SamplingMask pseudo_radial_mask(Index n1, Index n2, Index n3, int lines, std::uint64_t seed,
                                bool vary_per_frame = true);

/// Variable-density random mask: per frame, exactly round(ratio*n1*n2)
/// locations, drawn without replacement with probability proportional to
/// (1 - r/r_max)^4 around the k-space center, plus a fully sampled 8x8
/// center block. Reproducible from `seed`; fresh draw per frame unless
/// vary_per_frame is false.
SamplingMask variable_density_mask(Index n1, Index n2, Index n3, double ratio,
                                   std::uint64_t seed, bool vary_per_frame = true);

/// Add circularly-symmetric complex Gaussian noise at sampled locations,
/// calibrated so that 20*log10(||b|| / ||noise||) = snr_db in
/// expectation. snr_db = +infinity returns b unchanged.
KSpaceData add_noise(const KSpaceData& b, const SamplingMask& mask, double snr_db,
                     std::uint64_t seed);

/// Same, with the sampled set taken to be the nonzero entries of b.
KSpaceData add_noise(const KSpaceData& b, double snr_db, std::uint64_t seed);

}  // namespace tmnn
