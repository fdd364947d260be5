#pragma once

#include "tmnn/tensor.hpp"

#include <cstdint>

namespace tmnn {

enum class PhantomKind { cine, perfusion };

/// Parameters for the synthetic dynamic phantoms. Both generators are
/// deterministic functions of this struct; the seed jitters geometry
/// (centers, axes, phase coefficients) so different seeds give distinct
/// but statistically similar data.
struct PhantomSpec {
    PhantomKind kind = PhantomKind::cine;
    Index n1 = 64;
    Index n2 = 64;
    Index n3 = 10;
    std::uint64_t seed = 1;
    double motion_amplitude = 0.1;  // cine: relative chamber radius swing
    double uptake_rate = 1.0;       // perfusion: contrast enhancement scale

    /// Kind-appropriate default dimensions.
    static PhantomSpec defaults(PhantomKind k);

    void validate() const;
};

/// Beating-heart stand-in: static elliptical anatomy plus an inner
/// chamber whose radius swings sinusoidally over the frame cycle, all
/// under a smooth static phase map. Built from three spatial profiles
/// paired with the temporal functions {1, sin, cos of twice the phase},
/// so the Casorati rank is exactly 3 (1 when motion_amplitude = 0).
ComplexTensor3 make_cine_phantom(const PhantomSpec& spec);

/// Contrast-uptake stand-in: static anatomy plus two smooth regions that
/// brighten along a shared gamma-variate curve, under a smooth static
/// phase. Casorati rank exactly 2 (1 when uptake_rate = 0).
ComplexTensor3 make_perfusion_phantom(const PhantomSpec& spec);

/// Dispatch on spec.kind.
ComplexTensor3 make_phantom(const PhantomSpec& spec);

}  // namespace tmnn
