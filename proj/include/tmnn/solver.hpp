#pragma once

#include "tmnn/sampling.hpp"
#include "tmnn/tensor.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace tmnn {

enum class SolverVariant { image_domain, kspace_fast };

/// Weights, penalties, and stopping rule for the ADMM solvers. Setting
/// lambda1 = 0 or lambda2 = 0 yields the MNN-only / TNN-only baselines;
/// both zero is refused unless allow_pure_data_consistency is set.
struct SolverConfig {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    /// Penalty parameters. Unset means 1e-2 * mean magnitude of the
    /// zero-filled reconstruction A*(b), computed per solve.
    std::optional<double> mu1;
    std::optional<double> mu2;
    int max_iters = 200;
    double rel_tol = 1e-4;
    SolverVariant variant = SolverVariant::image_domain;
    bool allow_pure_data_consistency = false;

    void validate() const;
};

/// One full ADMM iterate. In the fast variant every member lives in
/// k-space (x is X-hat and so on); the image-domain solver stores plain
/// image-domain variables.
struct SolverState {
    ComplexTensor3 x;
    ComplexTensor3 z;
    Matrix m;   // Casorati shaped, (n1*n2) x n3
    ComplexTensor3 w1;
    Matrix w2;  // Casorati shaped
    int iter = 0;
};

/// Observer called once per completed iteration; used for tracing and
/// for cross-solver comparison tests. Must not mutate shared state.
using IterateHook = std::function<void(const SolverState&)>;

struct SolverResult {
    ComplexTensor3 reconstruction;  // always image domain
    std::vector<double> cost_trace;
    std::vector<std::pair<double, double>> primal_residuals;  // (|Z-X|, |M-C(X)|)
    std::vector<double> elapsed_trace;  // seconds since solve start, per iteration
    int iters_run = 0;
    double wall_time = 0.0;
};

/// Value of the reconstruction objective at image-domain x:
/// 0.5*||A(x) - b||_F^2 + lambda1*tnn(x) + lambda2*casorati_nn(x).
double objective(const ComplexTensor3& x, const KSpaceData& b, const SamplingMask& mask,
                 const SolverConfig& cfg);

/// Image-domain ADMM: TSVT and SVT proximal steps on the image tensor,
/// exact X-update by element-wise division in k-space. Stops when the
/// relative cost change drops below cfg.rel_tol or at cfg.max_iters.
SolverResult admm_tmnn_image(const KSpaceData& b, const SamplingMask& mask,
                             const SolverConfig& cfg, const IterateHook& hook = {});

/// Fast Cartesian solver: the same ADMM run directly on the k-space
/// tensor, where the X-update needs no FFTs. The returned reconstruction
/// is converted to the image domain once at exit.
SolverResult admm_tmnn_kspace(const KSpaceData& b, const SamplingMask& mask,
                              const SolverConfig& cfg, const IterateHook& hook = {});

/// Dispatch on cfg.variant.
SolverResult solve(const KSpaceData& b, const SamplingMask& mask, const SolverConfig& cfg,
                   const IterateHook& hook = {});

/// TNN-only (lambda2 = 0) or MNN-only (lambda1 = 0) run of the same
/// algorithm; requires one of the weights to be zero.
SolverResult baseline(const KSpaceData& b, const SamplingMask& mask, const SolverConfig& cfg,
                      const IterateHook& hook = {});

}  // namespace tmnn
