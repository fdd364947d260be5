#include "tmnn/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace tmnn {
namespace {

// The FFTW planner is not thread-safe; executing a plan on new arrays is.
// Plans are cached per (kind, shape, sign) and created with FFTW_UNALIGNED
// so they stay valid for any heap buffer.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    // kind 0: length-n3 transforms of all n1*n2 tubes (stride n1*n2, dist 1)
    // kind 1: per-frame 2-D transforms (column-major n1 x n2, n3 frames)
    fftw_plan get(int kind, Index n1, Index n2, Index n3, int sign) {
        std::scoped_lock lock(mutex_);
        Key key{kind, n1, n2, n3, sign};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::vector<Complex> dummy(static_cast<size_t>(n1 * n2 * n3));
        auto* buf = reinterpret_cast<fftw_complex*>(dummy.data());
        fftw_plan plan = nullptr;
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (kind == 0) {
            const int n = static_cast<int>(n3);
            const int howmany = static_cast<int>(n1 * n2);
            plan = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, howmany, 1,
                                      buf, nullptr, howmany, 1, sign, flags);
        } else {
            // FFTW is row-major; a column-major n1 x n2 frame is a row-major
            // n2 x n1 array.
            const int n[2] = {static_cast<int>(n2), static_cast<int>(n1)};
            const int howmany = static_cast<int>(n3);
            const int dist = static_cast<int>(n1 * n2);
            plan = fftw_plan_many_dft(2, n, howmany, buf, nullptr, 1, dist,
                                      buf, nullptr, 1, dist, sign, flags);
        }
        plans_.emplace(key, plan);
        return plan;
    }

private:
    using Key = std::tuple<int, Index, Index, Index, int>;
    PlanCache() = default;
    std::mutex mutex_;
    std::map<Key, fftw_plan> plans_;
};

ComplexTensor3 run_plan(int kind, const ComplexTensor3& x, int sign, double scale) {
    fftw_plan plan = PlanCache::instance().get(kind, x.n1(), x.n2(), x.n3(), sign);
    ComplexTensor3 y = x;
    auto* buf = reinterpret_cast<fftw_complex*>(y.data());
    fftw_execute_dft(plan, buf, buf);
    y.flat() *= scale;
    return y;
}

// Centering permutation: raw-FFT index k maps to centered index
// (k + n/2) mod n, so DC lands at floor(n/2). `inverse` undoes it.
ComplexTensor3 shift2(const ComplexTensor3& x, bool inverse) {
    const Index n1 = x.n1(), n2 = x.n2(), n3 = x.n3();
    const Index c1 = n1 / 2, c2 = n2 / 2;
    ComplexTensor3 y(n1, n2, n3);
    for (Index t = 0; t < n3; ++t)
        for (Index j = 0; j < n2; ++j) {
            const Index jj = (j + c2) % n2;
            for (Index i = 0; i < n1; ++i) {
                const Index ii = (i + c1) % n1;
                if (!inverse)
                    y(ii, jj, t) = x(i, j, t);
                else
                    y(i, j, t) = x(ii, jj, t);
            }
        }
    return y;
}

}  // namespace

ComplexTensor3 dft3(const ComplexTensor3& x) {
    return run_plan(0, x, FFTW_FORWARD, 1.0 / std::sqrt(double(x.n3())));
}

ComplexTensor3 idft3(const ComplexTensor3& x) {
    return run_plan(0, x, FFTW_BACKWARD, 1.0 / std::sqrt(double(x.n3())));
}

ComplexTensor3 fft2_per_frame(const ComplexTensor3& x) {
    const double scale = 1.0 / std::sqrt(double(x.n1() * x.n2()));
    return shift2(run_plan(1, x, FFTW_FORWARD, scale), false);
}

ComplexTensor3 ifft2_per_frame(const ComplexTensor3& x) {
    const double scale = 1.0 / std::sqrt(double(x.n1() * x.n2()));
    return run_plan(1, shift2(x, true), FFTW_BACKWARD, scale);
}

}  // namespace tmnn
