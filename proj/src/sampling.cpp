#include "tmnn/sampling.hpp"

#include "tmnn/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

namespace tmnn {

Index SamplingMask::ones_count() const {
    return std::accumulate(on_.begin(), on_.end(), Index(0),
                           [](Index a, std::uint8_t v) { return a + (v != 0); });
}

void SamplingMask::project(ComplexTensor3& x) const {
    if (!same_shape(x)) throw std::invalid_argument("SamplingMask::project: shape mismatch");
    Complex* d = x.data();
    for (size_t k = 0; k < on_.size(); ++k)
        if (!on_[k]) d[k] = Complex(0, 0);
}

ComplexTensor3 SamplingMask::to_tensor() const {
    ComplexTensor3 x(n1_, n2_, n3_);
    for (size_t k = 0; k < on_.size(); ++k) x.data()[k] = Complex(on_[k] ? 1.0 : 0.0, 0.0);
    return x;
}

SamplingMask SamplingMask::from_tensor(const ComplexTensor3& x) {
    SamplingMask m(x.n1(), x.n2(), x.n3());
    const Complex* d = x.data();
    for (size_t k = 0; k < m.on_.size(); ++k) {
        if (d[k] == Complex(1, 0))
            m.on_[k] = 1;
        else if (d[k] == Complex(0, 0))
            m.on_[k] = 0;
        else
            throw std::invalid_argument("SamplingMask::from_tensor: entries must be 0 or 1");
    }
    return m;
}

SamplingMask SamplingMask::full(Index n1, Index n2, Index n3) {
    SamplingMask m(n1, n2, n3);
    std::fill(m.on_.begin(), m.on_.end(), std::uint8_t(1));
    return m;
}

KSpaceData apply_A(const ComplexTensor3& x, const SamplingMask& mask) {
    if (!mask.same_shape(x)) throw std::invalid_argument("apply_A: shape mismatch");
    return KSpaceData::from_grid(fft2_per_frame(x), mask);
}

ComplexTensor3 apply_A_star(const KSpaceData& b, const SamplingMask& mask) {
    if (!mask.same_shape(b.grid)) throw std::invalid_argument("apply_A_star: shape mismatch");
    ComplexTensor3 g = b.grid;
    mask.project(g);  // harmless if b already lives on the mask
    return ifft2_per_frame(g);
}

SamplingMask pseudo_radial_mask(Index n1, Index n2, Index n3, int lines, std::uint64_t /*seed*/,
                                bool vary_per_frame) {
    if (lines < 1) throw std::invalid_argument("pseudo_radial_mask: lines must be >= 1");
    SamplingMask m(n1, n2, n3);
    const double ci = double(n1 / 2);
    const double cj = double(n2 / 2);
    // Radius generous enough that every line exits the grid.
    const double rmax = std::hypot(double(n1), double(n2));

    for (Index t = 0; t < n3; ++t) {
        const double offset = vary_per_frame ? double(t) * M_PI / (double(lines) * double(n3)) : 0.0;
        for (int l = 0; l < lines; ++l) {
            const double theta = double(l) * M_PI / double(lines) + offset;
            const double di = std::sin(theta);
            const double dj = std::cos(theta);
            // March along the dominant axis one grid step at a time so the
            // rasterized line has no gaps.
            const double adi = std::abs(di), adj = std::abs(dj);
            const double step = 1.0 / std::max(adi, adj);
            const auto n_steps = static_cast<Index>(std::ceil(rmax / step));
            for (Index q = -n_steps; q <= n_steps; ++q) {
                const double s = double(q) * step;
                const auto i = static_cast<Index>(std::llround(ci + s * di));
                const auto j = static_cast<Index>(std::llround(cj + s * dj));
                if (i >= 0 && i < n1 && j >= 0 && j < n2) m.set(i, j, t, true);
            }
        }
        m.set(n1 / 2, n2 / 2, t, true);  // DC always acquired
    }
    return m;
}

SamplingMask variable_density_mask(Index n1, Index n2, Index n3, double ratio,
                                   std::uint64_t seed, bool vary_per_frame) {
    if (!(ratio > 0.0 && ratio <= 1.0))
        throw std::invalid_argument("variable_density_mask: ratio must be in (0, 1]");
    const auto per_frame = static_cast<Index>(std::llround(ratio * double(n1) * double(n2)));
    if (per_frame < 1) throw std::invalid_argument("variable_density_mask: ratio too small");

    SamplingMask m(n1, n2, n3);
    const double ci = double(n1 / 2);
    const double cj = double(n2 / 2);
    const double rmax = std::hypot(std::max(ci, double(n1 - 1) - ci),
                                   std::max(cj, double(n2 - 1) - cj));

    // Center block, fully sampled in every frame.
    const Index bi0 = std::max<Index>(0, n1 / 2 - 4), bi1 = std::min<Index>(n1, n1 / 2 + 4);
    const Index bj0 = std::max<Index>(0, n2 / 2 - 4), bj1 = std::min<Index>(n2, n2 / 2 + 4);
    auto in_block = [&](Index i, Index j) { return i >= bi0 && i < bi1 && j >= bj0 && j < bj1; };

    std::vector<double> weight(static_cast<size_t>(n1 * n2));
    for (Index j = 0; j < n2; ++j)
        for (Index i = 0; i < n1; ++i) {
            const double r = std::hypot(double(i) - ci, double(j) - cj);
            const double w = std::pow(std::max(0.0, 1.0 - r / rmax), 4);
            weight[static_cast<size_t>(i + n1 * j)] = std::max(w, 1e-12);
        }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<Index> frame_sel;
    for (Index t = 0; t < n3; ++t) {
        const bool fresh_draw = vary_per_frame || t == 0;
        if (fresh_draw) {
            frame_sel.clear();
            Index need = per_frame;
            for (Index j = bj0; j < bj1; ++j)
                for (Index i = bi0; i < bi1; ++i) {
                    frame_sel.push_back(i + n1 * j);
                    --need;
                }
            if (need > 0) {
                // Weighted sample without replacement: keep the `need`
                // largest keys u^(1/w) over the non-block locations.
                using Entry = std::pair<double, Index>;
                std::priority_queue<Entry, std::vector<Entry>, std::greater<>> top;
                for (Index j = 0; j < n2; ++j)
                    for (Index i = 0; i < n1; ++i) {
                        if (in_block(i, j)) continue;
                        const double u = unif(rng);
                        const double key =
                            std::pow(u, 1.0 / weight[static_cast<size_t>(i + n1 * j)]);
                        if (Index(top.size()) < need)
                            top.emplace(key, i + n1 * j);
                        else if (key > top.top().first) {
                            top.pop();
                            top.emplace(key, i + n1 * j);
                        }
                    }
                while (!top.empty()) {
                    frame_sel.push_back(top.top().second);
                    top.pop();
                }
            } else {
                frame_sel.resize(static_cast<size_t>(per_frame));
            }
        }
        for (Index flat : frame_sel) m.set(flat % n1, flat / n1, t, true);
    }
    return m;
}

KSpaceData add_noise(const KSpaceData& b, const SamplingMask& mask, double snr_db,
                     std::uint64_t seed) {
    if (!mask.same_shape(b.grid)) throw std::invalid_argument("add_noise: shape mismatch");
    if (std::isinf(snr_db) && snr_db > 0) return b;
    if (std::isnan(snr_db)) throw std::invalid_argument("add_noise: snr_db is NaN");

    const Index msamp = mask.ones_count();
    if (msamp == 0) throw std::invalid_argument("add_noise: mask has no sampled entries");
    const double bnorm = b.grid.norm();
    // Per-component std dev of a circular complex Gaussian whose total
    // expected energy over the m sampled entries matches the target SNR.
    const double sigma = bnorm * std::pow(10.0, -snr_db / 20.0) / std::sqrt(double(msamp));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma / std::sqrt(2.0));

    KSpaceData out = b;
    for (Index t = 0; t < mask.n3(); ++t)
        for (Index j = 0; j < mask.n2(); ++j)
            for (Index i = 0; i < mask.n1(); ++i)
                if (mask.at(i, j, t)) {
                    const double re = normal(rng);
                    const double im = normal(rng);
                    out.grid(i, j, t) += Complex(re, im);
                }
    return out;
}

KSpaceData add_noise(const KSpaceData& b, double snr_db, std::uint64_t seed) {
    SamplingMask support(b.grid.n1(), b.grid.n2(), b.grid.n3());
    bool any = false;
    for (Index t = 0; t < b.grid.n3(); ++t)
        for (Index j = 0; j < b.grid.n2(); ++j)
            for (Index i = 0; i < b.grid.n1(); ++i)
                if (b.grid(i, j, t) != Complex(0, 0)) {
                    support.set(i, j, t, true);
                    any = true;
                }
    if (!any) throw std::invalid_argument("add_noise: data has no sampled entries");
    return add_noise(b, support, snr_db, seed);
}

}  // namespace tmnn
