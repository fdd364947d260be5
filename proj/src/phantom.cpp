#include "tmnn/phantom.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tmnn {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Normalized elliptical distance: 1 on the nominal boundary.
struct Ellipse {
    double ci, cj, ai, aj;
    double rho(double i, double j) const {
        const double di = (i - ci) / ai;
        const double dj = (j - cj) / aj;
        return std::sqrt(di * di + dj * dj);
    }
};

/// Smooth-edged filled ellipse, edge width w in rho units.
double blob(const Ellipse& e, double i, double j, double w) {
    return logistic((1.0 - e.rho(i, j)) / w);
}

/// Smooth static phase, low-order in the normalized coordinates.
struct PhaseMap {
    double c0, c1, c2, c3;
    double n1, n2;
    double operator()(double i, double j) const {
        const double u = (i - 0.5 * n1) / n1;
        const double v = (j - 0.5 * n2) / n2;
        return c0 + c1 * u + c2 * v + c3 * u * v;
    }
};

PhaseMap draw_phase(std::mt19937_64& rng, Index n1, Index n2) {
    std::uniform_real_distribution<double> coef(-M_PI / 3.0, M_PI / 3.0);
    return {coef(rng), coef(rng), coef(rng), coef(rng), double(n1), double(n2)};
}

double jitter(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return d(rng);
}

}  // namespace

PhantomSpec PhantomSpec::defaults(PhantomKind k) {
    PhantomSpec s;
    s.kind = k;
    if (k == PhantomKind::perfusion) {
        s.n1 = 48;
        s.n2 = 24;
        s.n3 = 32;
    }
    return s;
}

void PhantomSpec::validate() const {
    if (n1 < 8 || n2 < 8) throw std::invalid_argument("PhantomSpec: n1, n2 must be >= 8");
    if (n3 < 2) throw std::invalid_argument("PhantomSpec: n3 must be >= 2");
}

ComplexTensor3 make_cine_phantom(const PhantomSpec& spec) {
    spec.validate();
    if (spec.kind != PhantomKind::cine)
        throw std::invalid_argument("make_cine_phantom: spec.kind is not cine");

    const double n1 = double(spec.n1), n2 = double(spec.n2);
    std::mt19937_64 rng(spec.seed);

    const Ellipse body{0.5 * n1 + jitter(rng, 0.02 * n1), 0.5 * n2 + jitter(rng, 0.02 * n2),
                       0.42 * n1 * (1.0 + jitter(rng, 0.05)), 0.45 * n2 * (1.0 + jitter(rng, 0.05))};
    const Ellipse septum{0.34 * n1 + jitter(rng, 0.02 * n1), 0.62 * n2 + jitter(rng, 0.02 * n2),
                         0.10 * n1 * (1.0 + jitter(rng, 0.1)), 0.12 * n2 * (1.0 + jitter(rng, 0.1))};
    const Ellipse chamber{0.55 * n1 + jitter(rng, 0.02 * n1), 0.42 * n2 + jitter(rng, 0.02 * n2),
                          0.17 * n1 * (1.0 + jitter(rng, 0.08)),
                          0.19 * n2 * (1.0 + jitter(rng, 0.08))};
    const PhaseMap phase = draw_phase(rng, spec.n1, spec.n2);

    const double edge = 0.08;  // rho-units edge width for the static shapes
    // Chamber edge width, kept comfortably wider than the radius swing so
    // the second-order motion model below stays an accurate description
    // of a sinusoidally breathing boundary.
    const double cw = 0.12;
    const double a = spec.motion_amplitude;

    ComplexTensor3 x(spec.n1, spec.n2, spec.n3);
    std::vector<double> u0(size_t(spec.n1 * spec.n2)), u1(u0.size()), u2(u0.size());

    for (Index j = 0; j < spec.n2; ++j)
        for (Index i = 0; i < spec.n1; ++i) {
            const double fi = double(i), fj = double(j);
            const size_t k = size_t(i + spec.n1 * j);
            // Chamber intensity as a function of the radius scale q,
            // expanded to second order around the rest radius q = 1:
            // f(q) = logistic((q - rho)/cw), evaluated with its exact
            // derivatives. Motion q(t) = 1 + a sin(th) then contributes
            // the temporal functions sin(th) and cos(2 th) only.
            const double s = logistic((1.0 - chamber.rho(fi, fj)) / cw);
            const double f1 = s * (1.0 - s) / cw;
            const double f2 = s * (1.0 - s) * (1.0 - 2.0 * s) / (cw * cw);
            const double statics =
                0.5 * blob(body, fi, fj, edge) + 0.35 * blob(septum, fi, fj, edge);
            u0[k] = statics + 0.6 * (s + 0.25 * a * a * f2);
            u1[k] = 0.6 * a * f1;
            u2[k] = -0.6 * 0.25 * a * a * f2;
        }

    for (Index t = 0; t < spec.n3; ++t) {
        const double th = 2.0 * M_PI * double(t) / double(spec.n3);
        const double s1 = std::sin(th), c2 = std::cos(2.0 * th);
        for (Index j = 0; j < spec.n2; ++j)
            for (Index i = 0; i < spec.n1; ++i) {
                const size_t k = size_t(i + spec.n1 * j);
                const double mag = u0[k] + u1[k] * s1 + u2[k] * c2;
                const double ph = phase(double(i), double(j));
                x(i, j, t) = Complex(mag * std::cos(ph), mag * std::sin(ph));
            }
    }
    return x;
}

ComplexTensor3 make_perfusion_phantom(const PhantomSpec& spec) {
    spec.validate();
    if (spec.kind != PhantomKind::perfusion)
        throw std::invalid_argument("make_perfusion_phantom: spec.kind is not perfusion");

    const double n1 = double(spec.n1), n2 = double(spec.n2);
    std::mt19937_64 rng(spec.seed);

    const Ellipse body{0.5 * n1 + jitter(rng, 0.02 * n1), 0.5 * n2 + jitter(rng, 0.02 * n2),
                       0.44 * n1 * (1.0 + jitter(rng, 0.04)), 0.44 * n2 * (1.0 + jitter(rng, 0.04))};
    const Ellipse ring_outer{0.48 * n1, 0.5 * n2, 0.30 * n1 * (1.0 + jitter(rng, 0.06)),
                             0.30 * n2 * (1.0 + jitter(rng, 0.06))};
    const Ellipse ring_inner{ring_outer.ci, ring_outer.cj, 0.62 * ring_outer.ai,
                             0.62 * ring_outer.aj};
    const Ellipse region_a{0.38 * n1 + jitter(rng, 0.02 * n1), 0.36 * n2 + jitter(rng, 0.02 * n2),
                           0.10 * n1 * (1.0 + jitter(rng, 0.1)),
                           0.12 * n2 * (1.0 + jitter(rng, 0.1))};
    const Ellipse region_b{0.60 * n1 + jitter(rng, 0.02 * n1), 0.62 * n2 + jitter(rng, 0.02 * n2),
                           0.12 * n1 * (1.0 + jitter(rng, 0.1)),
                           0.09 * n2 * (1.0 + jitter(rng, 0.1))};
    const PhaseMap phase = draw_phase(rng, spec.n1, spec.n2);

    const double edge = 0.08;

    // Shared gamma-variate enhancement curve, unit peak.
    const double alpha = 2.5;
    const double tp = std::max(2.0, double(spec.n3) / 4.0);
    std::vector<double> g(size_t(spec.n3));
    for (Index t = 0; t < spec.n3; ++t) {
        const double tau = double(t) / tp;
        g[size_t(t)] = std::pow(tau, alpha) * std::exp(alpha * (1.0 - tau));
    }

    ComplexTensor3 x(spec.n1, spec.n2, spec.n3);
    for (Index j = 0; j < spec.n2; ++j)
        for (Index i = 0; i < spec.n1; ++i) {
            const double fi = double(i), fj = double(j);
            const double ring =
                blob(ring_outer, fi, fj, edge) * (1.0 - blob(ring_inner, fi, fj, edge));
            const double statics = 0.45 * blob(body, fi, fj, edge) + 0.3 * ring;
            const double uptake = spec.uptake_rate * (0.5 * blob(region_a, fi, fj, edge) +
                                                      0.35 * blob(region_b, fi, fj, edge));
            const double ph = phase(fi, fj);
            const Complex rot(std::cos(ph), std::sin(ph));
            for (Index t = 0; t < spec.n3; ++t)
                x(i, j, t) = (statics + uptake * g[size_t(t)]) * rot;
        }
    return x;
}

ComplexTensor3 make_phantom(const PhantomSpec& spec) {
    return spec.kind == PhantomKind::cine ? make_cine_phantom(spec) : make_perfusion_phantom(spec);
}

}  // namespace tmnn
