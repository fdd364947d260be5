// Python bindings for the tmnn core. Arrays cross the boundary as
// numpy complex128 in Fortran order, which is exactly the native tensor
// layout, so conversions are single memcpys.

#include "tmnn/fft.hpp"
#include "tmnn/io.hpp"
#include "tmnn/metrics.hpp"
#include "tmnn/phantom.hpp"
#include "tmnn/prox.hpp"
#include "tmnn/sampling.hpp"
#include "tmnn/solver.hpp"
#include "tmnn/tsvd.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

namespace py = pybind11;
using namespace tmnn;

namespace {

using ComplexArray = py::array_t<Complex, py::array::f_style | py::array::forcecast>;
using BoolArray = py::array_t<bool, py::array::f_style | py::array::forcecast>;

ComplexTensor3 to_tensor(const ComplexArray& a) {
    if (a.ndim() != 3) throw std::invalid_argument("expected a 3-d complex array");
    ComplexTensor3 x(a.shape(0), a.shape(1), a.shape(2));
    std::memcpy(x.data(), a.data(), sizeof(Complex) * size_t(x.size()));
    return x;
}

py::array_t<Complex> from_tensor(const ComplexTensor3& x) {
    py::array_t<Complex> a({x.n1(), x.n2(), x.n3()},
                           {Index(sizeof(Complex)), Index(sizeof(Complex)) * x.n1(),
                            Index(sizeof(Complex)) * x.n1() * x.n2()});
    std::memcpy(a.mutable_data(), x.data(), sizeof(Complex) * size_t(x.size()));
    return a;
}

py::array_t<Complex> from_matrix(const Matrix& m) {
    py::array_t<Complex> a({m.rows(), m.cols()},
                           {Index(sizeof(Complex)), Index(sizeof(Complex)) * m.rows()});
    std::memcpy(a.mutable_data(), m.data(), sizeof(Complex) * size_t(m.size()));
    return a;
}

Matrix to_matrix(const ComplexArray& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d complex array");
    Matrix m(a.shape(0), a.shape(1));
    std::memcpy(m.data(), a.data(), sizeof(Complex) * size_t(m.size()));
    return m;
}

SamplingMask to_mask(const BoolArray& a) {
    if (a.ndim() != 3) throw std::invalid_argument("expected a 3-d bool mask");
    SamplingMask m(a.shape(0), a.shape(1), a.shape(2));
    const bool* d = a.data();
    Index k = 0;
    for (Index t = 0; t < m.n3(); ++t)
        for (Index j = 0; j < m.n2(); ++j)
            for (Index i = 0; i < m.n1(); ++i) m.set(i, j, t, d[k++]);
    return m;
}

py::array_t<bool> from_mask(const SamplingMask& m) {
    py::array_t<bool> a({m.n1(), m.n2(), m.n3()},
                        {Index(1), m.n1(), m.n1() * m.n2()});
    bool* d = a.mutable_data();
    Index k = 0;
    for (Index t = 0; t < m.n3(); ++t)
        for (Index j = 0; j < m.n2(); ++j)
            for (Index i = 0; i < m.n1(); ++i) d[k++] = m.at(i, j, t);
    return a;
}

SolverConfig make_config(double lambda1, double lambda2, std::optional<double> mu1,
                         std::optional<double> mu2, int max_iters, double rel_tol,
                         const std::string& variant, bool allow_pure_data_consistency) {
    SolverConfig cfg;
    cfg.lambda1 = lambda1;
    cfg.lambda2 = lambda2;
    cfg.mu1 = mu1;
    cfg.mu2 = mu2;
    cfg.max_iters = max_iters;
    cfg.rel_tol = rel_tol;
    if (variant == "image_domain")
        cfg.variant = SolverVariant::image_domain;
    else if (variant == "kspace_fast")
        cfg.variant = SolverVariant::kspace_fast;
    else
        throw std::invalid_argument("variant must be 'image_domain' or 'kspace_fast'");
    cfg.allow_pure_data_consistency = allow_pure_data_consistency;
    return cfg;
}

PhantomSpec make_phantom_spec(const std::string& kind, std::optional<Index> n1,
                              std::optional<Index> n2, std::optional<Index> n3,
                              std::uint64_t seed, double motion_amplitude, double uptake_rate) {
    PhantomKind k;
    if (kind == "cine")
        k = PhantomKind::cine;
    else if (kind == "perfusion")
        k = PhantomKind::perfusion;
    else
        throw std::invalid_argument("kind must be 'cine' or 'perfusion'");
    PhantomSpec spec = PhantomSpec::defaults(k);
    if (n1) spec.n1 = *n1;
    if (n2) spec.n2 = *n2;
    if (n3) spec.n3 = *n3;
    spec.seed = seed;
    spec.motion_amplitude = motion_amplitude;
    spec.uptake_rate = uptake_rate;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_tmnn, mod) {
    mod.doc() = "Tensor + Casorati nuclear norm reconstruction of dynamic images";

    mod.def("dft3", [](const ComplexArray& x) { return from_tensor(dft3(to_tensor(x))); },
            py::arg("x"), "Unitary DFT along the third (tube) dimension.");
    mod.def("idft3", [](const ComplexArray& x) { return from_tensor(idft3(to_tensor(x))); },
            py::arg("x"));
    mod.def("fft2_per_frame",
            [](const ComplexArray& x) { return from_tensor(fft2_per_frame(to_tensor(x))); },
            py::arg("x"), "Centered unitary 2-d FFT applied to every frame.");
    mod.def("ifft2_per_frame",
            [](const ComplexArray& x) { return from_tensor(ifft2_per_frame(to_tensor(x))); },
            py::arg("x"));

    mod.def("t_product",
            [](const ComplexArray& a, const ComplexArray& b) {
                return from_tensor(t_product(to_tensor(a), to_tensor(b)));
            },
            py::arg("a"), py::arg("b"), "Tensor-tensor product along the third dimension.");
    mod.def("conj_transpose",
            [](const ComplexArray& x) { return from_tensor(conj_transpose(to_tensor(x))); },
            py::arg("x"));
    mod.def("t_svd",
            [](const ComplexArray& x) {
                const TSvdFactors f = t_svd(to_tensor(x));
                return py::make_tuple(from_tensor(f.u), from_tensor(f.s), from_tensor(f.v));
            },
            py::arg("x"), "Tensor SVD; returns (u, s, v) with x = u * s * conj_transpose(v).");
    mod.def("tnn", [](const ComplexArray& x) { return tnn(to_tensor(x)); }, py::arg("x"),
            "Tensor nuclear norm (block-circulant nuclear norm / n3).");
    mod.def("casorati_nn", [](const ComplexArray& x) { return casorati_nn(to_tensor(x)); },
            py::arg("x"), "Nuclear norm of the Casorati (mode-3 unfolding) matrix.");

    mod.def("svt", [](const ComplexArray& m, double tau) { return from_matrix(svt(to_matrix(m), tau)); },
            py::arg("m"), py::arg("tau"), "Singular value soft-thresholding.");
    mod.def("tsvt", [](const ComplexArray& x, double tau) { return from_tensor(tsvt(to_tensor(x), tau)); },
            py::arg("x"), py::arg("tau"), "Tensor singular value thresholding (TNN prox).");

    mod.def("make_phantom",
            [](const std::string& kind, std::optional<Index> n1, std::optional<Index> n2,
               std::optional<Index> n3, std::uint64_t seed, double motion_amplitude,
               double uptake_rate) {
                return from_tensor(make_phantom(make_phantom_spec(
                    kind, n1, n2, n3, seed, motion_amplitude, uptake_rate)));
            },
            py::arg("kind") = "cine", py::arg("n1") = py::none(), py::arg("n2") = py::none(),
            py::arg("n3") = py::none(), py::arg("seed") = 1, py::arg("motion_amplitude") = 0.1,
            py::arg("uptake_rate") = 1.0, "Synthetic dynamic phantom (cine or perfusion).");

    mod.def("pseudo_radial_mask",
            [](Index n1, Index n2, Index n3, int lines, std::uint64_t seed, bool vary_per_frame) {
                return from_mask(pseudo_radial_mask(n1, n2, n3, lines, seed, vary_per_frame));
            },
            py::arg("n1"), py::arg("n2"), py::arg("n3"), py::arg("lines"), py::arg("seed") = 0,
            py::arg("vary_per_frame") = true);
    mod.def("variable_density_mask",
            [](Index n1, Index n2, Index n3, double ratio, std::uint64_t seed,
               bool vary_per_frame) {
                return from_mask(variable_density_mask(n1, n2, n3, ratio, seed, vary_per_frame));
            },
            py::arg("n1"), py::arg("n2"), py::arg("n3"), py::arg("ratio"), py::arg("seed") = 0,
            py::arg("vary_per_frame") = true);

    mod.def("apply_A",
            [](const ComplexArray& x, const BoolArray& mask) {
                return from_tensor(apply_A(to_tensor(x), to_mask(mask)).grid);
            },
            py::arg("x"), py::arg("mask"),
            "Fourier sampling operator: masked per-frame centered FFT.");
    mod.def("apply_A_star",
            [](const ComplexArray& b, const BoolArray& mask) {
                return from_tensor(apply_A_star(KSpaceData{to_tensor(b)}, to_mask(mask)));
            },
            py::arg("b"), py::arg("mask"), "Adjoint: zero-filled inverse FFT.");
    mod.def("add_noise",
            [](const ComplexArray& b, const BoolArray& mask, double snr_db, std::uint64_t seed) {
                return from_tensor(add_noise(KSpaceData{to_tensor(b)}, to_mask(mask), snr_db,
                                             seed)
                                       .grid);
            },
            py::arg("b"), py::arg("mask"), py::arg("snr_db"), py::arg("seed") = 0,
            "Complex Gaussian noise on the sampled entries at the given SNR.");

    mod.def("objective",
            [](const ComplexArray& x, const ComplexArray& b, const BoolArray& mask,
               double lambda1, double lambda2) {
                SolverConfig cfg;
                cfg.lambda1 = lambda1;
                cfg.lambda2 = lambda2;
                cfg.allow_pure_data_consistency = true;
                return objective(to_tensor(x), KSpaceData{to_tensor(b)}, to_mask(mask), cfg);
            },
            py::arg("x"), py::arg("b"), py::arg("mask"), py::arg("lambda1"), py::arg("lambda2"));

    mod.def("solve",
            [](const ComplexArray& b, const BoolArray& mask, double lambda1, double lambda2,
               std::optional<double> mu1, std::optional<double> mu2, int max_iters,
               double rel_tol, const std::string& variant, bool allow_pure_data_consistency) {
                const SolverConfig cfg =
                    make_config(lambda1, lambda2, mu1, mu2, max_iters, rel_tol, variant,
                                allow_pure_data_consistency);
                const KSpaceData data{to_tensor(b)};
                const SamplingMask m = to_mask(mask);
                SolverResult res;
                {
                    py::gil_scoped_release release;
                    res = solve(data, m, cfg);
                }
                py::dict out;
                out["reconstruction"] = from_tensor(res.reconstruction);
                out["cost_trace"] = py::cast(res.cost_trace);
                out["primal_residuals"] = py::cast(res.primal_residuals);
                out["iters"] = res.iters_run;
                out["wall_time"] = res.wall_time;
                return out;
            },
            py::arg("b"), py::arg("mask"), py::arg("lambda1"), py::arg("lambda2"),
            py::arg("mu1") = py::none(), py::arg("mu2") = py::none(), py::arg("max_iters") = 200,
            py::arg("rel_tol") = 1e-4, py::arg("variant") = "kspace_fast",
            py::arg("allow_pure_data_consistency") = false,
            "ADMM reconstruction; returns a dict with the image-domain result and traces.");

    mod.def("snr_db",
            [](const ComplexArray& reference, const ComplexArray& estimate) {
                return snr_db(to_tensor(reference), to_tensor(estimate));
            },
            py::arg("reference"), py::arg("estimate"));
    mod.def("nmse",
            [](const ComplexArray& reference, const ComplexArray& estimate) {
                return nmse(to_tensor(reference), to_tensor(estimate));
            },
            py::arg("reference"), py::arg("estimate"));

    mod.def("save_tensor",
            [](const std::string& path, const ComplexArray& x) { save_tensor(path, to_tensor(x)); },
            py::arg("path"), py::arg("x"), "Write a tensor as a CTN3 file.");
    mod.def("load_tensor", [](const std::string& path) { return from_tensor(load_tensor(path)); },
            py::arg("path"));
    mod.def("save_mask",
            [](const std::string& path, const BoolArray& m) { save_mask(path, to_mask(m)); },
            py::arg("path"), py::arg("mask"));
    mod.def("load_mask", [](const std::string& path) { return from_mask(load_mask(path)); },
            py::arg("path"));
}
