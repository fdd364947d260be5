#include "tmnn/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tmnn {

double snr_db(const ComplexTensor3& reference, const ComplexTensor3& estimate) {
    check_same_shape(reference, estimate, "snr_db");
    const double ref_norm = reference.norm();
    if (ref_norm == 0.0) throw std::invalid_argument("snr_db: reference is identically zero");
    double err_sq = 0.0;
    for (Index k = 0; k < reference.size(); ++k)
        err_sq += std::norm(estimate.data()[k] - reference.data()[k]);
    if (err_sq == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(ref_norm / std::sqrt(err_sq));
}

double nmse(const ComplexTensor3& reference, const ComplexTensor3& estimate) {
    check_same_shape(reference, estimate, "nmse");
    const double ref_sq = reference.flat().squaredNorm();
    if (ref_sq == 0.0) throw std::invalid_argument("nmse: reference is identically zero");
    double err_sq = 0.0;
    for (Index k = 0; k < reference.size(); ++k)
        err_sq += std::norm(estimate.data()[k] - reference.data()[k]);
    return err_sq / ref_sq;
}

RealMatrix error_image(const ComplexTensor3& reference, const ComplexTensor3& estimate,
                       Index frame) {
    check_same_shape(reference, estimate, "error_image");
    if (frame < 0 || frame >= reference.n3())
        throw std::out_of_range("error_image: frame index out of range");
    RealMatrix img(reference.n1(), reference.n2());
    for (Index j = 0; j < reference.n2(); ++j)
        for (Index i = 0; i < reference.n1(); ++i)
            img(i, j) = std::abs(estimate(i, j, frame) - reference(i, j, frame));
    return img;
}

}  // namespace tmnn
