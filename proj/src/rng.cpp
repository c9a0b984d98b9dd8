#include "ashape/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ashape::mc {

Rng::Rng(RngSpec spec) : spec_(std::move(spec)), engine_(spec_.seed) {
    if (spec_.algorithm != "mt19937_64")
        throw std::invalid_argument("Rng: unknown algorithm '" + spec_.algorithm + "'");
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
}

double Rng::chi2(int df) {
    if (df < 1) throw std::invalid_argument("Rng::chi2: df must be >= 1");
    double s = 0.0;
    for (int i = 0; i < df; ++i) {
        const double z = normal();
        s += z * z;
    }
    return s;
}

algebra::Scalar Rng::gaussian_scalar(algebra::AlgebraTag tag) {
    if (!tag.full_numeric())
        throw std::invalid_argument("Rng::gaussian_scalar: no octonion sampling");
    algebra::Scalar s;
    for (int c = 0; c < tag.beta; ++c) s.c[c] = normal();
    return s;
}

algebra::MatrixF Rng::gaussian_matrix(int rows, int cols, algebra::AlgebraTag tag) {
    algebra::MatrixF m(rows, cols, tag);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m.at(i, j) = gaussian_scalar(tag);
    return m;
}

}  // namespace ashape::mc
