#include "ashape/generators.hpp"

#include <cmath>
#include <stdexcept>

#include "ashape/quadrature.hpp"

namespace ashape::shape {

double gaussian_gamma_closed(double beta, int K, int N, int t, int r) {
    if (t < 0 || r < 0) throw std::invalid_argument("gaussian_gamma_closed: t, r >= 0");
    const double half_d = 0.5 * beta * K * (N - 1);
    const double mag = std::exp(std::lgamma(half_d + t) - half_d * std::log(M_PI) +
                                (t + r) * std::log(0.5 * beta));
    return (r % 2 == 0) ? mag : -mag;
}

GeneratorFamily GeneratorFamily::gaussian(double beta, int total_dim) {
    if (beta <= 0 || total_dim < 1)
        throw std::invalid_argument("GeneratorFamily::gaussian: bad parameters");
    GeneratorFamily g;
    g.name_ = "gaussian";
    g.beta_ = beta;
    g.total_dim_ = total_dim;
    const double half_d = 0.5 * total_dim;
    const double ln_norm = -half_d * std::log(2.0 * M_PI / beta);
    g.derivatives_ = [beta, ln_norm](int order, double z) {
        double v = std::exp(ln_norm - 0.5 * beta * z + order * std::log(0.5 * beta));
        return (order % 2 == 0) ? v : -v;
    };
    g.closed_gamma_ = [beta, half_d](int t, int r) {
        const double mag = std::exp(std::lgamma(half_d + t) - half_d * std::log(M_PI) +
                                    (t + r) * std::log(0.5 * beta));
        return (r % 2 == 0) ? mag : -mag;
    };
    return g;
}

GeneratorFamily GeneratorFamily::kotz(double beta, int total_dim, int shape) {
    if (beta <= 0 || total_dim < 1 || shape < 1)
        throw std::invalid_argument("GeneratorFamily::kotz: shape must be a positive integer");
    GeneratorFamily g;
    g.name_ = "kotz(" + std::to_string(shape) + ")";
    g.beta_ = beta;
    g.total_dim_ = total_dim;
    const double half_d = 0.5 * total_dim;
    // c makes int h(z) z^{d/2-1} dz = Gamma(d/2)/pi^{d/2}
    const double ln_c = std::lgamma(half_d) - half_d * std::log(M_PI) +
                        (half_d + shape - 1) * std::log(0.5 * beta) -
                        std::lgamma(half_d + shape - 1);
    const int T = shape;
    g.derivatives_ = [beta, ln_c, T](int order, double z) {
        // dead tail: the exponential has won long before the polynomial overflows
        if (0.5 * beta * z - ln_c > 800.0 + (T + order) * std::log1p(z)) return 0.0;
        // Leibniz on z^{T-1} e^{-beta z/2}
        double sum = 0.0;
        double binom = 1.0;        // C(order, j)
        double fall = 1.0;         // (T-1)(T-2)...(T-j)
        for (int j = 0; j <= std::min(order, T - 1); ++j) {
            if (j > 0) {
                binom *= static_cast<double>(order - j + 1) / j;
                fall *= (T - j);
            }
            double mono = 1.0;
            for (int p = 0; p < T - 1 - j; ++p) mono *= z;
            const int nexp = order - j;
            double e = std::pow(-0.5 * beta, nexp);
            sum += binom * fall * mono * e;
        }
        return sum * std::exp(ln_c - 0.5 * beta * z);
    };
    g.closed_gamma_ = [beta, ln_c, T, half_d](int t, int r) {
        const int n = 2 * t + r;
        const double p = half_d + t;
        double sum = 0.0;
        double binom = 1.0, fall = 1.0;
        for (int j = 0; j <= std::min(n, T - 1); ++j) {
            if (j > 0) {
                binom *= static_cast<double>(n - j + 1) / j;
                fall *= (T - j);
            }
            const double expo = T - 1 - j + p;  // power of z after multiplying z^{p-1}
            const double mag =
                std::exp(std::lgamma(expo) + expo * std::log(2.0 / beta) +
                         (n - j) * std::log(0.5 * beta));
            sum += binom * fall * ((n - j) % 2 == 0 ? mag : -mag);
        }
        return sum * std::exp(ln_c);
    };
    return g;
}

GeneratorFamily GeneratorFamily::custom(std::string name, double beta, int total_dim,
                                        DerivativeFn derivatives,
                                        std::optional<GammaFn> closed_gamma) {
    if (beta <= 0 || total_dim < 1 || !derivatives)
        throw std::invalid_argument("GeneratorFamily::custom: bad parameters");
    GeneratorFamily g;
    g.name_ = std::move(name);
    g.beta_ = beta;
    g.total_dim_ = total_dim;
    g.derivatives_ = std::move(derivatives);
    g.closed_gamma_ = std::move(closed_gamma);
    // finiteness probe of int h(z) z^{d/2-1} dz; throws if it diverges
    g.gamma_quadrature(0, 0);
    return g;
}

double GeneratorFamily::gamma_quadrature(int t, int r) const {
    const int order = 2 * t + r;
    const double p = 0.5 * total_dim_ + t;
    return sf::integrate_semi_infinite(
               [this, order, p](double z) {
                   const double hv = derivatives_(order, z);
                   if (hv == 0.0) return 0.0;
                   return hv * std::exp((p - 1.0) * std::log(z));
               },
               1e-12)
        .value;
}

double GeneratorFamily::gamma_integral(int t, int r) const {
    if (t < 0 || r < 0) throw std::invalid_argument("gamma_integral: t, r >= 0");
    if (closed_gamma_) return (*closed_gamma_)(t, r);
    return gamma_quadrature(t, r);
}

}  // namespace ashape::shape
