#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace ashape::shape {

// Radial profile h of a matrix-variate elliptical density together with its
// derivatives of arbitrary order.  A generator is tied to the total real
// dimension d = beta K (N-1) of the matrix it generates, because the density
// normalization depends on it.
//
// gamma_integral(t, r) is the weight appearing in the shape-density series:
//   gamma(t, r) = int_0^inf h^(2t+r)(z) z^{d/2 + t - 1} dz.
// Families with a closed form use it; anything else falls back to
// double-exponential quadrature at 1e-12 absolute tolerance.
class GeneratorFamily {
  public:
    using DerivativeFn = std::function<double(int order, double z)>;
    using GammaFn = std::function<double(int t, int r)>;

    // h(v) = (2 pi / beta)^{-d/2} exp(-beta v / 2); exact derivatives and
    // gamma(t,r) = Gamma[d/2 + t] / pi^{d/2} (-beta/2)^r (beta/2)^t.
    static GeneratorFamily gaussian(double beta, int total_dim);

    // Kotz type with positive integer shape T (T = 1 reduces to Gaussian):
    // h(v) = c v^{T-1} exp(-beta v / 2), c fixing the density normalization.
    // Derivatives by the Leibniz rule on polynomial x exponential.
    static GeneratorFamily kotz(double beta, int total_dim, int shape);

    // User-supplied derivative evaluator.  gamma(0,0) is probed by quadrature
    // at construction so non-integrable profiles fail fast.
    static GeneratorFamily custom(std::string name, double beta, int total_dim,
                                  DerivativeFn derivatives,
                                  std::optional<GammaFn> closed_gamma = std::nullopt);

    // A default-constructed family is a placeholder; using one throws.
    GeneratorFamily() = default;

    const std::string& name() const { return name_; }
    double beta() const { return beta_; }
    int total_dim() const { return total_dim_; }
    bool has_closed_gamma() const { return static_cast<bool>(closed_gamma_); }

    double derivative(int order, double z) const {
        if (!derivatives_)
            throw std::invalid_argument("GeneratorFamily: empty generator");
        return derivatives_(order, z);
    }
    double operator()(double z) const { return derivative(0, z); }

    double gamma_integral(int t, int r) const;
    double gamma_quadrature(int t, int r) const;  // always integrates, for cross-checks

  private:
    std::string name_;
    double beta_ = 1.0;
    int total_dim_ = 0;
    DerivativeFn derivatives_;
    std::optional<GammaFn> closed_gamma_;
};

// gamma(t, r) for the Gaussian generator in closed form (any beta, including 8).
double gaussian_gamma_closed(double beta, int K, int N, int t, int r);

}  // namespace ashape::shape
