#include "ashape/shape.hpp"

#include <cmath>

#include "ashape/special_functions.hpp"

namespace ashape::shape {

using algebra::Scalar;

MatrixF helmert_submatrix(int N) { return helmert_submatrix(N, AlgebraTag::real()); }

MatrixF helmert_submatrix(int N, AlgebraTag algebra) {
    if (N < 2) throw std::invalid_argument("helmert_submatrix: N must be >= 2");
    MatrixF l(N - 1, N, algebra);
    for (int i = 1; i <= N - 1; ++i) {
        const double s = 1.0 / std::sqrt(static_cast<double>(i) * (i + 1));
        for (int j = 0; j < i; ++j) l.at(i - 1, j) = Scalar(s);
        l.at(i - 1, i) = Scalar(-i * s);
    }
    return l;
}

MatrixF ConfigurationCoordinates::u() const {
    MatrixF r = MatrixF::zero(v.rows() + v.cols(), v.cols(), v.algebra());
    for (int j = 0; j < v.cols(); ++j) r.at(j, j) = Scalar(1.0);
    for (int i = 0; i < v.rows(); ++i)
        for (int j = 0; j < v.cols(); ++j) r.at(v.cols() + i, j) = v.at(i, j);
    return r;
}

ConfigurationCoordinates configuration_coords(const MatrixF& x, const HermitianMatrix& theta) {
    const int N = x.rows(), K = x.cols();
    if (N < K + 2)
        throw std::invalid_argument("configuration_coords: need q = N-K-1 >= 1");
    if (theta.dim() != K)
        throw std::invalid_argument("configuration_coords: Theta must be K x K");
    const MatrixF l = helmert_submatrix(N, x.algebra());
    const HermitianMatrix theta_isqrt = algebra::inv_posdef(algebra::sqrt_posdef(theta));
    const MatrixF y = l * x * theta_isqrt.matrix();
    const MatrixF y1 = y.block(0, 0, K, K);
    const MatrixF y2 = y.block(K, 0, N - 1 - K, K);
    MatrixF y1_inv;
    try {
        y1_inv = algebra::inverse(y1);
    } catch (const SingularMatrix&) {
        throw SingularMatrix(
            "configuration_coords: degenerate configuration (Y1 singular)");
    }
    return ConfigurationCoordinates{y2 * y1_inv};
}

ConfigurationCoordinates configuration_coords(const MatrixF& x) {
    const int K = x.cols();
    return configuration_coords(
        x, HermitianMatrix::trusted(MatrixF::identity(K, x.algebra())));
}

ConfigurationCoordinates configuration_coords_reduced(
    const MatrixF& r, const std::optional<HermitianMatrix>& theta) {
    const int K = r.cols();
    if (r.rows() < K + 1)
        throw std::invalid_argument("configuration_coords_reduced: need q >= 1");
    MatrixF y = r;
    if (theta) {
        const HermitianMatrix theta_isqrt =
            algebra::inv_posdef(algebra::sqrt_posdef(*theta));
        y = r * theta_isqrt.matrix();
    }
    const MatrixF y1 = y.block(0, 0, K, K);
    const MatrixF y2 = y.block(K, 0, y.rows() - K, K);
    MatrixF y1_inv;
    try {
        y1_inv = algebra::inverse(y1);
    } catch (const SingularMatrix&) {
        throw SingularMatrix(
            "configuration_coords_reduced: degenerate configuration (Y1 singular)");
    }
    return ConfigurationCoordinates{y2 * y1_inv};
}

double jacobian_log_factor(const HermitianMatrix& f, double beta, int K, int q) {
    if (f.dim() != K) throw std::invalid_argument("jacobian_log_factor: F must be K x K");
    if (q < 1) throw std::invalid_argument("jacobian_log_factor: q must be >= 1");
    const double log_det = algebra::log_det_posdef(f);  // throws if not pd
    return -K * std::log(2.0) + (0.5 * beta * (q + 1) - 1.0) * log_det;
}

MatrixF EllipticalShapeModel::reduce_location(const MatrixF& mu_x) {
    return helmert_submatrix(mu_x.rows(), mu_x.algebra()) * mu_x;
}

EllipticalShapeModel EllipticalShapeModel::make(int N, int K, AlgebraTag algebra,
                                                MatrixF reduced_mu,
                                                std::optional<HermitianMatrix> sigma,
                                                double sigma2,
                                                std::optional<HermitianMatrix> theta,
                                                GeneratorFamily generator) {
    if (K < 1 || N < K + 2)
        throw std::invalid_argument("EllipticalShapeModel: need K >= 1 and q = N-K-1 >= 1");
    if (!algebra.full_numeric())
        throw std::invalid_argument(
            "EllipticalShapeModel: matrix-level models need beta in {1,2,4}; "
            "use the *_ln_parts formula surface for beta = 8");
    if (reduced_mu.rows() != N - 1 || reduced_mu.cols() != K)
        throw std::invalid_argument("EllipticalShapeModel: mu must be (N-1) x K");
    if (sigma) {
        if (sigma->dim() != N - 1)
            throw std::invalid_argument("EllipticalShapeModel: Sigma must be (N-1) x (N-1)");
        algebra::cholesky(*sigma);  // positive-definiteness probe
    } else if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("EllipticalShapeModel: sigma^2 must be positive");
    }
    if (theta) {
        if (theta->dim() != K)
            throw std::invalid_argument("EllipticalShapeModel: Theta must be K x K");
        algebra::cholesky(*theta);
    }
    if (generator.total_dim() != algebra.beta * K * (N - 1) ||
        generator.beta() != algebra.beta)
        throw std::invalid_argument(
            "EllipticalShapeModel: generator built for different dimensions");
    EllipticalShapeModel m;
    m.N = N;
    m.K = K;
    m.algebra = algebra;
    m.mu = std::move(reduced_mu);
    m.sigma = std::move(sigma);
    m.sigma2 = sigma2;
    m.theta = std::move(theta);
    m.generator = std::move(generator);
    return m;
}

namespace {

// eigenvalues of G^{-1/2} M G^{-1/2}, the Hermitian representative of M G^{-1}
std::vector<double> similar_eigenvalues(const HermitianMatrix& m, const HermitianMatrix& g) {
    const HermitianMatrix root = algebra::sqrt_posdef(g);
    const HermitianMatrix rinv = algebra::inv_posdef(root);
    MatrixF s = rinv.matrix() * m.matrix() * rinv.matrix();
    MatrixF sym = s + s.conj_transpose();
    sym *= 0.5;
    return algebra::eigenvalues_hermitian(HermitianMatrix::trusted(std::move(sym)));
}

HermitianMatrix sandwich(const MatrixF& b, const std::optional<HermitianMatrix>& theta) {
    // b* theta^{-1} b, Hermitian by construction
    MatrixF m = theta ? b.conj_transpose() * algebra::inv_posdef(*theta).matrix() * b
                      : b.conj_transpose() * b;
    MatrixF sym = m + m.conj_transpose();
    sym *= 0.5;
    return HermitianMatrix::trusted(std::move(sym));
}

// The triple series of the noncentral density:
//   sum_t sum_r sum_{tau |- t}  (tr Omega)^r / r!  *  gamma(t, r) *
//   [beta(N-1)/2]_tau / [beta K/2]_tau * C_tau(eigs) / (t! Gamma[beta K(N-1)/2 + t])
double noncentral_series(double beta, int N, int K, double tr_omega,
                         const std::vector<double>& jack_eigs,
                         const GeneratorFamily& generator, const TruncationPolicy& trunc) {
    const double a_top = 0.5 * beta * (N - 1);
    const double b_bot = 0.5 * beta * K;
    const double half_d = 0.5 * beta * K * (N - 1);
    const int t_cap = std::min(trunc.max_t, trunc.max_shell);
    auto table = sf::jack_table(beta, t_cap, K);

    double sum = 0.0, comp = 0.0;
    double t_factorial = 1.0;
    int small_t = 0;
    for (int t = 0; t <= t_cap; ++t) {
        if (t > 0) t_factorial *= t;
        // inner partition sum at weight t
        const auto& plist = table->partitions(t);
        const std::vector<double> cvals = table->evaluate_weight(t, jack_eigs);
        double jack_part = 0.0;
        for (size_t i = 0; i < plist.size(); ++i) {
            if (cvals[i] == 0.0) continue;
            const double num = sf::gen_pochhammer(beta, a_top, plist[i]);
            const double den = sf::gen_pochhammer(beta, b_bot, plist[i]);
            if (den == 0.0)
                throw PoleError("noncentral_series: [beta K/2]_tau vanished");
            jack_part += num / den * cvals[i];
        }
        // inner sum over r
        double r_sum = 0.0;
        if (jack_part != 0.0) {
            double pow_tr = 1.0, r_factorial = 1.0;
            int small_r = 0;
            int r = 0;
            for (;; ++r) {
                if (r > 0) {
                    pow_tr *= tr_omega;
                    r_factorial *= r;
                }
                const double term = pow_tr / r_factorial * generator.gamma_integral(t, r);
                r_sum += term;
                if (std::abs(term) <= trunc.tol * std::max(std::abs(r_sum), 1e-300)) {
                    if (++small_r >= 2) break;
                } else {
                    small_r = 0;
                }
                if (r >= trunc.max_r)
                    throw ConvergenceError(
                        "noncentral_series: r-series not converged within max_r = " +
                        std::to_string(trunc.max_r));
            }
        }
        const double term_t =
            jack_part * r_sum / (t_factorial * std::exp(std::lgamma(half_d + t)));
        const double y = term_t - comp;
        const double tt = sum + y;
        comp = (tt - sum) - y;
        sum = tt;
        if (std::abs(term_t) <= trunc.tol * std::max(std::abs(sum), 1e-300)) {
            if (++small_t >= 2) break;
        } else {
            small_t = 0;
        }
        if (t == t_cap)
            throw ConvergenceError("noncentral_series: t-series not converged within max_t = " +
                                   std::to_string(t_cap));
    }
    return sum;
}

double ln_norm_constant(double beta, int N, int K) {
    const int q = N - K - 1;
    return sf::mv_gamma_ln(beta, K, 0.5 * beta * (N - 1)) -
           0.5 * beta * K * q * std::log(M_PI) - sf::mv_gamma_ln(beta, K, 0.5 * beta * K);
}

// scalar Kummer 1F1 (K = 1 collapses every pFq^beta surface to the classics)
double kummer_1f1(double a, double b, double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 500; ++k) {
        if (a + k == 0.0) return sum;  // terminated exactly
        term *= (a + k) / (b + k) * x / (k + 1);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum) && k > 2) return sum;
    }
    throw ConvergenceError("kummer_1f1: series not converged");
}

}  // namespace

double density_central_ln_parts(double beta, int N, int K, double log_det_sigma,
                                double log_det_w) {
    if (K < 1 || N < K + 2)
        throw std::invalid_argument("density_central: need q = N-K-1 >= 1");
    return ln_norm_constant(beta, N, K) - 0.5 * beta * K * log_det_sigma -
           0.5 * beta * (N - 1) * log_det_w;
}

double density_central(const ConfigurationCoordinates& v, const HermitianMatrix& sigma,
                       double beta, int N, int K) {
    if (v.K() != K || v.q() != N - K - 1)
        throw std::invalid_argument("density_central: V has inconsistent dimensions");
    if (sigma.dim() != N - 1)
        throw std::invalid_argument("density_central: Sigma must be (N-1) x (N-1)");
    const MatrixF u = v.u();
    const HermitianMatrix sigma_inv = algebra::inv_posdef(sigma);
    MatrixF w = u.conj_transpose() * sigma_inv.matrix() * u;
    MatrixF wsym = w + w.conj_transpose();
    wsym *= 0.5;
    const double log_det_w = algebra::log_det_posdef(HermitianMatrix::trusted(std::move(wsym)));
    return std::exp(density_central_ln_parts(beta, N, K, algebra::log_det_posdef(sigma),
                                             log_det_w));
}

double density_general(const ConfigurationCoordinates& v, const EllipticalShapeModel& model,
                       const TruncationPolicy& trunc) {
    const int N = model.N, K = model.K;
    const double beta = model.algebra.beta;
    if (v.K() != K || v.q() != model.q())
        throw std::invalid_argument("density_general: V has inconsistent dimensions");
    const MatrixF u = v.u();

    HermitianMatrix sigma_inv =
        model.sigma ? algebra::inv_posdef(*model.sigma)
                    : HermitianMatrix::trusted((1.0 / model.sigma2) *
                                               MatrixF::identity(N - 1, model.algebra));
    const double log_det_sigma = model.sigma
                                     ? algebra::log_det_posdef(*model.sigma)
                                     : (N - 1) * std::log(model.sigma2);

    const MatrixF t_mat = sigma_inv.matrix() * u;  // Sigma^{-1} U
    MatrixF w_raw = u.conj_transpose() * t_mat;
    MatrixF w_sym = w_raw + w_raw.conj_transpose();
    w_sym *= 0.5;
    const HermitianMatrix w = HermitianMatrix::trusted(std::move(w_sym));

    const MatrixF b = model.mu.conj_transpose() * t_mat;  // mu* Sigma^{-1} U
    const HermitianMatrix m = sandwich(b, model.theta);
    const std::vector<double> jack_eigs = similar_eigenvalues(m, w);

    const MatrixF c = model.mu.conj_transpose() * (sigma_inv.matrix() * model.mu);
    const double tr_omega =
        model.theta ? algebra::re_trace(algebra::inv_posdef(*model.theta).matrix() * c)
                    : algebra::re_trace(c);

    const double ln_pref = 0.5 * beta * K * K * std::log(M_PI) +
                           sf::mv_gamma_ln(beta, K, 0.5 * beta * (N - 1)) -
                           sf::mv_gamma_ln(beta, K, 0.5 * beta * K) -
                           0.5 * beta * K * log_det_sigma -
                           0.5 * beta * (N - 1) * algebra::log_det_posdef(w);
    const double series =
        noncentral_series(beta, N, K, tr_omega, jack_eigs, model.generator, trunc);
    return std::exp(ln_pref) * series;
}

double density_isotropic(const ConfigurationCoordinates& v, const MatrixF& mu,
                         const std::optional<HermitianMatrix>& theta, double sigma2,
                         const GeneratorFamily& generator, const TruncationPolicy& trunc) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("density_isotropic: sigma^2 > 0");
    const int K = v.K(), q = v.q(), N = q + K + 1;
    const double beta = v.v.algebra().beta;
    if (mu.rows() != N - 1 || mu.cols() != K)
        throw std::invalid_argument("density_isotropic: mu must be (N-1) x K");
    const MatrixF u = v.u();

    MatrixF g_raw = u.conj_transpose() * u;  // I + V*V
    MatrixF g_sym = g_raw + g_raw.conj_transpose();
    g_sym *= 0.5;
    const HermitianMatrix g = HermitianMatrix::trusted(std::move(g_sym));

    const MatrixF b = mu.conj_transpose() * u;
    HermitianMatrix m1 = sandwich(b, theta);
    MatrixF m1_scaled = m1.matrix();
    m1_scaled *= 1.0 / sigma2;
    const std::vector<double> jack_eigs =
        similar_eigenvalues(HermitianMatrix::trusted(std::move(m1_scaled)), g);

    const MatrixF c = mu.conj_transpose() * mu;
    const double tr_omega =
        (theta ? algebra::re_trace(algebra::inv_posdef(*theta).matrix() * c)
               : algebra::re_trace(c)) /
        sigma2;

    const double ln_pref = 0.5 * beta * K * K * std::log(M_PI) +
                           sf::mv_gamma_ln(beta, K, 0.5 * beta * (N - 1)) -
                           sf::mv_gamma_ln(beta, K, 0.5 * beta * K) -
                           0.5 * beta * (N - 1) * algebra::log_det_posdef(g);
    const double series = noncentral_series(beta, N, K, tr_omega, jack_eigs, generator, trunc);
    return std::exp(ln_pref) * series;
}

namespace {

// shared tail of the two Gaussian closed forms once the invariants are known
double gaussian_ln_from_parts(double beta, int N, int K, double tr_omega,
                              const std::vector<double>& a_eigs, double log_det_product,
                              const TruncationPolicy& trunc) {
    const int q = N - K - 1;
    double tr_a = 0.0;
    for (double x : a_eigs) tr_a += x;

    double ln_f;
    if (K == 1) {
        ln_f = std::log(kummer_1f1(-0.5 * beta * q, 0.5 * beta, -0.5 * beta * a_eigs[0]));
    } else {
        std::vector<double> scaled(a_eigs);
        for (double& x : scaled) x *= -0.5 * beta;
        sf::HypergeometricSpec spec;
        spec.upper = {-0.5 * beta * q};
        spec.lower = {0.5 * beta * K};
        spec.beta = beta;
        const double rounded = std::round(0.5 * beta * q);
        const bool integer_upper = std::abs(0.5 * beta * q - rounded) < 1e-9;
        spec.max_weight = integer_upper
                              ? static_cast<int>(rounded) * K
                              : std::max(40, trunc.max_shell);
        spec.tol = std::min(trunc.tol, 1e-10);
        const double f = sf::hypergeometric_value(spec, scaled);
        if (!(f > 0.0))
            throw NumericalError("density_gaussian: 1F1 collapsed to a nonpositive value");
        ln_f = std::log(f);
    }
    return ln_norm_constant(beta, N, K) - 0.5 * beta * (tr_omega - tr_a) + ln_f -
           log_det_product;
}

}  // namespace

double density_gaussian(const ConfigurationCoordinates& v, const MatrixF& mu,
                        const HermitianMatrix& sigma,
                        const std::optional<HermitianMatrix>& theta,
                        const TruncationPolicy& trunc) {
    const int K = v.K(), q = v.q(), N = q + K + 1;
    const double beta = v.v.algebra().beta;
    if (mu.rows() != N - 1 || mu.cols() != K)
        throw std::invalid_argument("density_gaussian: mu must be (N-1) x K");
    if (sigma.dim() != N - 1)
        throw std::invalid_argument("density_gaussian: Sigma must be (N-1) x (N-1)");
    const MatrixF u = v.u();

    const HermitianMatrix sigma_inv = algebra::inv_posdef(sigma);
    const MatrixF t_mat = sigma_inv.matrix() * u;
    MatrixF w_raw = u.conj_transpose() * t_mat;
    MatrixF w_sym = w_raw + w_raw.conj_transpose();
    w_sym *= 0.5;
    const HermitianMatrix w = HermitianMatrix::trusted(std::move(w_sym));

    const MatrixF b = mu.conj_transpose() * t_mat;
    const HermitianMatrix m = sandwich(b, theta);
    const std::vector<double> a_eigs = similar_eigenvalues(m, w);

    const MatrixF c = mu.conj_transpose() * (sigma_inv.matrix() * mu);
    const double tr_omega =
        theta ? algebra::re_trace(algebra::inv_posdef(*theta).matrix() * c)
              : algebra::re_trace(c);

    const double log_det_product = 0.5 * beta * K * algebra::log_det_posdef(sigma) +
                                   0.5 * beta * (N - 1) * algebra::log_det_posdef(w);
    return std::exp(
        gaussian_ln_from_parts(beta, N, K, tr_omega, a_eigs, log_det_product, trunc));
}

double density_gaussian_isotropic_ln(const ConfigurationCoordinates& v, const MatrixF& mu,
                                     double sigma2,
                                     const std::optional<HermitianMatrix>& theta,
                                     const TruncationPolicy& trunc) {
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("density_gaussian_isotropic: sigma^2 > 0");
    const int K = v.K(), q = v.q(), N = q + K + 1;
    const double beta = v.v.algebra().beta;
    if (mu.rows() != N - 1 || mu.cols() != K)
        throw std::invalid_argument("density_gaussian_isotropic: mu must be (N-1) x K");

    if (K == 1 && !theta) {
        // scalar path: G = 1 + |V|^2, B = mu* U, everything stays in the algebra
        double g = 1.0;
        for (int i = 0; i < v.q(); ++i) g += v.v.at(i, 0).norm2();
        Scalar bacc = conj(mu.at(0, 0));
        for (int i = 0; i < v.q(); ++i) bacc += conj(mu.at(i + 1, 0)) * v.v.at(i, 0);
        double mu_norm2 = 0.0;
        for (int i = 0; i < N - 1; ++i) mu_norm2 += mu.at(i, 0).norm2();
        const double a = bacc.norm2() / (sigma2 * g);
        const double tr_omega = mu_norm2 / sigma2;
        const double f = kummer_1f1(-0.5 * beta * q, 0.5 * beta, -0.5 * beta * a);
        return ln_norm_constant(beta, N, 1) - 0.5 * beta * (tr_omega - a) + std::log(f) -
               0.5 * beta * (N - 1) * std::log(g);
    }

    const MatrixF u = v.u();
    MatrixF g_raw = u.conj_transpose() * u;
    MatrixF g_sym = g_raw + g_raw.conj_transpose();
    g_sym *= 0.5;
    const HermitianMatrix g = HermitianMatrix::trusted(std::move(g_sym));

    const MatrixF b = mu.conj_transpose() * u;
    HermitianMatrix m1 = sandwich(b, theta);
    MatrixF m1_scaled = m1.matrix();
    m1_scaled *= 1.0 / sigma2;
    const std::vector<double> a_eigs =
        similar_eigenvalues(HermitianMatrix::trusted(std::move(m1_scaled)), g);

    const MatrixF c = mu.conj_transpose() * mu;
    const double tr_omega =
        (theta ? algebra::re_trace(algebra::inv_posdef(*theta).matrix() * c)
               : algebra::re_trace(c)) /
        sigma2;
    const double log_det_product = 0.5 * beta * (N - 1) * algebra::log_det_posdef(g);
    return gaussian_ln_from_parts(beta, N, K, tr_omega, a_eigs, log_det_product, trunc);
}

double density_gaussian_isotropic(const ConfigurationCoordinates& v, const MatrixF& mu,
                                  double sigma2, const std::optional<HermitianMatrix>& theta,
                                  const TruncationPolicy& trunc) {
    return std::exp(density_gaussian_isotropic_ln(v, mu, sigma2, theta, trunc));
}

}  // namespace ashape::shape
