#include "ashape/mc.hpp"

#include <algorithm>
#include <cmath>

#include "ashape/quadrature.hpp"
#include "ashape/special_functions.hpp"

namespace ashape::mc {

using algebra::Scalar;

BatchMeans::BatchMeans(long n_total, int n_batches) {
    if (n_total < 2) throw std::invalid_argument("BatchMeans: need n >= 2");
    n_batches = static_cast<int>(std::min<long>(n_batches, n_total));
    batch_size_ = (n_total + n_batches - 1) / n_batches;
    batch_means_.reserve(n_batches + 1);
}

void BatchMeans::add(double x) {
    current_sum_ += x;
    ++current_n_;
    ++count_;
    if (current_n_ == batch_size_) {
        batch_means_.push_back(current_sum_ / current_n_);
        current_sum_ = 0.0;
        current_n_ = 0;
    }
}

double BatchMeans::mean() const {
    double total = current_sum_;
    long n = current_n_;
    for (double b : batch_means_) {
        total += b * batch_size_;
        n += batch_size_;
    }
    return total / n;
}

double BatchMeans::std_error() const {
    const size_t nb = batch_means_.size();
    if (nb < 2) throw NumericalError("BatchMeans: too few complete batches");
    double m = 0.0;
    for (double b : batch_means_) m += b;
    m /= nb;
    double ss = 0.0;
    for (double b : batch_means_) ss += (b - m) * (b - m);
    return std::sqrt(ss / (nb - 1) / nb);
}

MatrixF sample_stiefel(AlgebraTag tag, int m, int n, Rng& rng) {
    if (m > n) throw std::invalid_argument("sample_stiefel: need m <= n");
    if (!tag.full_numeric())
        throw std::invalid_argument("sample_stiefel: no octonion sampling");
    MatrixF g = rng.gaussian_matrix(n, m, tag);
    // modified Gram-Schmidt, two passes per column
    for (int j = 0; j < m; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i < j; ++i) {
                Scalar dot;  // q_i* g_j
                for (int r = 0; r < n; ++r) dot += conj(g.at(r, i)) * g.at(r, j);
                for (int r = 0; r < n; ++r) g.at(r, j) -= g.at(r, i) * dot;
            }
        double nrm2 = 0.0;
        for (int r = 0; r < n; ++r) nrm2 += g.at(r, j).norm2();
        if (nrm2 <= 1e-24)
            throw NumericalError("sample_stiefel: rank-deficient Gaussian draw");
        const double inv = 1.0 / std::sqrt(nrm2);
        for (int r = 0; r < n; ++r) g.at(r, j) *= inv;
    }
    return g;
}

EllipticalSampler EllipticalSampler::t_mixture(int df) {
    if (df < 1) throw std::invalid_argument("EllipticalSampler: df must be >= 1");
    EllipticalSampler s;
    s.name = "t_mixture(" + std::to_string(df) + ")";
    s.scale = [df](Rng& rng) { return std::sqrt(df / rng.chi2(df)); };
    return s;
}

MatrixF sample_matrix_elliptical(const MatrixF& mu, const HermitianMatrix& sigma,
                                 const HermitianMatrix& theta,
                                 const EllipticalSampler& sampler, Rng& rng) {
    if (sigma.dim() != mu.rows() || theta.dim() != mu.cols())
        throw std::invalid_argument("sample_matrix_elliptical: dimension mismatch");
    const MatrixF sig_root = algebra::sqrt_posdef(sigma).matrix();
    const MatrixF th_root = algebra::sqrt_posdef(theta).matrix();
    MatrixF g = rng.gaussian_matrix(mu.rows(), mu.cols(), mu.algebra());
    MatrixF x = sig_root * g * th_root;
    if (sampler.scale) x *= sampler.scale(rng);
    return mu + x;
}

HermitianMatrix sample_wishart(AlgebraTag tag, int k_dim, int n_df, Rng& rng) {
    if (n_df < k_dim) throw std::invalid_argument("sample_wishart: need n_df >= k");
    const MatrixF g = rng.gaussian_matrix(n_df, k_dim, tag);
    MatrixF f = g.conj_transpose() * g;
    MatrixF sym = f + f.conj_transpose();
    sym *= 0.5;
    return HermitianMatrix::trusted(std::move(sym));
}

double wishart_log_density(const HermitianMatrix& f, int n_df) {
    const double beta = f.algebra().beta;
    const int k = f.dim();
    return -0.5 * beta * n_df * k * std::log(2.0) +
           (0.5 * beta * (n_df - k + 1) - 1.0) * algebra::log_det_posdef(f) -
           0.5 * herm_trace(f) - sf::mv_gamma_ln(beta, k, 0.5 * beta * n_df);
}

namespace {

// z-score with a floor on the denominator so estimators that happen to be
// exact (zero-variance cases) read as agreement, not as rounding noise
double z_with_floor(double estimate, double target, double std_error) {
    const double scale = std::max({std::abs(estimate), std::abs(target), 1e-300});
    return (estimate - target) / std::max(std_error, 1e-12 * scale);
}

std::vector<double> hermitian_pair_eigs(const HermitianMatrix& u, const HermitianMatrix& z) {
    // eigenvalues of U Z^{-1}: similar to Z^{-1/2} U Z^{-1/2}
    const HermitianMatrix r = algebra::sqrt_posdef(z);
    const HermitianMatrix rinv = algebra::inv_posdef(r);
    MatrixF s = rinv.matrix() * u.matrix() * rinv.matrix();
    MatrixF sym = s + s.conj_transpose();
    sym *= 0.5;
    return algebra::eigenvalues_hermitian(HermitianMatrix::trusted(std::move(sym)));
}

double rising(double x, int k) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= (x + i);
    return p;
}

}  // namespace

McReport check_stiefel_moment(const MatrixF& x, int k, long n_mc, RngSpec rng_spec,
                              bool negative_control) {
    const AlgebraTag tag = x.algebra();
    const int m = x.rows(), n = x.cols();
    if (tag.beta != 1 && tag.beta != 2)
        throw std::invalid_argument("check_stiefel_moment: beta must be 1 or 2");
    if (m > 3 || n > 3 || m > n)
        throw std::invalid_argument("check_stiefel_moment: needs m <= n <= 3");
    if (k < 0 || n_mc < 100) throw std::invalid_argument("check_stiefel_moment: bad budget");

    // analytic side: sum over kappa |- k of (1/2)_k / [beta n/2]_kappa C_kappa(X X*)
    MatrixF xxs = x * x.conj_transpose();
    MatrixF sym = xxs + xxs.conj_transpose();
    sym *= 0.5;
    const std::vector<double> eigs =
        algebra::eigenvalues_hermitian(HermitianMatrix::trusted(std::move(sym)));
    const int n_eff = negative_control ? n + 1 : n;
    double target = 0.0;
    auto table = sf::jack_table(tag.beta, k, m);
    const auto& plist = table->partitions(k);
    const std::vector<double> cvals = table->evaluate_weight(k, eigs);
    for (size_t i = 0; i < plist.size(); ++i) {
        const double den = sf::gen_pochhammer(tag.beta, 0.5 * tag.beta * n_eff, plist[i]);
        if (den == 0.0) throw PoleError("check_stiefel_moment: Pochhammer pole");
        target += rising(0.5, k) / den * cvals[i];
    }

    Rng rng(rng_spec);
    BatchMeans acc(n_mc);
    for (long i = 0; i < n_mc; ++i) {
        const MatrixF h1 = sample_stiefel(tag, m, n, rng);
        const double t = algebra::re_trace(x * h1);
        double p = 1.0;
        for (int j = 0; j < 2 * k; ++j) p *= t;
        acc.add(p);
    }
    McReport rep;
    rep.check = negative_control ? "stiefel_moment_negative" : "stiefel_moment";
    rep.params = "beta=" + std::to_string(tag.beta) + " m=" + std::to_string(m) +
                 " n=" + std::to_string(n) + " k=" + std::to_string(k);
    rep.estimate = acc.mean();
    rep.std_error = acc.std_error();
    rep.target = target;
    rep.z_score = z_with_floor(rep.estimate, rep.target, rep.std_error);
    rep.n = n_mc;
    rep.seed = rng_spec.seed;
    return rep;
}

namespace {

// fixed double-exponential grids used by the cone-integral tensor quadrature
struct DeGrid {
    std::vector<double> nodes, weights;
};

DeGrid exp_sinh_grid(double h, double umax) {
    DeGrid g;
    for (double u = -umax; u <= umax + 1e-12; u += h) {
        const double s = 0.5 * M_PI * std::sinh(u);
        if (std::abs(s) > 690.0) continue;
        const double z = std::exp(s);
        g.nodes.push_back(z);
        g.weights.push_back(h * 0.5 * M_PI * std::cosh(u) * z);
    }
    return g;
}

DeGrid sinh_sinh_grid(double h, double umax) {
    DeGrid g;
    for (double u = -umax; u <= umax + 1e-12; u += h) {
        const double s = 2.0 * std::sinh(u);
        if (std::abs(s) > 690.0) continue;
        g.nodes.push_back(std::sinh(s));
        g.weights.push_back(h * 2.0 * std::cosh(u) * std::cosh(s));
    }
    return g;
}

// Integral of the cone check at one grid resolution.  m = 1 integrates over
// x > 0 directly; m = 2 uses X = T T* with T lower triangular,
// (dX) = 2^m t11^{beta(m-1)+1} t22 (dT) for the 2 x 2 case.
double cone_lhs_quadrature(double a, const sf::Partition& kappa, const HermitianMatrix& z,
                           const HermitianMatrix& u, const std::function<double(double)>& h,
                           double step) {
    const int m = z.dim();
    const double beta = z.algebra().beta;
    auto table = sf::jack_table(beta, kappa.weight(), m);

    if (m == 1) {
        const double zz = z.matrix().at(0, 0).re();
        const double uu = u.matrix().at(0, 0).re();
        const DeGrid grid = exp_sinh_grid(step, 3.4);
        double acc = 0.0;
        for (size_t i = 0; i < grid.nodes.size(); ++i) {
            const double x = grid.nodes[i];
            const double hv = h(x * zz);
            if (hv == 0.0) continue;
            double xu = 1.0;
            for (int t = 0; t < kappa.weight(); ++t) xu *= x * uu;
            acc += grid.weights[i] * hv * std::pow(x, a - 1.0) * xu;
        }
        return acc;
    }

    // m == 2
    const int bb = static_cast<int>(beta);
    const DeGrid diag = exp_sinh_grid(step, 3.2);
    const DeGrid off = sinh_sinh_grid(step, 3.0);
    const double expo = a - 0.5 * beta - 1.0;  // |X|^{a - (m-1)beta/2 - 1}
    double acc = 0.0;
    std::vector<double> offv(bb, 0.0);
    // iterate the off-diagonal component grids with an odometer
    std::vector<size_t> idx(bb, 0);
    for (size_t i1 = 0; i1 < diag.nodes.size(); ++i1)
        for (size_t i2 = 0; i2 < diag.nodes.size(); ++i2) {
            const double t11 = diag.nodes[i1], t22 = diag.nodes[i2];
            const double wdiag = diag.weights[i1] * diag.weights[i2] * 4.0 *
                                 std::pow(t11, beta + 1.0) * t22;
            std::fill(idx.begin(), idx.end(), 0);
            while (true) {
                double woff = 1.0;
                for (int c = 0; c < bb; ++c) {
                    offv[c] = off.nodes[idx[c]];
                    woff *= off.weights[idx[c]];
                }
                // X = T T*, T = [[t11, 0], [t21, t22]]
                Scalar t21;
                for (int c = 0; c < bb; ++c) t21.c[c] = offv[c];
                MatrixF tmat = MatrixF::zero(2, 2, z.algebra());
                tmat.at(0, 0) = Scalar(t11);
                tmat.at(1, 0) = t21;
                tmat.at(1, 1) = Scalar(t22);
                MatrixF x = tmat * tmat.conj_transpose();
                const double tr_xz = algebra::re_trace(x * z.matrix());
                const double hv = h(tr_xz);
                if (hv != 0.0) {
                    const double det_x = t11 * t11 * t22 * t22;
                    // eig(X U) = eig(T* U T), which is Hermitian
                    MatrixF s = tmat.conj_transpose() * u.matrix() * tmat;
                    MatrixF sym = s + s.conj_transpose();
                    sym *= 0.5;
                    const std::vector<double> exu = algebra::eigenvalues_hermitian(
                        HermitianMatrix::trusted(std::move(sym)));
                    const double ck = table->evaluate(kappa, exu);
                    acc += wdiag * woff * hv * std::pow(det_x, expo) * ck;
                }
                int c = 0;
                while (c < bb && ++idx[c] == off.nodes.size()) idx[c++] = 0;
                if (c == bb) break;
            }
        }
    return acc;
}

}  // namespace

McReport check_cone_integral(double a, const sf::Partition& kappa, const HermitianMatrix& z,
                             const HermitianMatrix& u,
                             const std::function<double(double)>& h, long budget,
                             bool negative_control) {
    const int m = z.dim();
    const double beta = z.algebra().beta;
    if (m > 2) throw std::invalid_argument("check_cone_integral: m <= 2 only");
    if (z.algebra().beta != 1 && z.algebra().beta != 2)
        throw std::invalid_argument("check_cone_integral: beta must be 1 or 2");
    if (u.dim() != m) throw std::invalid_argument("check_cone_integral: U must match Z");
    if (!(a > 0.5 * (m - 1) * beta - kappa.part(m)))
        throw std::invalid_argument("check_cone_integral: a out of range");

    const int k = kappa.weight();
    // gamma = int h(z) z^{am + k - 1} dz (exponent + 1 is the negative control)
    const double gexp = a * m + k - 1.0 + (negative_control ? 1.0 : 0.0);
    const double gamma = sf::integrate_semi_infinite(
                             [&](double t) {
                                 const double hv = h(t);
                                 return hv == 0.0 ? 0.0 : hv * std::pow(t, gexp);
                             },
                             1e-12)
                             .value;

    auto table = sf::jack_table(beta, k, m);
    const std::vector<double> uz_eigs = hermitian_pair_eigs(u, z);
    const double c_uz = table->evaluate(kappa, uz_eigs);
    const double target = sf::gen_pochhammer(beta, a, kappa) *
                          std::exp(sf::mv_gamma_ln(beta, m, a) - std::lgamma(a * m + k)) *
                          std::exp(-a * algebra::log_det_posdef(z)) * c_uz * gamma;

    // two grid resolutions give the estimate and its error bar
    const int dims = (m == 1) ? 1 : 2 + static_cast<int>(beta);
    double per_dim = std::pow(static_cast<double>(std::max<long>(budget, 1000)),
                              1.0 / dims);
    per_dim = std::min(per_dim, 161.0);
    const double step_fine = 6.8 / std::max(per_dim, 17.0);
    const double coarse = cone_lhs_quadrature(a, kappa, z, u, h, 2.0 * step_fine);
    const double fine = cone_lhs_quadrature(a, kappa, z, u, h, step_fine);

    McReport rep;
    rep.check = negative_control ? "cone_integral_negative" : "cone_integral";
    rep.params = "beta=" + std::to_string(z.algebra().beta) + " m=" + std::to_string(m) +
                 " a=" + std::to_string(a) + " kappa=" + kappa.to_string();
    rep.estimate = fine;
    rep.std_error = std::max(std::abs(fine - coarse), 1e-9 * std::abs(fine) + 1e-300);
    rep.target = target;
    rep.z_score = z_with_floor(rep.estimate, rep.target, rep.std_error);
    rep.n = budget;
    rep.seed = 0;
    return rep;
}

McReport check_jacobian(AlgebraTag tag, int K, int q, long n_mc, RngSpec rng_spec,
                        double exponent_offset) {
    if (tag.beta != 1 && tag.beta != 2)
        throw std::invalid_argument("check_jacobian: beta must be 1 or 2");
    if (K < 1 || K > 2 || q < 1 || q > 3)
        throw std::invalid_argument("check_jacobian: K <= 2 and q <= 3 only");
    const double beta = tag.beta;
    const int d = static_cast<int>(beta) * K * (K + q);
    // bump variance != 1 keeps the exponent perturbation visible at every
    // (beta, K, q); at variance 1 the q = 1 case is blind to a +1 shift
    const double bump_var = 2.0;
    // F-proposal: scaled Wishart with df = K so the small-F power matches the
    // target integrand (|F|^{beta/2 - 1} after the V-marginalization) and the
    // scale over-disperses the tail; both ends keep the weights bounded
    const int wishart_df = K;
    const double f_scale = 1.5 * bump_var;
    const int herm_dim = K + K * (K - 1) * static_cast<int>(beta) / 2;

    Rng rng(rng_spec);
    BatchMeans acc(n_mc);
    const double ln_vol_u = sf::stiefel_volume_ln(beta, K, K);
    for (long it = 0; it < n_mc; ++it) {
        const MatrixF h = sample_stiefel(tag, K, K, rng);
        MatrixF f_m = sample_wishart(tag, K, wishart_df, rng).matrix();
        f_m *= f_scale;
        const HermitianMatrix f = HermitianMatrix::trusted(std::move(f_m));
        const MatrixF e = algebra::sqrt_posdef(f).matrix() * h;
        // V spreads like E^{-1} under the bump; drawing the bottom block
        // W = V E directly and mapping back keeps the weights bounded.
        // The V-density picks up the linear-map Jacobian |F|^{beta q / 2}.
        MatrixF w_block = rng.gaussian_matrix(q, K, tag);
        w_block *= std::sqrt(bump_var);
        double ln_pw = 0.0;
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < K; ++j)
                for (int c = 0; c < tag.beta; ++c) {
                    const double zz = w_block.at(i, j).c[c];
                    ln_pw += -0.5 * zz * zz / bump_var -
                             0.5 * std::log(2.0 * M_PI * bump_var);
                }
        const MatrixF v = w_block * algebra::inverse(e);
        const double ln_pv = ln_pw + 0.5 * beta * q * algebra::log_det_posdef(f);

        const shape::ConfigurationCoordinates coords{v};
        const MatrixF y = coords.u() * e;
        const double g =
            std::exp(-0.5 * y.frobenius_norm() * y.frobenius_norm() / bump_var -
                     0.5 * d * std::log(2.0 * M_PI * bump_var));
        const double ln_jac = -K * std::log(2.0) +
                              (0.5 * beta * (q + 1) - 1.0 + exponent_offset) *
                                  algebra::log_det_posdef(f);
        // density of the scaled draw: p(F) = p_wishart(F / c) / c^{dim}
        MatrixF unscaled = f.matrix();
        unscaled *= 1.0 / f_scale;
        const double ln_pf =
            wishart_log_density(HermitianMatrix::trusted(std::move(unscaled)), wishart_df) -
            herm_dim * std::log(f_scale);
        const double ln_weight = ln_jac - ln_pf - ln_pv + ln_vol_u;
        acc.add(g * std::exp(ln_weight));
    }
    McReport rep;
    rep.check = exponent_offset == 0.0 ? "jacobian" : "jacobian_negative";
    rep.params = "beta=" + std::to_string(tag.beta) + " K=" + std::to_string(K) +
                 " q=" + std::to_string(q);
    rep.estimate = acc.mean();
    rep.std_error = acc.std_error();
    rep.target = 1.0;
    rep.z_score = z_with_floor(rep.estimate, rep.target, rep.std_error);
    rep.n = n_mc;
    rep.seed = rng_spec.seed;
    return rep;
}

McReport check_density_normalization(
    const std::function<double(const shape::ConfigurationCoordinates&)>& density,
    AlgebraTag tag, int K, int q, const MatrixF& proposal_center, double proposal_scale,
    long n_mc, RngSpec rng_spec, double scale_error) {
    const int d = tag.beta * K * q;
    if (d > 6)
        throw std::invalid_argument("check_density_normalization: beta K q <= 6 only");
    if (proposal_center.rows() != q || proposal_center.cols() != K)
        throw std::invalid_argument("check_density_normalization: center must be q x K");
    // multivariate Cauchy proposal: the shape densities have polynomial
    // radial tails, so a product of univariate t's is too thin along the
    // diagonal directions and its importance weights have infinite variance
    const double ln_norm = std::lgamma(0.5 * (1 + d)) - std::lgamma(0.5) -
                           0.5 * d * std::log(M_PI) - d * std::log(proposal_scale);
    Rng rng(rng_spec);
    BatchMeans acc(n_mc);
    for (long it = 0; it < n_mc; ++it) {
        const double mix = std::sqrt(rng.chi2(1));
        MatrixF v(q, K, tag);
        double r2 = 0.0;
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < K; ++j) {
                Scalar s = proposal_center.at(i, j);
                for (int c = 0; c < tag.beta; ++c) {
                    const double t = rng.normal() / mix;
                    s.c[c] += proposal_scale * t;
                    r2 += t * t;
                }
                v.at(i, j) = s;
            }
        const double ln_p = ln_norm - 0.5 * (1 + d) * std::log1p(r2);
        const double f = density(shape::ConfigurationCoordinates{v});
        acc.add(scale_error * f * std::exp(-ln_p));
    }
    McReport rep;
    rep.check = scale_error == 1.0 ? "density_normalization" : "density_normalization_negative";
    rep.params = "beta=" + std::to_string(tag.beta) + " K=" + std::to_string(K) +
                 " q=" + std::to_string(q);
    rep.estimate = acc.mean();
    rep.std_error = acc.std_error();
    rep.target = 1.0;
    rep.z_score = z_with_floor(rep.estimate, rep.target, rep.std_error);
    rep.n = n_mc;
    rep.seed = rng_spec.seed;
    return rep;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

double ks_threshold(long n_a, long n_b, double alpha) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c * std::sqrt(static_cast<double>(n_a + n_b) /
                         (static_cast<double>(n_a) * n_b));
}

InvarianceReport check_central_invariance(const EllipticalSampler& gen_a,
                                          const EllipticalSampler& gen_b, AlgebraTag tag,
                                          int N, int K, const HermitianMatrix& sigma,
                                          const HermitianMatrix& theta, long n_per_group,
                                          RngSpec rng_spec,
                                          const std::optional<MatrixF>& mu_b) {
    if (K < 1 || N < K + 2)
        throw std::invalid_argument("check_central_invariance: need q >= 1");
    const int q = N - K - 1;
    Rng rng(rng_spec);
    const MatrixF sig_root = algebra::sqrt_posdef(sigma).matrix();
    const MatrixF th_root = algebra::sqrt_posdef(theta).matrix();
    const MatrixF zero_mu = MatrixF::zero(N - 1, K, tag);

    auto draw_group = [&](const EllipticalSampler& gen, const MatrixF& mu, long& discarded) {
        std::vector<shape::ConfigurationCoordinates> out;
        out.reserve(n_per_group);
        const long discard_budget = std::max<long>(1, n_per_group / 1000);
        while (static_cast<long>(out.size()) < n_per_group) {
            MatrixF g = rng.gaussian_matrix(N - 1, K, tag);
            MatrixF r = sig_root * g * th_root;
            if (gen.scale) r *= gen.scale(rng);
            r += mu;
            try {
                out.push_back(shape::configuration_coords_reduced(
                    r, HermitianMatrix::trusted(th_root * th_root)));
            } catch (const SingularMatrix&) {
                if (++discarded > discard_budget)
                    throw NumericalError(
                        "check_central_invariance: degenerate draws above 0.1% budget");
            }
        }
        return out;
    };

    InvarianceReport rep;
    rep.n_per_group = n_per_group;
    rep.seed = rng_spec.seed;
    auto va = draw_group(gen_a, zero_mu, rep.discarded_a);
    auto vb = draw_group(gen_b, mu_b ? *mu_b : zero_mu, rep.discarded_b);

    // statistics: ||V||_F then each real coordinate
    const int ncoord = tag.beta * K * q;
    std::vector<std::vector<double>> stats_a(1 + ncoord), stats_b(1 + ncoord);
    auto collect = [&](const std::vector<shape::ConfigurationCoordinates>& vs,
                       std::vector<std::vector<double>>& stats) {
        for (const auto& cc : vs) {
            stats[0].push_back(cc.v.frobenius_norm());
            int s = 1;
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < K; ++j)
                    for (int c = 0; c < tag.beta; ++c) stats[s++].push_back(cc.v.at(i, j).c[c]);
        }
    };
    collect(va, stats_a);
    collect(vb, stats_b);

    rep.threshold = ks_threshold(n_per_group, n_per_group, 0.01);
    rep.pass = true;
    for (size_t s = 0; s < stats_a.size(); ++s) {
        const double d = ks_two_sample(stats_a[s], stats_b[s]);
        rep.statistics.push_back(d);
        if (d > rep.threshold) rep.pass = false;
    }
    return rep;
}

}  // namespace ashape::mc
