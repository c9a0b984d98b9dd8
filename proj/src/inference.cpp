#include "ashape/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ashape/rng.hpp"

namespace ashape::inference {

using algebra::MatrixF;
using algebra::Scalar;

namespace {

// regularized lower incomplete gamma by series
double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw ConvergenceError("chisq_sf: incomplete gamma series stalled");
}

// regularized upper incomplete gamma by Lentz continued fraction
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw ConvergenceError("chisq_sf: incomplete gamma continued fraction stalled");
}

}  // namespace

double chisq_sf(double x, int df) {
    if (df < 1) throw std::invalid_argument("chisq_sf: df must be >= 1");
    if (x < 0.0) throw std::invalid_argument("chisq_sf: x must be >= 0");
    if (x == 0.0) return 1.0;
    const double a = 0.5 * df, xs = 0.5 * x;
    if (xs < a + 1.0) return 1.0 - gamma_p_series(a, xs);
    return gamma_q_cf(a, xs);
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts) {
    const int n = static_cast<int>(x0.size());
    if (n < 1) throw std::invalid_argument("nelder_mead: empty start point");
    const int max_iter = opts.max_iter_per_dim * n;

    std::vector<std::vector<double>> x(n + 1, x0);
    for (int i = 0; i < n; ++i)
        x[i + 1][i] = (x0[i] != 0.0) ? 1.05 * x0[i] : 0.00025;
    std::vector<double> fx(n + 1);
    int evals = 0;
    for (int i = 0; i <= n; ++i) {
        fx[i] = f(x[i]);
        ++evals;
    }

    NelderMeadResult res;
    std::vector<int> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        const int best = order[0], worst = order[n], second = order[n - 1];

        double fspread = 0.0, xspread = 0.0;
        for (int i = 0; i <= n; ++i) {
            fspread = std::max(fspread, std::abs(fx[i] - fx[best]));
            for (int j = 0; j < n; ++j)
                xspread = std::max(xspread, std::abs(x[i][j] - x[best][j]));
        }
        res.final_f_spread = fspread;
        res.final_x_spread = xspread;
        if (fspread < opts.tol_f && xspread < opts.tol_x) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (int i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (int j = 0; j < n; ++j) centroid[j] += x[i][j];
        }
        for (int j = 0; j < n; ++j) centroid[j] /= n;

        for (int j = 0; j < n; ++j)
            xr[j] = centroid[j] + opts.reflection * (centroid[j] - x[worst][j]);
        const double fr = f(xr);
        ++evals;

        if (fr < fx[best]) {
            for (int j = 0; j < n; ++j)
                xe[j] = centroid[j] + opts.expansion * (xr[j] - centroid[j]);
            const double fe = f(xe);
            ++evals;
            if (fe < fr) {
                x[worst] = xe;
                fx[worst] = fe;
            } else {
                x[worst] = xr;
                fx[worst] = fr;
            }
        } else if (fr < fx[second]) {
            x[worst] = xr;
            fx[worst] = fr;
        } else {
            const bool outside = fr < fx[worst];
            if (outside) {
                for (int j = 0; j < n; ++j)
                    xc[j] = centroid[j] + opts.contraction * (xr[j] - centroid[j]);
            } else {
                for (int j = 0; j < n; ++j)
                    xc[j] = centroid[j] - opts.contraction * (centroid[j] - x[worst][j]);
            }
            const double fc = f(xc);
            ++evals;
            if (fc < (outside ? fr : fx[worst])) {
                x[worst] = xc;
                fx[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (int j = 0; j < n; ++j)
                        x[i][j] = x[best][j] + opts.shrink * (x[i][j] - x[best][j]);
                    fx[i] = f(x[i]);
                    ++evals;
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fx[i] < fx[best]) best = i;
    res.x = x[best];
    res.fmin = fx[best];
    res.iterations = iter;
    res.evaluations = evals;
    return res;
}

ShapeSample ShapeSample::make(std::string group,
                              std::vector<ConfigurationCoordinates> specimens,
                              algebra::AlgebraTag algebra, int N, int K) {
    if (K < 1 || N < K + 2) throw std::invalid_argument("ShapeSample: need q = N-K-1 >= 1");
    for (const auto& s : specimens)
        if (s.K() != K || s.q() != N - K - 1 || !(s.v.algebra() == algebra))
            throw std::invalid_argument("ShapeSample: specimen dimensions inconsistent");
    ShapeSample out;
    out.group = std::move(group);
    out.specimens = std::move(specimens);
    out.algebra = algebra;
    out.N = N;
    out.K = K;
    return out;
}

double loglik(const MatrixF& mu, double sigma2, const ShapeSample& sample) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("loglik: sigma^2 must be positive");
    double total = 0.0;
    for (size_t i = 0; i < sample.specimens.size(); ++i) {
        double ln;
        try {
            ln = shape::density_gaussian_isotropic_ln(sample.specimens[i], mu, sigma2);
        } catch (const std::exception& e) {
            throw NumericalError("loglik: specimen " + std::to_string(i) +
                                 " failed: " + e.what());
        }
        if (!std::isfinite(ln))
            throw NumericalError("loglik: specimen " + std::to_string(i) +
                                 " produced a non-finite log density");
        total += ln;
    }
    return total;
}

namespace {

// real parametrization: beta K (N-1) components of mu followed by ln sigma^2
std::vector<double> pack(const MatrixF& mu, double sigma2, int beta) {
    std::vector<double> x;
    x.reserve(static_cast<size_t>(beta) * mu.rows() * mu.cols() + 1);
    for (int i = 0; i < mu.rows(); ++i)
        for (int j = 0; j < mu.cols(); ++j)
            for (int c = 0; c < beta; ++c) x.push_back(mu.at(i, j).c[c]);
    x.push_back(std::log(sigma2));
    return x;
}

MatrixF unpack_mu(const std::vector<double>& x, int rows, int cols, algebra::AlgebraTag tag) {
    MatrixF mu(rows, cols, tag);
    size_t k = 0;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            Scalar s;
            for (int c = 0; c < tag.beta; ++c) s.c[c] = x[k++];
            mu.at(i, j) = s;
        }
    return mu;
}

// mean of the U-representatives: identity block over mean(V)
MatrixF initial_mu(const ShapeSample& sample) {
    const int rows = sample.N - 1, K = sample.K;
    MatrixF mu = MatrixF::zero(rows, K, sample.algebra);
    for (int j = 0; j < K; ++j) mu.at(j, j) = Scalar(1.0);
    const double inv_n = 1.0 / static_cast<double>(sample.specimens.size());
    for (const auto& s : sample.specimens)
        for (int i = 0; i < s.q(); ++i)
            for (int j = 0; j < K; ++j) mu.at(K + i, j) += inv_n * s.v.at(i, j);
    return mu;
}

// median of the per-real-coordinate sample variances of V
double initial_sigma2(const ShapeSample& sample) {
    const int beta = sample.algebra.beta;
    const int q = sample.N - 1 - sample.K, K = sample.K;
    const size_t n = sample.specimens.size();
    std::vector<double> vars;
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < K; ++j)
            for (int c = 0; c < beta; ++c) {
                double mean = 0.0;
                for (const auto& s : sample.specimens) mean += s.v.at(i, j).c[c];
                mean /= n;
                double ss = 0.0;
                for (const auto& s : sample.specimens) {
                    const double d = s.v.at(i, j).c[c] - mean;
                    ss += d * d;
                }
                vars.push_back(ss / (n > 1 ? n - 1 : 1));
            }
    std::sort(vars.begin(), vars.end());
    const size_t m = vars.size();
    double med = (m % 2 == 1) ? vars[m / 2] : 0.5 * (vars[m / 2 - 1] + vars[m / 2]);
    return std::max(med, 1e-12);
}

struct FitProblem {
    const ShapeSample* sample;
    int rows, cols;
    algebra::AlgebraTag tag;

    double operator()(const std::vector<double>& x) const {
        const MatrixF mu = unpack_mu(x, rows, cols, tag);
        const double sigma2 = std::exp(x.back());
        return -loglik(mu, sigma2, *sample);
    }
};

FitResult run_fit(const ShapeSample& sample, const std::vector<double>& x0,
                  const FitOptions& options) {
    FitProblem problem{&sample, sample.N - 1, sample.K, sample.algebra};
    mc::Rng rng(mc::RngSpec{"mt19937_64", options.seed});

    FitResult best;
    bool have = false;
    for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
        std::vector<double> start = x0;
        if (restart > 0)
            for (double& v : start)
                v += options.jitter * (std::abs(v) + 0.1) * rng.normal();
        const NelderMeadResult nm = nelder_mead(
            [&](const std::vector<double>& x) { return problem(x); }, start, options.nm);
        if (!have || -nm.fmin > best.loglik) {
            have = true;
            best.mu_hat = unpack_mu(nm.x, sample.N - 1, sample.K, sample.algebra);
            best.sigma2_hat = std::exp(nm.x.back());
            best.loglik = -nm.fmin;
            best.iterations = nm.iterations;
            best.evaluations = nm.evaluations;
            best.converged = nm.converged;
            best.best_restart = restart;
            best.final_f_spread = nm.final_f_spread;
        }
    }
    return best;
}

}  // namespace

FitResult fit_mle(const ShapeSample& sample, const FitOptions& options) {
    if (sample.specimens.size() < 2)
        throw std::invalid_argument("fit_mle: need at least 2 specimens");
    const std::vector<double> x0 =
        options.init ? pack(options.init->mu, options.init->sigma2, sample.algebra.beta)
                     : pack(initial_mu(sample), initial_sigma2(sample), sample.algebra.beta);
    return run_fit(sample, x0, options);
}

namespace {

// phase/gauge alignment: the unitary factor u minimizing ||a u - b||
MatrixF aligned_average(const MatrixF& mu_a, const MatrixF& mu_b, double wa) {
    Scalar overlap;
    for (int i = 0; i < mu_a.rows(); ++i)
        for (int j = 0; j < mu_a.cols(); ++j)
            overlap += conj(mu_b.at(i, j)) * mu_a.at(i, j);
    MatrixF avg = mu_a;
    const double n = overlap.norm();
    const Scalar phase = (n > 0) ? overlap * (1.0 / n) : Scalar(1.0);
    for (int i = 0; i < avg.rows(); ++i)
        for (int j = 0; j < avg.cols(); ++j)
            avg.at(i, j) = wa * mu_a.at(i, j) + (1.0 - wa) * (mu_b.at(i, j) * phase);
    return avg;
}

}  // namespace

LRTResult lrt_equal_means(const ShapeSample& a, const ShapeSample& b,
                          const FitOptions& options) {
    if (a.N != b.N || a.K != b.K || !(a.algebra == b.algebra))
        throw std::invalid_argument("lrt_equal_means: samples have incompatible dimensions");
    LRTResult out;
    out.fit_a = fit_mle(a, options);
    out.fit_b = fit_mle(b, options);

    // H0: one mu, separate scales; parameters are mu components plus two
    // log-variances appended at the end
    const int beta = a.algebra.beta;
    const int mu_len = beta * (a.N - 1) * a.K;
    const double wa = static_cast<double>(a.specimens.size()) /
                      (a.specimens.size() + b.specimens.size());

    auto h0_obj = [&](const std::vector<double>& x) {
        std::vector<double> mu_part(x.begin(), x.begin() + mu_len);
        const MatrixF mu = unpack_mu(mu_part, a.N - 1, a.K, a.algebra);
        const double s2a = std::exp(x[mu_len]);
        const double s2b = std::exp(x[mu_len + 1]);
        return -(loglik(mu, s2a, a) + loglik(mu, s2b, b));
    };

    // two start ladders: the data-driven initializer and the phase-aligned
    // average of the H1 fits (mu is a gauge orbit, so naive averaging cancels)
    std::vector<std::vector<double>> starts;
    {
        MatrixF mu0 = aligned_average(initial_mu(a), initial_mu(b), wa);
        std::vector<double> x0 = pack(mu0, initial_sigma2(a), beta);
        x0.push_back(std::log(initial_sigma2(b)));
        starts.push_back(std::move(x0));

        MatrixF mu1 = aligned_average(out.fit_a.mu_hat, out.fit_b.mu_hat, wa);
        std::vector<double> x1 = pack(mu1, out.fit_a.sigma2_hat, beta);
        x1.push_back(std::log(out.fit_b.sigma2_hat));
        starts.push_back(std::move(x1));
    }

    mc::Rng rng(mc::RngSpec{"mt19937_64", options.seed + 1});
    bool have = false;
    NelderMeadResult best_nm;
    for (const auto& x0 : starts)
        for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
            std::vector<double> start = x0;
            if (restart > 0)
                for (double& v : start)
                    v += options.jitter * (std::abs(v) + 0.1) * rng.normal();
            const NelderMeadResult nm = nelder_mead(h0_obj, start, options.nm);
            if (!have || nm.fmin < best_nm.fmin) {
                have = true;
                best_nm = nm;
            }
        }
    out.loglik_h0 = -best_nm.fmin;
    {
        std::vector<double> mu_part(best_nm.x.begin(), best_nm.x.begin() + mu_len);
        out.fit_pooled.mu_hat = unpack_mu(mu_part, a.N - 1, a.K, a.algebra);
        out.fit_pooled.sigma2_hat = std::exp(best_nm.x[mu_len]);
        out.fit_pooled.loglik = out.loglik_h0;
        out.fit_pooled.iterations = best_nm.iterations;
        out.fit_pooled.evaluations = best_nm.evaluations;
        out.fit_pooled.converged = best_nm.converged;
        out.fit_pooled.final_f_spread = best_nm.final_f_spread;
    }

    // H1 contains H0, so each group fit must do at least as well as the
    // pooled solution; rescue stuck fits by warm-starting there
    {
        FitOptions warm = options;
        warm.restarts = 1;
        warm.init = FitInit{out.fit_pooled.mu_hat, out.fit_a.sigma2_hat};
        const FitResult wa_fit = fit_mle(a, warm);
        if (wa_fit.loglik > out.fit_a.loglik) out.fit_a = wa_fit;
        warm.init = FitInit{out.fit_pooled.mu_hat, out.fit_b.sigma2_hat};
        const FitResult wb_fit = fit_mle(b, warm);
        if (wb_fit.loglik > out.fit_b.loglik) out.fit_b = wb_fit;
    }
    out.loglik_h1 = out.fit_a.loglik + out.fit_b.loglik;

    out.statistic = 2.0 * (out.loglik_h1 - out.loglik_h0);
    if (out.statistic < -1e-8)
        throw NumericalError("lrt_equal_means: negative statistic " +
                             std::to_string(out.statistic) + "; H0 fit beat H1");
    out.statistic = std::max(out.statistic, 0.0);
    out.df = beta * a.K * (a.N - 1);
    out.p_value = chisq_sf(out.statistic, out.df);
    return out;
}

}  // namespace ashape::inference
