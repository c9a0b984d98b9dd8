#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ashape/shape.hpp"

namespace ashape::inference {

using shape::ConfigurationCoordinates;

// Upper tail P(chi^2_df >= x) through the regularized incomplete gamma
// (series branch for x < df + 1, continued fraction otherwise).
double chisq_sf(double x, int df);

// ---- derivative-free optimizer --------------------------------------------

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double tol_f = 1e-9;   // simplex function spread
    double tol_x = 1e-8;   // simplex parameter spread
    int max_iter_per_dim = 200;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fmin = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    double final_f_spread = 0.0;
    double final_x_spread = 0.0;
};

// Minimizes f starting from the fminsearch-style simplex around x0
// (5% bumps per coordinate, 0.00025 for zero coordinates).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts = {});

// ---- shape likelihood ------------------------------------------------------

struct ShapeSample {
    std::string group;
    std::vector<ConfigurationCoordinates> specimens;
    algebra::AlgebraTag algebra{1};
    int N = 0;
    int K = 0;

    static ShapeSample make(std::string group, std::vector<ConfigurationCoordinates> specimens,
                            algebra::AlgebraTag algebra, int N, int K);
};

struct FitInit {
    algebra::MatrixF mu;
    double sigma2 = 1.0;
};

struct FitOptions {
    int restarts = 5;          // jittered restarts; best log-likelihood wins
    double jitter = 0.05;      // relative size of the restart perturbations
    std::uint64_t seed = 1;
    NelderMeadOptions nm{};
    std::optional<FitInit> init;  // overrides the data-driven initializer
};

struct FitResult {
    algebra::MatrixF mu_hat;   // (N-1) x K
    double sigma2_hat = 0.0;
    double loglik = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    int best_restart = 0;
    double final_f_spread = 0.0;
};

struct LRTResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 0.0;
    double loglik_h1 = 0.0;
    double loglik_h0 = 0.0;
    FitResult fit_a, fit_b, fit_pooled;
};

// Sum over specimens of the isotropic Gaussian log shape density.
double loglik(const algebra::MatrixF& mu, double sigma2, const ShapeSample& sample);

// Maximum likelihood over (mu, ln sigma^2) by Nelder-Mead, initialized from
// the mean of the U-representatives and the median per-coordinate variance.
FitResult fit_mle(const ShapeSample& sample, const FitOptions& options = {});

// Two-group test of equal mean shape: H1 fits each group separately, H0 a
// common mu with separate scales; df = beta K (N-1) constrained real means.
LRTResult lrt_equal_means(const ShapeSample& a, const ShapeSample& b,
                          const FitOptions& options = {});

}  // namespace ashape::inference
