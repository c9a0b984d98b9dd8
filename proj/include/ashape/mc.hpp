#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ashape/partitions.hpp"
#include "ashape/rng.hpp"
#include "ashape/shape.hpp"

namespace ashape::mc {

using algebra::AlgebraTag;
using algebra::HermitianMatrix;
using algebra::MatrixF;

struct McReport {
    std::string check;
    std::string params;
    double estimate = 0.0;
    double std_error = 0.0;
    double target = 0.0;
    double z_score = 0.0;
    long n = 0;
    std::uint64_t seed = 0;
};

// batch-means accumulator: valid iid standard errors, order-independent merge
class BatchMeans {
  public:
    explicit BatchMeans(long n_total, int n_batches = 100);
    void add(double x);
    double mean() const;
    double std_error() const;
    long count() const { return count_; }

  private:
    long batch_size_;
    long count_ = 0;
    double current_sum_ = 0.0;
    long current_n_ = 0;
    std::vector<double> batch_means_;
};

// Haar-uniform n x m Stiefel frame (H1* H1 = I_m) by Gram-Schmidt of a
// standard Gaussian matrix over F, positive real R diagonal; two projection
// passes keep the residual under 1e-12.
MatrixF sample_stiefel(AlgebraTag tag, int m, int n, Rng& rng);

// Radial scale mixture describing how an elliptical draw is generated.
struct EllipticalSampler {
    std::string name = "gaussian";
    std::function<double(Rng&)> scale;  // nullptr means the Gaussian case (s = 1)

    static EllipticalSampler gaussian() { return {}; }
    // s = sqrt(df / chi2_df): multivariate-t style mixing, heavier tails
    static EllipticalSampler t_mixture(int df);
};

// X = mu + s Sigma^{1/2} G Theta^{1/2}, G with iid standard components over F.
MatrixF sample_matrix_elliptical(const MatrixF& mu, const HermitianMatrix& sigma,
                                 const HermitianMatrix& theta,
                                 const EllipticalSampler& sampler, Rng& rng);

// F = G* G for an n x K standard Gaussian G; the density of F with respect
// to the cone measure (dF) is
//   2^{-beta n K/2} |F|^{beta(n-K+1)/2 - 1} etr(-F/2) / Gamma_K^beta[beta n/2].
HermitianMatrix sample_wishart(AlgebraTag tag, int k_dim, int n_df, Rng& rng);
double wishart_log_density(const HermitianMatrix& f, int n_df);

// ---- checks ---------------------------------------------------------------

// Monte Carlo check of the Stiefel moment identity:
// E[(re tr(X H1))^{2k}] over normalized Haar vs
// sum_kappa (1/2)_k / [beta n/2]_kappa  C_kappa(X X*).
// The negative control evaluates the right side with n+1 columns.
McReport check_stiefel_moment(const MatrixF& x, int k, long n_mc, RngSpec rng,
                              bool negative_control = false);

// Quadrature check of the Laplace-type cone integral (m = dim of Z <= 2):
// int_{X > 0} h(tr XZ) |X|^{a - (m-1)beta/2 - 1} C_kappa(XU) (dX)
//   = [a]_kappa Gamma_m[a] / Gamma[am + k] |Z|^{-a} C_kappa(U Z^{-1}) gamma.
// The negative control shifts the gamma exponent by one.
McReport check_cone_integral(double a, const sf::Partition& kappa, const HermitianMatrix& z,
                             const HermitianMatrix& u,
                             const std::function<double(double)>& h, long budget,
                             bool negative_control = false);

// Importance-sampled check that the configuration-coordinate change of
// measure carries a standard Gaussian bump to total mass one; offset != 0
// perturbs the Jacobian exponent (negative control).
McReport check_jacobian(AlgebraTag tag, int K, int q, long n_mc, RngSpec rng,
                        double exponent_offset = 0.0);

// Importance-sampled normalization of a shape density over V-space.
// scale_error multiplies the integrand (1.0 = honest check).
McReport check_density_normalization(
    const std::function<double(const shape::ConfigurationCoordinates&)>& density,
    AlgebraTag tag, int K, int q, const MatrixF& proposal_center, double proposal_scale,
    long n_mc, RngSpec rng, double scale_error = 1.0);

struct InvarianceReport {
    bool pass = false;
    double threshold = 0.0;              // KS two-sample bound at the 1% level
    std::vector<double> statistics;      // norm first, then each real coordinate
    long discarded_a = 0, discarded_b = 0;
    long n_per_group = 0;
    std::uint64_t seed = 0;
};

// Two-sample comparison of V drawn through two elliptical generators with
// the same (Sigma, Theta); mu_b shifts group B (the noncentral negative
// control).  Degenerate configurations are discarded and must stay under
// 0.1% of the budget.
InvarianceReport check_central_invariance(const EllipticalSampler& gen_a,
                                          const EllipticalSampler& gen_b, AlgebraTag tag,
                                          int N, int K, const HermitianMatrix& sigma,
                                          const HermitianMatrix& theta, long n_per_group,
                                          RngSpec rng,
                                          const std::optional<MatrixF>& mu_b = std::nullopt);

// sup |F1 - F2| over the pooled sample
double ks_two_sample(std::vector<double> a, std::vector<double> b);
// asymptotic two-sample KS acceptance bound at significance alpha
double ks_threshold(long n_a, long n_b, double alpha);

}  // namespace ashape::mc
