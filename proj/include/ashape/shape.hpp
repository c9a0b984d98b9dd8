#pragma once

#include <optional>

#include "ashape/algebra.hpp"
#include "ashape/generators.hpp"

namespace ashape::shape {

using algebra::AlgebraTag;
using algebra::HermitianMatrix;
using algebra::MatrixF;

// (N-1) x N Helmert sub-matrix: rows orthonormal and orthogonal to 1_N.
// Row i (1-based) is (1,...,1,-i,0,...,0)/sqrt(i(i+1)) with i leading ones.
MatrixF helmert_submatrix(int N);

// The same rows promoted into another algebra so they can left-multiply
// matrices over it.
MatrixF helmert_submatrix(int N, AlgebraTag algebra);

// Affine shape V of a landmark matrix, q x K with q = N - K - 1, together
// with the augmented representative U = (I_K | V*)*.
struct ConfigurationCoordinates {
    MatrixF v;

    int K() const { return v.cols(); }
    int q() const { return v.rows(); }
    MatrixF u() const;  // (K+q) x K, identity block on top
};

// V = Y2 Y1^{-1} where Y = L X Theta^{-1/2}.  Invariant under X -> X E + 1 e*.
// A singular Y1 (degenerate configuration) throws SingularMatrix.
ConfigurationCoordinates configuration_coords(const MatrixF& x, const HermitianMatrix& theta);
ConfigurationCoordinates configuration_coords(const MatrixF& x);  // Theta = I

// Same extraction when the translation is already removed: r is the reduced
// (N-1) x K matrix L X.
ConfigurationCoordinates configuration_coords_reduced(const MatrixF& r,
                                                      const std::optional<HermitianMatrix>& theta);

// ln of the measure factor 2^{-K} |F|^{beta(q+1)/2 - 1} relating (dY) to
// (dV)(dF)(H* dH).
double jacobian_log_factor(const HermitianMatrix& f, double beta, int K, int q);

struct TruncationPolicy {
    // the t- and r-series are exponential-type: they need roughly
    // beta * (noncentrality scale) / 2 + 30 terms for 1e-10 relative accuracy
    int max_t = 40;
    int max_r = 40;
    int max_shell = 40;   // cap on inner partition weights / polynomial shells
    double tol = 1e-10;
};

// Parameters of the elliptical landmark model after the Helmert reduction:
// mu is (N-1) x K, Sigma (N-1) x (N-1) (or sigma^2 I for isotropy), Theta K x K.
struct EllipticalShapeModel {
    int N = 0;
    int K = 0;
    AlgebraTag algebra{1};
    MatrixF mu;                          // reduced: L mu_X
    std::optional<HermitianMatrix> sigma;
    double sigma2 = 1.0;                 // used when sigma is absent (isotropic)
    std::optional<HermitianMatrix> theta;  // absent means identity
    GeneratorFamily generator;

    int q() const { return N - K - 1; }
    bool isotropic() const { return !sigma.has_value(); }

    static EllipticalShapeModel make(int N, int K, AlgebraTag algebra, MatrixF reduced_mu,
                                     std::optional<HermitianMatrix> sigma, double sigma2,
                                     std::optional<HermitianMatrix> theta,
                                     GeneratorFamily generator);
    // convenience: reduce a full N x K location matrix through the Helmert rows
    static MatrixF reduce_location(const MatrixF& mu_x);
};

// ---- density formulas ----------------------------------------------------
// All four routes share the constant Gamma_K^beta[beta(N-1)/2] /
// (pi^{beta K q / 2} Gamma_K^beta[beta K / 2]) and differ in how the series
// over (t, r, tau) collapses.

// Central (mu = 0) density: generator-free.
double density_central(const ConfigurationCoordinates& v, const HermitianMatrix& sigma,
                       double beta, int N, int K);

// Formula-level central density from precomputed log determinants; this is
// the beta = 8 surface (no matrix arithmetic involved).
double density_central_ln_parts(double beta, int N, int K, double log_det_sigma,
                                double log_det_w);

// Fully general noncentral non-isotropic density: triple series over t, r and
// partitions, with gamma(t, r) from the model generator.
double density_general(const ConfigurationCoordinates& v, const EllipticalShapeModel& model,
                       const TruncationPolicy& trunc = {});

// Isotropic route using |I + V*V| directly (no Sigma inversions); must agree
// with density_general at Sigma = sigma^2 I.
double density_isotropic(const ConfigurationCoordinates& v, const MatrixF& mu,
                         const std::optional<HermitianMatrix>& theta, double sigma2,
                         const GeneratorFamily& generator,
                         const TruncationPolicy& trunc = {});

// Gaussian closed form: etr / terminating-or-truncated 1F1.
double density_gaussian(const ConfigurationCoordinates& v, const MatrixF& mu,
                        const HermitianMatrix& sigma,
                        const std::optional<HermitianMatrix>& theta,
                        const TruncationPolicy& trunc = {});

// Gaussian isotropic (the fitting model), in log space for likelihood work.
double density_gaussian_isotropic_ln(const ConfigurationCoordinates& v, const MatrixF& mu,
                                     double sigma2,
                                     const std::optional<HermitianMatrix>& theta = std::nullopt,
                                     const TruncationPolicy& trunc = {});
double density_gaussian_isotropic(const ConfigurationCoordinates& v, const MatrixF& mu,
                                  double sigma2,
                                  const std::optional<HermitianMatrix>& theta = std::nullopt,
                                  const TruncationPolicy& trunc = {});

}  // namespace ashape::shape
