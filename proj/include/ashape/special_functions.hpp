#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ashape/errors.hpp"
#include "ashape/partitions.hpp"

namespace ashape::sf {

// log Gamma_m^beta[a] = (m(m-1)beta/4) ln pi + sum_i lnGamma(a - (i-1)beta/2),
// defined for a > (m-1)beta/2.  beta enters as a plain real parameter, so
// beta = 8 works here.
double mv_gamma_ln(double beta, int m, double a);

// Generalized Pochhammer [a]_kappa^beta = prod_i (a - (i-1)beta/2)_{k_i}.
// Exact zero when any rising-factorial factor hits zero.
double gen_pochhammer(double beta, double a, const Partition& kappa);

// ln Vol(V^beta_{m,n}) = ln[ 2^m pi^{mn beta/2} / Gamma_m^beta[n beta/2] ], m <= n.
double stiefel_volume_ln(double beta, int m, int n);

// Jack polynomials C_kappa^beta in the C normalization
// (sum over kappa |- k of C_kappa^beta(X) equals (tr X)^k), evaluated through
// a precomputed expansion in monomial symmetric functions.  A table is built
// once per (beta, max_weight, max_parts) and is immutable afterwards.
//
// The expansion coefficients come from the Laplace-Beltrami recursion on the
// monic polynomials P_kappa (alpha = 2/beta):
//   c_{kappa,mu} = (2/alpha) / (rho_kappa - rho_mu) *
//                  sum_{i<j, t>=1} ((mu_i+t) - (mu_j-t)) c_{kappa,nu}
// with nu = sort(mu + t e_i - t e_j) <= kappa in dominance and
// rho_lambda = sum_i lambda_i (lambda_i - 1 - (2/alpha)(i-1)); the C row is
// the P row scaled by alpha^k k! / prod_{s}(alpha(arm(s)+1) + leg(s)).
class JackTable {
  public:
    JackTable(double beta, int max_weight, int max_parts);

    double beta() const { return beta_; }
    int max_weight() const { return max_weight_; }
    int max_parts() const { return max_parts_; }

    // Value of C_kappa^beta at the given eigenvalues.  Zero when kappa has
    // more parts than there are eigenvalues.
    double evaluate(const Partition& kappa, std::span<const double> eigenvalues) const;

    // All C_kappa^beta for kappa |- k in the same order as partitions(k);
    // shares the monomial evaluations across partitions.
    std::vector<double> evaluate_weight(int k, std::span<const double> eigenvalues) const;

    const std::vector<Partition>& partitions(int k) const;

    // On-disk cache: {"beta": .., "max_weight": .., "tables": {partition: {monomial: coeff}}}
    void save_json(const std::string& path) const;
    static JackTable load_json(const std::string& path);

  private:
    JackTable() = default;
    void build();
    std::vector<double> monomial_values(int k, std::span<const double> eigenvalues) const;

    double beta_ = 1.0;
    int max_weight_ = 0;
    int max_parts_ = 1;
    // per weight k: the partition list and, per partition, sparse
    // (monomial index, coefficient) pairs in the C normalization
    std::vector<std::vector<Partition>> parts_by_weight_;
    std::vector<std::vector<std::vector<std::pair<int, double>>>> rows_;
};

// Process-wide memoized tables, keyed by (beta, max_parts); grown on demand.
std::shared_ptr<const JackTable> jack_table(double beta, int max_weight, int max_parts);

// Convenience evaluation through the shared cache.
double jack_c(double beta, const Partition& kappa, std::span<const double> eigenvalues);

struct HypergeometricSpec {
    std::vector<double> upper;  // a_1..a_p
    std::vector<double> lower;  // b_1..b_q
    double beta = 1.0;
    int max_weight = 40;        // truncation M (shells by partition weight)
    double tol = 1e-10;         // relative tolerance demanded of the last shell
};

struct HypergeometricResult {
    double value = 0.0;
    double last_shell_abs = 0.0;  // truncation error estimate (0 if terminated)
    bool terminated = false;      // an upper parameter cut the series exactly
    int shells_used = 0;
    std::vector<double> shell_sums;  // per-weight contributions, fixed order
};

// pFq^beta of one Hermitian matrix argument given its eigenvalues:
//   sum_k sum_{kappa |- k} (prod [a]_kappa^beta / prod [b]_kappa^beta)
//   C_kappa^beta(X) / k!
// Termination: an upper parameter equal to a nonpositive integer -n makes
// every term with k_1 > n vanish, so the sum over k_1 <= n is exact.
// Otherwise the series is truncated at max_weight and the last shell
// magnitude is reported; failing the relative tolerance throws
// ConvergenceError, and a vanishing lower-parameter factor against a
// nonvanishing numerator throws PoleError.
HypergeometricResult hypergeometric_matrix(const HypergeometricSpec& spec,
                                           std::span<const double> eigenvalues);

// Value-only convenience wrapper.
double hypergeometric_value(const HypergeometricSpec& spec,
                            std::span<const double> eigenvalues);

}  // namespace ashape::sf
