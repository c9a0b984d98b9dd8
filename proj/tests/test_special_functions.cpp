#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "ashape/quadrature.hpp"
#include "ashape/rng.hpp"
#include "ashape/special_functions.hpp"

using namespace ashape::sf;
using ashape::mc::Rng;
using ashape::mc::RngSpec;

namespace {

// independent partition counter (no shared code with partitions_of)
int count_partitions(int n, int max_part, int slots) {
    if (n == 0) return 1;
    if (slots == 0) return 0;
    int total = 0;
    for (int p = std::min(n, max_part); p >= 1; --p) total += count_partitions(n - p, p, slots - 1);
    return total;
}

// number of standard Young tableaux by the hook length formula
double hook_f(const Partition& p) {
    double denom = 1.0;
    for (int i = 1; i <= p.length(); ++i)
        for (int j = 1; j <= p.part(i); ++j) {
            const int arm = p.part(i) - j;
            int leg = 0;
            for (int r = i + 1; r <= p.length(); ++r)
                if (p.part(r) >= j) ++leg;
            denom *= (arm + leg + 1);
        }
    return std::tgamma(p.weight() + 1.0) / denom;
}

// brute-force semistandard tableau enumeration: fills the shape cell by cell
// with entries 1..n, rows weakly and columns strictly increasing; evaluates
// the Schur polynomial directly
void ssyt_fill(const Partition& shape, std::vector<std::vector<int>>& t, int row, int col,
               int nvars, const std::vector<double>& x, double& acc) {
    if (row == shape.length()) {
        double prod = 1.0;
        for (const auto& r : t)
            for (int e : r) prod *= x[e - 1];
        acc += prod;
        return;
    }
    const int next_row = (col + 1 == shape.part(row + 1)) ? row + 1 : row;
    const int next_col = (col + 1 == shape.part(row + 1)) ? 0 : col + 1;
    const int left = (col > 0) ? t[row][col - 1] : 1;
    const int above = (row > 0 && col < shape.part(row)) ? t[row - 1][col] + 1 : 1;
    for (int v = std::max(left, above); v <= nvars; ++v) {
        t[row][col] = v;
        ssyt_fill(shape, t, next_row, next_col, nvars, x, acc);
    }
}

double schur_bruteforce(const Partition& shape, const std::vector<double>& x) {
    if (shape.weight() == 0) return 1.0;
    if (shape.length() > static_cast<int>(x.size())) return 0.0;
    std::vector<std::vector<int>> t;
    for (int i = 1; i <= shape.length(); ++i) t.emplace_back(shape.part(i), 0);
    double acc = 0.0;
    ssyt_fill(shape, t, 0, 0, static_cast<int>(x.size()), x, acc);
    return acc;
}

// J_lambda(1^m) = prod over boxes of (m + alpha(j-1) - (i-1)), and
// C = alpha^k k! / (c c') J
double jack_ones_closed(double beta, const Partition& p, int m) {
    const double alpha = 2.0 / beta;
    double prod = 1.0, c = 1.0, cp = 1.0;
    for (int i = 1; i <= p.length(); ++i)
        for (int j = 1; j <= p.part(i); ++j) {
            prod *= m + alpha * (j - 1) - (i - 1);
            const int arm = p.part(i) - j;
            int leg = 0;
            for (int r = i + 1; r <= p.length(); ++r)
                if (p.part(r) >= j) ++leg;
            c *= alpha * arm + leg + 1;
            cp *= alpha * (arm + 1) + leg;
        }
    return std::pow(alpha, p.weight()) * std::tgamma(p.weight() + 1.0) / (c * cp) * prod;
}

}  // namespace

TEST_CASE("partitions_of ordering and counts") {
    CHECK(partitions_of(0, 3).size() == 1);
    CHECK(partitions_of(0, 3)[0].weight() == 0);

    const auto p42 = partitions_of(4, 2);
    REQUIRE(p42.size() == 3);
    CHECK(p42[0].to_string() == "4");
    CHECK(p42[1].to_string() == "3,1");
    CHECK(p42[2].to_string() == "2,2");

    CHECK(partitions_of(10, 10).size() == 42);  // p(10)
    for (int k = 1; k <= 9; ++k)
        for (int m = 1; m <= k; ++m)
            CHECK(static_cast<int>(partitions_of(k, m).size()) == count_partitions(k, k, m));

    // reverse-lexicographic: each partition strictly precedes the next
    const auto p63 = partitions_of(6, 3);
    for (size_t i = 1; i < p63.size(); ++i) {
        const auto &a = p63[i - 1], &b = p63[i];
        bool greater = false;
        for (int r = 1; r <= std::max(a.length(), b.length()); ++r) {
            if (a.part(r) != b.part(r)) {
                greater = a.part(r) > b.part(r);
                break;
            }
        }
        CHECK(greater);
    }
}

TEST_CASE("dominance order") {
    CHECK(dominated_by(Partition::parse("2,2"), Partition::parse("4")));
    CHECK(dominated_by(Partition::parse("2,1,1"), Partition::parse("3,1")));
    CHECK_FALSE(dominated_by(Partition::parse("3,1"), Partition::parse("2,2")));
    const bool both = dominated_by(Partition::parse("2,2"), Partition::parse("3,1")) &&
                      dominated_by(Partition::parse("3,1"), Partition::parse("2,2"));
    CHECK_FALSE(both);
}

TEST_CASE("multivariate gamma") {
    CHECK(mv_gamma_ln(1, 1, 2.5) == doctest::Approx(std::lgamma(2.5)).epsilon(1e-14));
    CHECK(mv_gamma_ln(4, 1, 1.25) == doctest::Approx(std::lgamma(1.25)).epsilon(1e-14));
    CHECK(mv_gamma_ln(1, 2, 1.5) == doctest::Approx(std::log(M_PI / 2)).epsilon(1e-13));
    CHECK(mv_gamma_ln(2, 2, 2.0) == doctest::Approx(std::log(M_PI)).epsilon(1e-13));
    CHECK_THROWS_AS(mv_gamma_ln(2, 3, 1.0), std::invalid_argument);  // a <= (m-1)beta/2
}

TEST_CASE("generalized Pochhammer") {
    // single row is the plain rising factorial
    CHECK(gen_pochhammer(2, 1.7, Partition::parse("3")) ==
          doctest::Approx(1.7 * 2.7 * 3.7).epsilon(1e-14));
    CHECK(gen_pochhammer(1, 1.0, Partition::parse("1,1")) == doctest::Approx(0.5));
    // [a]_kappa = 0 exactly when a factor vanishes: a = -q, k1 = q+1
    for (int q : {1, 2, 5}) {
        std::vector<int> parts{q + 1};
        CHECK(gen_pochhammer(2, -q, Partition(parts)) == 0.0);
    }
    CHECK(gen_pochhammer(2, 0.0, Partition{}) == 1.0);
}

TEST_CASE("Pochhammer recursion over addable cells") {
    Rng rng(RngSpec{"mt19937_64", 5});
    for (int rep = 0; rep < 50; ++rep) {
        const double beta = std::vector<double>{1, 2, 4, 8}[rep % 4];
        const double a = 3.0 * rng.normal();
        std::vector<int> parts{4, 2, 2};
        const Partition kappa(parts);
        for (int i = 1; i <= 3; ++i) {
            if (i > 1 && kappa.part(i) == kappa.part(i - 1)) continue;  // not addable
            std::vector<int> grown = parts;
            grown[i - 1] += 1;
            const double lhs = gen_pochhammer(beta, a, Partition(grown));
            const double rhs = gen_pochhammer(beta, a, kappa) *
                               (a - 0.5 * (i - 1) * beta + kappa.part(i));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("Stiefel volumes") {
    CHECK(stiefel_volume_ln(1, 1, 2) == doctest::Approx(std::log(2 * M_PI)).epsilon(1e-13));
    CHECK(stiefel_volume_ln(2, 1, 1) == doctest::Approx(std::log(2 * M_PI)).epsilon(1e-13));
    CHECK(stiefel_volume_ln(1, 1, 3) == doctest::Approx(std::log(4 * M_PI)).epsilon(1e-13));
    CHECK_THROWS_AS(stiefel_volume_ln(1, 3, 2), std::invalid_argument);
}

TEST_CASE("Jack polynomials: weight one and two closed forms") {
    Rng rng(RngSpec{"mt19937_64", 9});
    for (double beta : {1.0, 2.0, 4.0, 8.0}) {
        const std::vector<double> x{0.7, 1.3, 0.4};
        const double tr = x[0] + x[1] + x[2];
        CHECK(jack_c(beta, Partition::parse("1"), x) == doctest::Approx(tr).epsilon(1e-12));
    }
    // beta = 1 zonal polynomials of weight 2
    const std::vector<double> x{0.9, 0.35};
    const double tr = x[0] + x[1], tr2 = x[0] * x[0] + x[1] * x[1];
    CHECK(jack_c(1, Partition::parse("2"), x) ==
          doctest::Approx((tr * tr + 2 * tr2) / 3.0).epsilon(1e-12));
    CHECK(jack_c(1, Partition::parse("1,1"), x) ==
          doctest::Approx(2.0 * (tr * tr - tr2) / 3.0).epsilon(1e-12));
    // more parts than variables
    CHECK(jack_c(1, Partition::parse("1,1"), std::vector<double>{0.5}) == 0.0);
}

TEST_CASE("Jack sum identity across algebras") {
    Rng rng(RngSpec{"mt19937_64", 13});
    for (double beta : {1.0, 2.0, 4.0, 8.0}) {
        auto table = jack_table(beta, 8, 4);
        for (int nvars = 1; nvars <= 4; ++nvars) {
            std::vector<double> x(nvars);
            for (double& v : x) v = 0.1 + rng.uniform();
            double tr = 0.0;
            for (double v : x) tr += v;
            for (int k = 0; k <= 8; ++k) {
                const auto vals = table->evaluate_weight(k, x);
                double sum = 0.0;
                for (double v : vals) sum += v;
                CHECK(sum == doctest::Approx(std::pow(tr, k)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("Jack values at the identity match the box-product closed form") {
    for (double beta : {1.0, 2.0, 4.0, 8.0}) {
        auto table = jack_table(beta, 6, 3);
        for (int m = 1; m <= 3; ++m) {
            const std::vector<double> ones(m, 1.0);
            for (int k = 0; k <= 6; ++k) {
                const auto& plist = table->partitions(k);
                const auto vals = table->evaluate_weight(k, ones);
                for (size_t i = 0; i < plist.size(); ++i) {
                    if (plist[i].length() > m) {
                        CHECK(vals[i] == 0.0);
                        continue;
                    }
                    CHECK(vals[i] ==
                          doctest::Approx(jack_ones_closed(beta, plist[i], m)).epsilon(1e-10));
                }
            }
        }
    }
}

TEST_CASE("beta = 2 Jack equals f^kappa times the Schur polynomial") {
    Rng rng(RngSpec{"mt19937_64", 17});
    auto table = jack_table(2, 5, 3);
    for (int nvars = 1; nvars <= 3; ++nvars) {
        std::vector<double> x(nvars);
        for (double& v : x) v = 0.2 + rng.uniform();
        for (int k = 1; k <= 5; ++k) {
            const auto& plist = table->partitions(k);
            const auto vals = table->evaluate_weight(k, x);
            for (size_t i = 0; i < plist.size(); ++i) {
                const double oracle = hook_f(plist[i]) * schur_bruteforce(plist[i], x);
                CHECK(vals[i] == doctest::Approx(oracle).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("JackTable JSON cache round trip") {
    const JackTable t(2, 4, 2);
    const std::string path = "jack_cache_test.json";
    t.save_json(path);
    const JackTable loaded = JackTable::load_json(path);
    CHECK(loaded.beta() == 2.0);
    CHECK(loaded.max_weight() == 4);
    CHECK(loaded.max_parts() == 2);
    const std::vector<double> x{0.8, 0.3};
    for (int k = 0; k <= 4; ++k) {
        const auto a = t.evaluate_weight(k, x);
        const auto b = loaded.evaluate_weight(k, x);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]));
    }
    std::remove(path.c_str());
}

TEST_CASE("0F0 equals the exponential of the trace") {
    HypergeometricSpec spec;
    spec.beta = 1;
    spec.max_weight = 30;
    const std::vector<double> x{0.1, 0.2};
    const auto res = hypergeometric_matrix(spec, x);
    CHECK(res.value == doctest::Approx(std::exp(0.3)).epsilon(1e-10));
    for (double beta : {2.0, 4.0}) {
        spec.beta = beta;
        CHECK(hypergeometric_value(spec, x) == doctest::Approx(std::exp(0.3)).epsilon(1e-10));
    }
}

TEST_CASE("1F0 equals the determinant identity") {
    for (double beta : {1.0, 2.0, 4.0}) {
        HypergeometricSpec spec;
        spec.beta = beta;
        spec.upper = {1.5};
        spec.max_weight = 40;
        const std::vector<double> x{0.2, 0.3};
        CHECK(hypergeometric_value(spec, x) ==
              doctest::Approx(std::pow(0.8 * 0.7, -1.5)).epsilon(1e-8));
    }
}

TEST_CASE("terminating 1F1 is summed exactly") {
    HypergeometricSpec spec;
    spec.beta = 2;
    spec.upper = {-2.0};
    spec.lower = {1.0};
    const double x = 0.37;
    const auto res = hypergeometric_matrix(spec, std::vector<double>{x});
    CHECK(res.terminated);
    CHECK(res.last_shell_abs == 0.0);
    // brute force to weight 2: 1 - 2x + x^2/2
    CHECK(res.value == doctest::Approx(1.0 - 2.0 * x + 0.5 * x * x).epsilon(1e-14));
}

TEST_CASE("hypergeometric shells are prefix-stable under larger truncation") {
    HypergeometricSpec small, large;
    small.beta = large.beta = 2;
    small.max_weight = 8;
    large.max_weight = 16;
    small.tol = large.tol = 1e-6;
    const std::vector<double> x{0.3, 0.15};
    const auto a = hypergeometric_matrix(small, x);
    const auto b = hypergeometric_matrix(large, x);
    for (size_t k = 0; k < std::min(a.shell_sums.size(), b.shell_sums.size()); ++k)
        CHECK(a.shell_sums[k] == b.shell_sums[k]);
}

TEST_CASE("lower-parameter pole raises") {
    HypergeometricSpec spec;
    spec.beta = 2;
    spec.upper = {1.0};
    spec.lower = {-1.0};
    CHECK_THROWS_AS(hypergeometric_matrix(spec, std::vector<double>{0.3}),
                    ashape::PoleError);
}

TEST_CASE("non-converged truncation raises") {
    HypergeometricSpec spec;
    spec.beta = 1;
    spec.upper = {3.0};  // 1F0 near the boundary of the convergence region
    spec.max_weight = 6;
    CHECK_THROWS_AS(hypergeometric_matrix(spec, std::vector<double>{0.9}),
                    ashape::ConvergenceError);
}

TEST_CASE("semi-infinite quadrature against gamma integrals") {
    for (double a : {0.5, 1.0, 2.5, 7.0}) {
        const auto res = integrate_semi_infinite(
            [a](double z) { return std::exp(-z + (a - 1.0) * std::log(z)); });
        CHECK(res.value == doctest::Approx(std::tgamma(a)).epsilon(1e-11));
    }
    // scaled exponent: int e^{-3z} z^2 dz = 2/27
    const auto res = integrate_semi_infinite(
        [](double z) { return std::exp(-3.0 * z + 2.0 * std::log(z)); });
    CHECK(res.value == doctest::Approx(2.0 / 27.0).epsilon(1e-11));
    CHECK_THROWS_AS(integrate_semi_infinite([](double z) { return 1.0 / (1.0 + z); }),
                    ashape::ConvergenceError);
}
