#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ashape/algebra.hpp"
#include "test_helpers.hpp"

using namespace ashape::algebra;
using ashape::mc::Rng;
using ashape::mc::RngSpec;
using testutil::matrix_diff;
using testutil::random_hermitian;
using testutil::random_matrix;
using testutil::random_posdef;

namespace {

// library-free cofactor determinant of a complex matrix, used as the oracle
// for the eigenvalue-product route (2x2 and 3x3 only)
Scalar cofactor_det(const MatrixF& m) {
    if (m.rows() == 1) return m.at(0, 0);
    if (m.rows() == 2)
        return m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    Scalar d;
    d += m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1));
    d -= m.at(0, 1) * (m.at(1, 0) * m.at(2, 2) - m.at(1, 2) * m.at(2, 0));
    d += m.at(0, 2) * (m.at(1, 0) * m.at(2, 1) - m.at(1, 1) * m.at(2, 0));
    return d;
}

}  // namespace

TEST_CASE("algebra tags") {
    CHECK(AlgebraTag::of(1).full_numeric());
    CHECK(AlgebraTag::of(4).full_numeric());
    CHECK_FALSE(AlgebraTag::of(8).full_numeric());
    CHECK_THROWS_AS(AlgebraTag::of(3), std::invalid_argument);
}

TEST_CASE("scalar multiplication satisfies the Hamilton relations") {
    const Scalar i(0, 1, 0, 0), j(0, 0, 1, 0), k(0, 0, 0, 1);
    CHECK((i * j - k).norm() == doctest::Approx(0.0));
    CHECK((j * i + k).norm() == doctest::Approx(0.0));
    CHECK((j * k - i).norm() == doctest::Approx(0.0));
    CHECK((i * i + Scalar(1.0)).norm() == doctest::Approx(0.0));
}

TEST_CASE("norm multiplicativity over R, C, H") {
    Rng rng(RngSpec{"mt19937_64", 42});
    for (int beta : {1, 2, 4}) {
        const AlgebraTag tag = AlgebraTag::of(beta);
        for (int rep = 0; rep < 200; ++rep) {
            const Scalar a = rng.gaussian_scalar(tag), b = rng.gaussian_scalar(tag);
            CHECK((a * b).norm() ==
                  doctest::Approx(a.norm() * b.norm()).epsilon(1e-12));
        }
    }
}

TEST_CASE("mat_mul identity and conjugate-transpose reversal") {
    Rng rng(RngSpec{"mt19937_64", 7});
    const MatrixF a = random_matrix(rng, 3, 3, AlgebraTag::complex());
    CHECK(matrix_diff(a * MatrixF::identity(3, AlgebraTag::complex()), a) < 1e-14);

    const MatrixF qa = random_matrix(rng, 2, 2, AlgebraTag::quaternion());
    const MatrixF qb = random_matrix(rng, 2, 2, AlgebraTag::quaternion());
    CHECK(matrix_diff((qa * qb).conj_transpose(),
                      qb.conj_transpose() * qa.conj_transpose()) < 1e-12);

    CHECK_THROWS_AS(mat_mul(random_matrix(rng, 2, 3, AlgebraTag::real()),
                            random_matrix(rng, 2, 3, AlgebraTag::real())),
                    std::invalid_argument);
    MatrixF oct(2, 2, AlgebraTag::octonion());
    CHECK_THROWS_AS(mat_mul(oct, oct), std::invalid_argument);
}

TEST_CASE("complex embedding basis cases and homomorphism") {
    const AlgebraTag h = AlgebraTag::quaternion();
    CHECK(matrix_diff(complex_embedding(MatrixF::identity(3, h)),
                      MatrixF::identity(6, AlgebraTag::complex())) == 0.0);

    MatrixF jm(1, 1, h);
    jm.at(0, 0) = Scalar(0, 0, 1, 0);
    const MatrixF ej = complex_embedding(jm);
    CHECK(ej.at(0, 0).norm() == 0.0);
    CHECK((ej.at(0, 1) - Scalar(1.0)).norm() == 0.0);
    CHECK((ej.at(1, 0) + Scalar(1.0)).norm() == 0.0);
    CHECK(ej.at(1, 1).norm() == 0.0);

    Rng rng(RngSpec{"mt19937_64", 11});
    const MatrixF a = random_matrix(rng, 2, 2, h);
    const MatrixF b = random_matrix(rng, 2, 2, h);
    CHECK(matrix_diff(complex_embedding(a * b),
                      complex_embedding(a) * complex_embedding(b)) < 1e-12);
}

TEST_CASE("jacobi eigenvalues reproduce A v = lambda v") {
    Rng rng(RngSpec{"mt19937_64", 3});
    const int n = 5;
    std::vector<double> a(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a[i * n + j] = a[j * n + i] = rng.normal();
    std::vector<double> vec;
    const std::vector<double> eig = jacobi_eigenvalues(a, n, &vec);
    for (int c = 0; c < n; ++c) {
        double resid = 0.0;
        for (int i = 0; i < n; ++i) {
            double av = 0.0;
            for (int j = 0; j < n; ++j) av += a[i * n + j] * vec[j * n + c];
            resid = std::max(resid, std::abs(av - eig[c] * vec[i * n + c]));
        }
        CHECK(resid < 1e-10);
    }
    for (int c = 1; c < n; ++c) CHECK(eig[c - 1] <= eig[c]);
}

TEST_CASE("det_hermitian basics") {
    for (int beta : {1, 2, 4}) {
        const AlgebraTag tag = AlgebraTag::of(beta);
        CHECK(det_hermitian(HermitianMatrix::trusted(MatrixF::identity(3, tag))) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    MatrixF d(2, 2, AlgebraTag::real());
    d.at(0, 0) = Scalar(2.0);
    d.at(1, 1) = Scalar(3.0);
    CHECK(det_hermitian(HermitianMatrix::trusted(d)) == doctest::Approx(6.0));
}

TEST_CASE("quaternion Moore determinant via the paired-eigenvalue embedding") {
    // S = [[2, i+j], [-(i+j), 3]] is Hermitian: by hand, det = 2*3 - |i+j|^2 = 4
    MatrixF s(2, 2, AlgebraTag::quaternion());
    s.at(0, 0) = Scalar(2.0);
    s.at(0, 1) = Scalar(0, 1, 1, 0);
    s.at(1, 0) = Scalar(0, -1, -1, 0);
    s.at(1, 1) = Scalar(3.0);
    const HermitianMatrix hs = HermitianMatrix::from(s);
    CHECK(det_hermitian(hs) == doctest::Approx(4.0).epsilon(1e-10));

    // embedding determinant equals the square of the Moore determinant
    const MatrixF emb = complex_embedding(s);
    const double det_emb = det_hermitian(HermitianMatrix::from(emb));
    CHECK(det_emb == doctest::Approx(16.0).epsilon(1e-9));

    Rng rng(RngSpec{"mt19937_64", 19});
    const HermitianMatrix r = random_hermitian(rng, 3, AlgebraTag::quaternion());
    const double dr = det_hermitian(r);
    const double dr_emb = det_hermitian(HermitianMatrix::from(complex_embedding(r.matrix())));
    CHECK(dr_emb == doctest::Approx(dr * dr).epsilon(1e-9));
}

TEST_CASE("complex determinant matches cofactor expansion") {
    Rng rng(RngSpec{"mt19937_64", 23});
    for (int n : {2, 3}) {
        const HermitianMatrix s = random_hermitian(rng, n, AlgebraTag::complex());
        const Scalar oracle = cofactor_det(s.matrix());
        CHECK(std::abs(oracle.c[1]) < 1e-10);  // Hermitian determinant is real
        CHECK(det_hermitian(s) == doctest::Approx(oracle.re()).epsilon(1e-9));
    }
    // det(A A*) >= 0
    const MatrixF a = random_matrix(rng, 3, 3, AlgebraTag::complex());
    MatrixF aa = a * a.conj_transpose();
    MatrixF sym = aa + aa.conj_transpose();
    sym *= 0.5;
    CHECK(det_hermitian(HermitianMatrix::trusted(sym)) >= 0.0);
}

TEST_CASE("hermitian validation rejects asymmetry") {
    MatrixF s = MatrixF::identity(2, AlgebraTag::complex());
    s.at(0, 1) = Scalar(0.5, 0.25);
    s.at(1, 0) = Scalar(0.5, 0.25);  // should be the conjugate
    CHECK_THROWS_AS(HermitianMatrix::from(s), ashape::NotHermitian);
    s.at(1, 0) = Scalar(0.5, -0.25);
    CHECK_NOTHROW(HermitianMatrix::from(s));
}

TEST_CASE("inv_posdef hand example and round trips") {
    // [[2, i], [-i, 2]] has inverse [[2/3, -i/3], [i/3, 2/3]]
    MatrixF s(2, 2, AlgebraTag::complex());
    s.at(0, 0) = Scalar(2.0);
    s.at(0, 1) = Scalar(0, 1);
    s.at(1, 0) = Scalar(0, -1);
    s.at(1, 1) = Scalar(2.0);
    const HermitianMatrix inv = inv_posdef(HermitianMatrix::from(s));
    CHECK((inv.matrix().at(0, 0) - Scalar(2.0 / 3)).norm() < 1e-12);
    CHECK((inv.matrix().at(0, 1) - Scalar(0, -1.0 / 3)).norm() < 1e-12);
    CHECK((inv.matrix().at(1, 0) - Scalar(0, 1.0 / 3)).norm() < 1e-12);

    Rng rng(RngSpec{"mt19937_64", 31});
    for (int beta : {1, 2, 4}) {
        const AlgebraTag tag = AlgebraTag::of(beta);
        const HermitianMatrix p = random_posdef(rng, 3, tag);
        CHECK(matrix_diff(p.matrix() * inv_posdef(p).matrix(),
                          MatrixF::identity(3, tag)) < 1e-10);
        CHECK(matrix_diff(inv_posdef(inv_posdef(p)).matrix(), p.matrix()) < 1e-9);
    }
    CHECK(matrix_diff(
              inv_posdef(HermitianMatrix::trusted(MatrixF::identity(3, AlgebraTag::real())))
                  .matrix(),
              MatrixF::identity(3, AlgebraTag::real())) < 1e-14);
}

TEST_CASE("inv_posdef rejects indefinite input") {
    MatrixF s(2, 2, AlgebraTag::real());
    s.at(0, 0) = Scalar(1.0);
    s.at(1, 1) = Scalar(-2.0);
    CHECK_THROWS_AS(inv_posdef(HermitianMatrix::trusted(s)), ashape::NotPositiveDefinite);
}

TEST_CASE("sqrt_posdef") {
    CHECK(matrix_diff(
              sqrt_posdef(HermitianMatrix::trusted(MatrixF::identity(2, AlgebraTag::complex())))
                  .matrix(),
              MatrixF::identity(2, AlgebraTag::complex())) < 1e-12);
    MatrixF d(2, 2, AlgebraTag::real());
    d.at(0, 0) = Scalar(4.0);
    d.at(1, 1) = Scalar(9.0);
    const HermitianMatrix r = sqrt_posdef(HermitianMatrix::trusted(d));
    CHECK((r.matrix().at(0, 0) - Scalar(2.0)).norm() < 1e-12);
    CHECK((r.matrix().at(1, 1) - Scalar(3.0)).norm() < 1e-12);

    Rng rng(RngSpec{"mt19937_64", 37});
    for (int beta : {1, 2, 4}) {
        const AlgebraTag tag = AlgebraTag::of(beta);
        const HermitianMatrix p = random_posdef(rng, 3, tag);
        const HermitianMatrix root = sqrt_posdef(p);
        CHECK(matrix_diff(root.matrix() * root.matrix(), p.matrix()) < 1e-10);
    }
}

TEST_CASE("traces") {
    CHECK(re_trace(MatrixF::identity(4, AlgebraTag::quaternion())) == doctest::Approx(4.0));
    Rng rng(RngSpec{"mt19937_64", 41});
    const MatrixF a = random_matrix(rng, 3, 3, AlgebraTag::complex());
    const MatrixF b = random_matrix(rng, 3, 3, AlgebraTag::complex());
    CHECK(re_trace(a * b) == doctest::Approx(re_trace(b * a)).epsilon(1e-12));
    CHECK_THROWS_AS(re_trace(random_matrix(rng, 2, 3, AlgebraTag::real())),
                    std::invalid_argument);

    // quaternion Hermitian diagonals carry no imaginary part
    const HermitianMatrix s = random_hermitian(rng, 3, AlgebraTag::quaternion());
    for (int i = 0; i < 3; ++i) {
        CHECK(s.matrix().at(i, i).c[1] == doctest::Approx(0.0));
        CHECK(s.matrix().at(i, i).c[2] == doctest::Approx(0.0));
        CHECK(s.matrix().at(i, i).c[3] == doctest::Approx(0.0));
    }
    CHECK(herm_trace(s) == doctest::Approx(re_trace(s.matrix())));
}

TEST_CASE("general inverse by Gauss-Jordan") {
    Rng rng(RngSpec{"mt19937_64", 43});
    for (int beta : {1, 2, 4}) {
        const AlgebraTag tag = AlgebraTag::of(beta);
        const MatrixF a = random_matrix(rng, 4, 4, tag);
        const MatrixF inv = inverse(a);
        CHECK(matrix_diff(a * inv, MatrixF::identity(4, tag)) < 1e-10);
        CHECK(matrix_diff(inv * a, MatrixF::identity(4, tag)) < 1e-10);
    }
    MatrixF sing(2, 2, AlgebraTag::real());
    sing.at(0, 0) = Scalar(1.0);
    sing.at(0, 1) = Scalar(2.0);
    sing.at(1, 0) = Scalar(2.0);
    sing.at(1, 1) = Scalar(4.0);
    CHECK_THROWS_AS(inverse(sing), ashape::SingularMatrix);
}

TEST_CASE("cholesky factorization") {
    Rng rng(RngSpec{"mt19937_64", 47});
    for (int beta : {1, 2, 4}) {
        const AlgebraTag tag = AlgebraTag::of(beta);
        const HermitianMatrix p = random_posdef(rng, 4, tag);
        const MatrixF l = cholesky(p);
        CHECK(matrix_diff(l * l.conj_transpose(), p.matrix()) < 1e-11);
        // log_det agrees with the eigenvalue product
        CHECK(std::exp(log_det_posdef(p)) ==
              doctest::Approx(det_hermitian(p)).epsilon(1e-9));
    }
}
