#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ashape/errors.hpp"

namespace ashape::algebra {

// Field selector for the real normed division algebras.  beta is the real
// dimension: 1 (reals), 2 (complex), 4 (quaternions), 8 (octonions).
// Matrix arithmetic exists for beta <= 4 only; beta = 8 is accepted by the
// formula-level functions (gamma, Pochhammer, volumes, log-space densities
// evaluated from user-supplied determinants and traces).
struct AlgebraTag {
    int beta = 1;

    static AlgebraTag of(int beta);
    static AlgebraTag real() { return {1}; }
    static AlgebraTag complex() { return {2}; }
    static AlgebraTag quaternion() { return {4}; }
    static AlgebraTag octonion() { return {8}; }

    bool full_numeric() const { return beta == 1 || beta == 2 || beta == 4; }
    const char* name() const;

    friend bool operator==(AlgebraTag a, AlgebraTag b) { return a.beta == b.beta; }
};

// Value in R, C or H stored as quaternion components (1, i, j, k).  The three
// numeric algebras are nested subalgebras of H, so one Hamilton product
// covers them all; an AlgebraTag on the containing matrix says which
// components are allowed to be nonzero.
struct Scalar {
    std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

    Scalar() = default;
    Scalar(double re) : c{re, 0.0, 0.0, 0.0} {}
    Scalar(double re, double i) : c{re, i, 0.0, 0.0} {}
    Scalar(double re, double i, double j, double k) : c{re, i, j, k} {}

    double re() const { return c[0]; }
    double norm2() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]; }
    double norm() const;

    bool in_algebra(AlgebraTag tag, double tol = 0.0) const;

    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(double s);
};

Scalar operator+(Scalar a, const Scalar& b);
Scalar operator-(Scalar a, const Scalar& b);
Scalar operator-(const Scalar& a);
Scalar operator*(const Scalar& a, const Scalar& b);  // Hamilton product
Scalar operator*(double s, Scalar a);
Scalar operator*(Scalar a, double s);
Scalar conj(const Scalar& a);
Scalar inverse(const Scalar& a);  // conj(a)/|a|^2, throws on zero

// Dense rows x cols matrix over the tagged algebra, row-major.
class MatrixF {
  public:
    MatrixF() = default;
    MatrixF(int rows, int cols, AlgebraTag algebra);

    static MatrixF identity(int n, AlgebraTag algebra);
    static MatrixF zero(int rows, int cols, AlgebraTag algebra);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    AlgebraTag algebra() const { return algebra_; }

    Scalar& at(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const Scalar& at(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    MatrixF conj_transpose() const;
    MatrixF block(int row0, int col0, int nrows, int ncols) const;
    double frobenius_norm() const;

    // Entry components outside the algebra must be zero (exactly, or within tol).
    void validate_entries(double tol = 0.0) const;

    MatrixF& operator+=(const MatrixF& o);
    MatrixF& operator-=(const MatrixF& o);
    MatrixF& operator*=(double s);

  private:
    int rows_ = 0, cols_ = 0;
    AlgebraTag algebra_{1};
    std::vector<Scalar> data_;
};

MatrixF operator+(MatrixF a, const MatrixF& b);
MatrixF operator-(MatrixF a, const MatrixF& b);
MatrixF operator*(double s, MatrixF a);
MatrixF operator*(const MatrixF& a, const MatrixF& b);

// mat_mul with precondition checks (dimensions, same algebra, full-numeric).
MatrixF mat_mul(const MatrixF& a, const MatrixF& b);

// Real part of the trace.  Equals the full trace for Hermitian arguments.
double re_trace(const MatrixF& a);

// Square matrix with S = S* (validated on construction, tolerance relative
// to the largest entry).  Violations are errors, never silently repaired.
class HermitianMatrix {
  public:
    static HermitianMatrix from(const MatrixF& m, double tol = 1e-10);
    // Trusted constructor for matrices that are Hermitian by construction
    // (symmetrized products, identity scalings).  Skips the check.
    static HermitianMatrix trusted(MatrixF m);

    const MatrixF& matrix() const { return m_; }
    int dim() const { return m_.rows(); }
    AlgebraTag algebra() const { return m_.algebra(); }

  private:
    HermitianMatrix() = default;
    MatrixF m_;
};

double herm_trace(const HermitianMatrix& s);

// Quaternion n x m -> complex 2n x 2m adjoint map: q = z1 + z2 j becomes
// [[z1, z2], [-conj(z2), conj(z1)]].  A homomorphism: embed(AB) = embed(A) embed(B).
MatrixF complex_embedding(const MatrixF& a);

// Complex n x m -> real 2n x 2m realification [[X, -Y], [Y, X]]; used to
// reduce every Hermitian eigenproblem to a real symmetric one.
MatrixF real_embedding(const MatrixF& a);

// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
// ascending.  If vectors != nullptr it receives the orthonormal eigenvector
// columns (same dense row-major layout, n x n).
std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n,
                                       std::vector<double>* vectors = nullptr);

// The dim() real eigenvalues of S via the real symmetric embedding
// (multiplicity beta in the embedding, collapsed), ascending.
std::vector<double> eigenvalues_hermitian(const HermitianMatrix& s);

// Product of the dim() real eigenvalues.  For beta = 4 this is the Moore
// determinant (one eigenvalue per embedding pair).
double det_hermitian(const HermitianMatrix& s);
double log_det_posdef(const HermitianMatrix& s);  // via Cholesky, throws if not pd

// Cholesky S = L L* with real positive diagonal; throws NotPositiveDefinite.
MatrixF cholesky(const HermitianMatrix& s);

HermitianMatrix inv_posdef(const HermitianMatrix& s);
HermitianMatrix sqrt_posdef(const HermitianMatrix& s);

// General square inverse by Gauss-Jordan with norm pivoting (beta <= 4).
// Throws SingularMatrix when a pivot collapses.
MatrixF inverse(const MatrixF& a);

std::string to_string(const Scalar& s);

}  // namespace ashape::algebra
