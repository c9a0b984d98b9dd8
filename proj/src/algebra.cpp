#include "ashape/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ashape::algebra {

AlgebraTag AlgebraTag::of(int beta) {
    if (beta != 1 && beta != 2 && beta != 4 && beta != 8)
        throw std::invalid_argument("AlgebraTag: beta must be 1, 2, 4 or 8, got " +
                                    std::to_string(beta));
    return AlgebraTag{beta};
}

const char* AlgebraTag::name() const {
    switch (beta) {
        case 1: return "real";
        case 2: return "complex";
        case 4: return "quaternion";
        case 8: return "octonion";
    }
    return "invalid";
}

double Scalar::norm() const { return std::sqrt(norm2()); }

bool Scalar::in_algebra(AlgebraTag tag, double tol) const {
    for (int k = tag.beta; k < 4; ++k)
        if (std::abs(c[k]) > tol) return false;
    return true;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    for (int k = 0; k < 4; ++k) c[k] += o.c[k];
    return *this;
}
Scalar& Scalar::operator-=(const Scalar& o) {
    for (int k = 0; k < 4; ++k) c[k] -= o.c[k];
    return *this;
}
Scalar& Scalar::operator*=(double s) {
    for (int k = 0; k < 4; ++k) c[k] *= s;
    return *this;
}

Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
Scalar operator-(const Scalar& a) { return {-a.c[0], -a.c[1], -a.c[2], -a.c[3]}; }

Scalar operator*(const Scalar& a, const Scalar& b) {
    const auto& p = a.c;
    const auto& q = b.c;
    return {p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
            p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
            p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
            p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]};
}

Scalar operator*(double s, Scalar a) { return a *= s; }
Scalar operator*(Scalar a, double s) { return a *= s; }

Scalar conj(const Scalar& a) { return {a.c[0], -a.c[1], -a.c[2], -a.c[3]}; }

Scalar inverse(const Scalar& a) {
    const double n2 = a.norm2();
    if (n2 == 0.0) throw SingularMatrix("Scalar::inverse of zero");
    Scalar r = conj(a);
    return r *= 1.0 / n2;
}

std::string to_string(const Scalar& s) {
    std::ostringstream os;
    os << s.c[0];
    const char* basis[3] = {"i", "j", "k"};
    for (int k = 1; k < 4; ++k)
        if (s.c[k] != 0.0) os << (s.c[k] > 0 ? "+" : "") << s.c[k] << basis[k - 1];
    return os.str();
}

MatrixF::MatrixF(int rows, int cols, AlgebraTag algebra)
    : rows_(rows), cols_(cols), algebra_(algebra) {
    if (rows <= 0 || cols <= 0)
        throw std::invalid_argument("MatrixF: dimensions must be positive");
    data_.assign(static_cast<size_t>(rows) * cols, Scalar{});
}

MatrixF MatrixF::identity(int n, AlgebraTag algebra) {
    MatrixF m(n, n, algebra);
    for (int i = 0; i < n; ++i) m.at(i, i) = Scalar(1.0);
    return m;
}

MatrixF MatrixF::zero(int rows, int cols, AlgebraTag algebra) {
    return MatrixF(rows, cols, algebra);
}

MatrixF MatrixF::conj_transpose() const {
    MatrixF r(cols_, rows_, algebra_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.at(j, i) = conj(at(i, j));
    return r;
}

MatrixF MatrixF::block(int row0, int col0, int nrows, int ncols) const {
    if (row0 < 0 || col0 < 0 || row0 + nrows > rows_ || col0 + ncols > cols_)
        throw std::invalid_argument("MatrixF::block out of range");
    MatrixF r(nrows, ncols, algebra_);
    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < ncols; ++j) r.at(i, j) = at(row0 + i, col0 + j);
    return r;
}

double MatrixF::frobenius_norm() const {
    double s = 0.0;
    for (const auto& x : data_) s += x.norm2();
    return std::sqrt(s);
}

void MatrixF::validate_entries(double tol) const {
    for (const auto& x : data_)
        if (!x.in_algebra(algebra_, tol))
            throw std::invalid_argument(std::string("MatrixF: entry outside the ") +
                                        algebra_.name() + " algebra");
}

MatrixF& MatrixF::operator+=(const MatrixF& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("MatrixF: shape mismatch in +");
    for (size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}
MatrixF& MatrixF::operator-=(const MatrixF& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("MatrixF: shape mismatch in -");
    for (size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}
MatrixF& MatrixF::operator*=(double s) {
    for (auto& x : data_) x *= s;
    return *this;
}

MatrixF operator+(MatrixF a, const MatrixF& b) { return a += b; }
MatrixF operator-(MatrixF a, const MatrixF& b) { return a -= b; }
MatrixF operator*(double s, MatrixF a) { return a *= s; }

MatrixF operator*(const MatrixF& a, const MatrixF& b) { return mat_mul(a, b); }

MatrixF mat_mul(const MatrixF& a, const MatrixF& b) {
    if (!(a.algebra() == b.algebra()))
        throw std::invalid_argument("mat_mul: operands use different algebras");
    if (!a.algebra().full_numeric())
        throw std::invalid_argument("mat_mul: no matrix arithmetic over the octonions");
    if (a.cols() != b.rows())
        throw std::invalid_argument("mat_mul: inner dimensions differ");
    MatrixF r(a.rows(), b.cols(), a.algebra());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const Scalar& aik = a.at(i, k);
            for (int j = 0; j < b.cols(); ++j) r.at(i, j) += aik * b.at(k, j);
        }
    return r;
}

double re_trace(const MatrixF& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("re_trace: matrix not square");
    double t = 0.0;
    for (int i = 0; i < a.rows(); ++i) t += a.at(i, i).re();
    return t;
}

HermitianMatrix HermitianMatrix::from(const MatrixF& m, double tol) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("HermitianMatrix: matrix not square");
    double scale = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) scale = std::max(scale, m.at(i, j).norm());
    const double bound = tol * std::max(scale, 1.0);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i; j < m.cols(); ++j) {
            Scalar d = m.at(i, j) - conj(m.at(j, i));
            if (d.norm() > bound)
                throw NotHermitian("HermitianMatrix: S != S* at (" + std::to_string(i) +
                                   "," + std::to_string(j) + ")");
        }
    HermitianMatrix h;
    h.m_ = m;
    return h;
}

HermitianMatrix HermitianMatrix::trusted(MatrixF m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("HermitianMatrix: matrix not square");
    HermitianMatrix h;
    h.m_ = std::move(m);
    return h;
}

double herm_trace(const HermitianMatrix& s) { return re_trace(s.matrix()); }

MatrixF complex_embedding(const MatrixF& a) {
    if (a.algebra().beta != 4)
        throw std::invalid_argument("complex_embedding: input must be quaternion");
    MatrixF r(2 * a.rows(), 2 * a.cols(), AlgebraTag::complex());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const auto& q = a.at(i, j).c;  // q = (w + xi) + (y + zi) j
            r.at(2 * i, 2 * j) = Scalar(q[0], q[1]);
            r.at(2 * i, 2 * j + 1) = Scalar(q[2], q[3]);
            r.at(2 * i + 1, 2 * j) = Scalar(-q[2], q[3]);
            r.at(2 * i + 1, 2 * j + 1) = Scalar(q[0], -q[1]);
        }
    return r;
}

MatrixF real_embedding(const MatrixF& a) {
    if (a.algebra().beta != 2)
        throw std::invalid_argument("real_embedding: input must be complex");
    const int n = a.rows(), m = a.cols();
    MatrixF r(2 * n, 2 * m, AlgebraTag::real());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const double x = a.at(i, j).c[0], y = a.at(i, j).c[1];
            r.at(i, j) = Scalar(x);
            r.at(i, j + m) = Scalar(-y);
            r.at(i + n, j) = Scalar(y);
            r.at(i + n, j + m) = Scalar(x);
        }
    return r;
}

namespace {

// Row-major dense real symmetric storage for the Jacobi sweep.
inline double& el(std::vector<double>& a, int n, int i, int j) { return a[static_cast<size_t>(i) * n + j]; }

// Embed a Hermitian matrix into a real symmetric one; factor = beta for
// beta in {1,2,4} (each eigenvalue appears exactly `factor` times).
std::vector<double> symmetric_embedding(const HermitianMatrix& s, int& n_out) {
    const int beta = s.algebra().beta;
    MatrixF m = s.matrix();
    if (beta == 4) m = complex_embedding(m);
    if (beta >= 2) m = real_embedding(m);
    n_out = m.rows();
    std::vector<double> a(static_cast<size_t>(n_out) * n_out);
    for (int i = 0; i < n_out; ++i)
        for (int j = 0; j < n_out; ++j) a[static_cast<size_t>(i) * n_out + j] = m.at(i, j).re();
    // kill the antisymmetric round-off so the sweep sees an exactly symmetric input
    for (int i = 0; i < n_out; ++i)
        for (int j = i + 1; j < n_out; ++j) {
            double v = 0.5 * (a[static_cast<size_t>(i) * n_out + j] + a[static_cast<size_t>(j) * n_out + i]);
            a[static_cast<size_t>(i) * n_out + j] = v;
            a[static_cast<size_t>(j) * n_out + i] = v;
        }
    return a;
}

}  // namespace

std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n, std::vector<double>* vectors) {
    if (n <= 0 || a.size() != static_cast<size_t>(n) * n)
        throw std::invalid_argument("jacobi_eigenvalues: bad dimensions");
    std::vector<double> v;
    if (vectors) {
        v.assign(static_cast<size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) el(v, n, i, i) = 1.0;
    }
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += el(a, n, i, j) * el(a, n, i, j);
        if (off <= 1e-300) break;
        double diag = 0.0;
        for (int i = 0; i < n; ++i) diag = std::max(diag, std::abs(el(a, n, i, i)));
        if (std::sqrt(off) <= 1e-15 * std::max(diag, 1.0) && sweep > 0) break;

        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = el(a, n, p, q);
                if (apq == 0.0) continue;
                const double app = el(a, n, p, p), aqq = el(a, n, q, q);
                if (std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq) + 1e-300)) {
                    el(a, n, p, q) = el(a, n, q, p) = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                el(a, n, p, p) = app - t * apq;
                el(a, n, q, q) = aqq + t * apq;
                el(a, n, p, q) = el(a, n, q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = el(a, n, k, p), akq = el(a, n, k, q);
                    el(a, n, k, p) = el(a, n, p, k) = akp - s * (akq + tau * akp);
                    el(a, n, k, q) = el(a, n, q, k) = akq + s * (akp - tau * akq);
                }
                if (vectors)
                    for (int k = 0; k < n; ++k) {
                        const double vkp = el(v, n, k, p), vkq = el(v, n, k, q);
                        el(v, n, k, p) = vkp - s * (vkq + tau * vkp);
                        el(v, n, k, q) = vkq + s * (vkp - tau * vkq);
                    }
            }
    }
    std::vector<double> eig(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) {
        eig[i] = el(a, n, i, i);
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](int x, int y) { return eig[x] < eig[y]; });
    std::vector<double> sorted(n);
    for (int i = 0; i < n; ++i) sorted[i] = eig[order[i]];
    if (vectors) {
        vectors->assign(static_cast<size_t>(n) * n, 0.0);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) el(*vectors, n, i, j) = el(v, n, i, order[j]);
    }
    return sorted;
}

std::vector<double> eigenvalues_hermitian(const HermitianMatrix& s) {
    const int beta = s.algebra().beta;
    if (!s.algebra().full_numeric())
        throw std::invalid_argument("eigenvalues_hermitian: formula-only algebra");
    int n = 0;
    std::vector<double> a = symmetric_embedding(s, n);
    std::vector<double> all = jacobi_eigenvalues(std::move(a), n);
    // eigenvalues occur in groups of `beta`; take one representative per group
    std::vector<double> out;
    out.reserve(s.dim());
    for (int g = 0; g < s.dim(); ++g) {
        double acc = 0.0;
        for (int r = 0; r < beta; ++r) acc += all[static_cast<size_t>(g) * beta + r];
        out.push_back(acc / beta);
    }
    return out;
}

double det_hermitian(const HermitianMatrix& s) {
    double d = 1.0;
    for (double lam : eigenvalues_hermitian(s)) d *= lam;
    return d;
}

MatrixF cholesky(const HermitianMatrix& s) {
    const MatrixF& m = s.matrix();
    if (!m.algebra().full_numeric())
        throw std::invalid_argument("cholesky: formula-only algebra");
    const int n = m.rows();
    MatrixF l = MatrixF::zero(n, n, m.algebra());
    for (int j = 0; j < n; ++j) {
        double d = m.at(j, j).re();
        for (int k = 0; k < j; ++k) d -= l.at(j, k).norm2();
        if (!(d > 0.0) || !std::isfinite(d))
            throw NotPositiveDefinite("cholesky: leading minor " + std::to_string(j + 1) +
                                      " not positive");
        const double ljj = std::sqrt(d);
        l.at(j, j) = Scalar(ljj);
        for (int i = j + 1; i < n; ++i) {
            Scalar x = m.at(i, j);
            for (int k = 0; k < j; ++k) x -= l.at(i, k) * conj(l.at(j, k));
            l.at(i, j) = x * (1.0 / ljj);
        }
    }
    return l;
}

double log_det_posdef(const HermitianMatrix& s) {
    MatrixF l = cholesky(s);
    double ld = 0.0;
    for (int i = 0; i < l.rows(); ++i) ld += std::log(l.at(i, i).re());
    return 2.0 * ld;
}

HermitianMatrix inv_posdef(const HermitianMatrix& s) {
    const int n = s.dim();
    MatrixF l = cholesky(s);
    // forward solve L Y = I, then backward solve L* X = Y; diagonals are real
    MatrixF y = MatrixF::identity(n, s.algebra());
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            Scalar x = y.at(i, j);
            for (int k = 0; k < i; ++k) x -= l.at(i, k) * y.at(k, j);
            y.at(i, j) = x * (1.0 / l.at(i, i).re());
        }
    MatrixF xinv(n, n, s.algebra());
    for (int j = 0; j < n; ++j)
        for (int i = n - 1; i >= 0; --i) {
            Scalar x = y.at(i, j);
            for (int k = i + 1; k < n; ++k) x -= conj(l.at(k, i)) * xinv.at(k, j);
            xinv.at(i, j) = x * (1.0 / l.at(i, i).re());
        }
    // clean the round-off asymmetry of the solve
    MatrixF sym = xinv + xinv.conj_transpose();
    sym *= 0.5;
    return HermitianMatrix::trusted(std::move(sym));
}

namespace {

MatrixF real_unembed(const std::vector<double>& a, int n2, AlgebraTag out_tag) {
    // inverse of real_embedding with averaging over the redundant blocks
    const int n = n2 / 2;
    MatrixF r(n, n, out_tag.beta == 1 ? AlgebraTag::real() : AlgebraTag::complex());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = 0.5 * (a[static_cast<size_t>(i) * n2 + j] +
                                    a[static_cast<size_t>(i + n) * n2 + (j + n)]);
            const double y = 0.5 * (a[static_cast<size_t>(i + n) * n2 + j] -
                                    a[static_cast<size_t>(i) * n2 + (j + n)]);
            r.at(i, j) = Scalar(x, y);
        }
    return r;
}

MatrixF complex_unembed(const MatrixF& b) {
    // inverse of complex_embedding with averaging
    const int n = b.rows() / 2;
    MatrixF r(n, n, AlgebraTag::quaternion());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Scalar z1 = 0.5 * (b.at(2 * i, 2 * j) + conj(b.at(2 * i + 1, 2 * j + 1)));
            const Scalar z2 = 0.5 * (b.at(2 * i, 2 * j + 1) - conj(b.at(2 * i + 1, 2 * j)));
            r.at(i, j) = Scalar(z1.c[0], z1.c[1], z2.c[0], z2.c[1]);
        }
    return r;
}

}  // namespace

HermitianMatrix sqrt_posdef(const HermitianMatrix& s) {
    const int beta = s.algebra().beta;
    if (!s.algebra().full_numeric())
        throw std::invalid_argument("sqrt_posdef: formula-only algebra");
    int n = 0;
    std::vector<double> a = symmetric_embedding(s, n);
    std::vector<double> vec;
    std::vector<double> eig = jacobi_eigenvalues(std::move(a), n, &vec);
    if (eig.front() <= 0.0)
        throw NotPositiveDefinite("sqrt_posdef: matrix not positive definite");
    std::vector<double> root(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k)
                acc += vec[static_cast<size_t>(i) * n + k] * std::sqrt(eig[k]) *
                       vec[static_cast<size_t>(j) * n + k];
            root[static_cast<size_t>(i) * n + j] = acc;
        }
    // the unique pd square root commutes with the embeddings, so unembedding
    // recovers the algebra-level root
    if (beta == 1) {
        MatrixF r(s.dim(), s.dim(), AlgebraTag::real());
        for (int i = 0; i < s.dim(); ++i)
            for (int j = 0; j < s.dim(); ++j)
                r.at(i, j) = Scalar(0.5 * (root[static_cast<size_t>(i) * n + j] +
                                           root[static_cast<size_t>(j) * n + i]));
        return HermitianMatrix::trusted(std::move(r));
    }
    MatrixF c = real_unembed(root, n, AlgebraTag::complex());
    if (beta == 2) {
        MatrixF sym = c + c.conj_transpose();
        sym *= 0.5;
        return HermitianMatrix::trusted(std::move(sym));
    }
    MatrixF q = complex_unembed(c);
    MatrixF sym = q + q.conj_transpose();
    sym *= 0.5;
    return HermitianMatrix::trusted(std::move(sym));
}

MatrixF inverse(const MatrixF& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("inverse: matrix not square");
    if (!a.algebra().full_numeric())
        throw std::invalid_argument("inverse: formula-only algebra");
    const int n = a.rows();
    MatrixF w = a;
    MatrixF inv = MatrixF::identity(n, a.algebra());
    double scale = w.frobenius_norm();
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = w.at(col, col).norm();
        for (int r = col + 1; r < n; ++r)
            if (w.at(r, col).norm() > best) {
                best = w.at(r, col).norm();
                piv = r;
            }
        if (best <= 1e-13 * std::max(scale, 1e-300))
            throw SingularMatrix("inverse: pivot " + std::to_string(col) + " collapsed");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(w.at(piv, j), w.at(col, j));
                std::swap(inv.at(piv, j), inv.at(col, j));
            }
        const Scalar pinv = inverse(w.at(col, col));
        for (int j = 0; j < n; ++j) {
            w.at(col, j) = pinv * w.at(col, j);
            inv.at(col, j) = pinv * inv.at(col, j);
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const Scalar f = w.at(r, col);
            if (f.norm2() == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                w.at(r, j) -= f * w.at(col, j);
                inv.at(r, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

}  // namespace ashape::algebra
