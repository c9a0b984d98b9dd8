#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ashape/inference.hpp"
#include "ashape/mc.hpp"
#include "ashape/shape.hpp"
#include "ashape/special_functions.hpp"

namespace py = pybind11;
using namespace ashape;
using algebra::AlgebraTag;
using algebra::HermitianMatrix;
using algebra::MatrixF;
using algebra::Scalar;

namespace {

// matrices cross the boundary as rows x cols x component lists, the same
// encoding the JSON files use; a bare number is a real entry
using PyMatrix = std::vector<std::vector<std::vector<double>>>;

MatrixF to_matrix(const PyMatrix& m, int beta) {
    const AlgebraTag tag = AlgebraTag::of(beta);
    if (m.empty() || m[0].empty()) throw std::invalid_argument("empty matrix");
    MatrixF out(static_cast<int>(m.size()), static_cast<int>(m[0].size()), tag);
    for (size_t i = 0; i < m.size(); ++i) {
        if (m[i].size() != m[0].size()) throw std::invalid_argument("ragged matrix");
        for (size_t j = 0; j < m[i].size(); ++j) {
            if (static_cast<int>(m[i][j].size()) > beta)
                throw std::invalid_argument("entry has more components than beta");
            Scalar s;
            for (size_t c = 0; c < m[i][j].size(); ++c) s.c[c] = m[i][j][c];
            out.at(static_cast<int>(i), static_cast<int>(j)) = s;
        }
    }
    return out;
}

PyMatrix from_matrix(const MatrixF& m) {
    PyMatrix out(m.rows());
    for (int i = 0; i < m.rows(); ++i) {
        out[i].resize(m.cols());
        for (int j = 0; j < m.cols(); ++j) {
            out[i][j].resize(m.algebra().beta);
            for (int c = 0; c < m.algebra().beta; ++c) out[i][j][c] = m.at(i, j).c[c];
        }
    }
    return out;
}

inference::ShapeSample make_sample(const std::vector<PyMatrix>& vs, int beta, int N, int K) {
    std::vector<shape::ConfigurationCoordinates> coords;
    coords.reserve(vs.size());
    for (const auto& v : vs) coords.push_back({to_matrix(v, beta)});
    return inference::ShapeSample::make("", std::move(coords), AlgebraTag::of(beta), N, K);
}

py::dict fit_to_dict(const inference::FitResult& f) {
    py::dict d;
    d["mu_hat"] = from_matrix(f.mu_hat);
    d["sigma2_hat"] = f.sigma2_hat;
    d["loglik"] = f.loglik;
    d["iterations"] = f.iterations;
    d["converged"] = f.converged;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "affine (configuration) shape densities over the real normed division algebras";

    m.def("chisq_sf", &inference::chisq_sf, py::arg("x"), py::arg("df"),
          "upper tail P(chi^2_df >= x)");

    m.def(
        "mv_gamma_ln",
        [](double beta, int mm, double a) { return sf::mv_gamma_ln(beta, mm, a); },
        py::arg("beta"), py::arg("m"), py::arg("a"));

    m.def(
        "gen_pochhammer",
        [](double beta, double a, const std::vector<int>& kappa) {
            return sf::gen_pochhammer(beta, a, sf::Partition(kappa));
        },
        py::arg("beta"), py::arg("a"), py::arg("kappa"));

    m.def(
        "stiefel_volume_ln",
        [](double beta, int mm, int n) { return sf::stiefel_volume_ln(beta, mm, n); },
        py::arg("beta"), py::arg("m"), py::arg("n"));

    m.def(
        "partitions_of",
        [](int k, int max_parts) {
            std::vector<std::vector<int>> out;
            for (const auto& p : sf::partitions_of(k, max_parts)) out.push_back(p.parts());
            return out;
        },
        py::arg("k"), py::arg("max_parts"));

    m.def(
        "jack",
        [](double beta, const std::vector<int>& kappa, const std::vector<double>& eigs) {
            return sf::jack_c(beta, sf::Partition(kappa), eigs);
        },
        py::arg("beta"), py::arg("kappa"), py::arg("eigenvalues"),
        "Jack polynomial C_kappa^beta at the given eigenvalues");

    m.def(
        "hypergeometric",
        [](double beta, const std::vector<double>& upper, const std::vector<double>& lower,
           const std::vector<double>& eigs, int max_weight, double tol) {
            sf::HypergeometricSpec spec;
            spec.beta = beta;
            spec.upper = upper;
            spec.lower = lower;
            spec.max_weight = max_weight;
            spec.tol = tol;
            return sf::hypergeometric_value(spec, eigs);
        },
        py::arg("beta"), py::arg("upper"), py::arg("lower"), py::arg("eigenvalues"),
        py::arg("max_weight") = 40, py::arg("tol") = 1e-10,
        "pFq^beta of one Hermitian matrix argument");

    m.def(
        "helmert",
        [](int n) { return from_matrix(shape::helmert_submatrix(n)); },
        py::arg("N"));

    m.def(
        "configuration_coords",
        [](const PyMatrix& landmarks, int beta) {
            return from_matrix(
                shape::configuration_coords(to_matrix(landmarks, beta)).v);
        },
        py::arg("landmarks"), py::arg("beta"),
        "affine shape V of an N x K landmark matrix (Theta = I)");

    m.def(
        "density_central",
        [](const PyMatrix& v, int beta, int N, int K) {
            const AlgebraTag tag = AlgebraTag::of(beta);
            return shape::density_central(
                shape::ConfigurationCoordinates{to_matrix(v, beta)},
                HermitianMatrix::trusted(MatrixF::identity(N - 1, tag)), beta, N, K);
        },
        py::arg("v"), py::arg("beta"), py::arg("N"), py::arg("K"),
        "central affine shape density at Sigma = I");

    m.def(
        "density_gaussian_isotropic",
        [](const PyMatrix& v, const PyMatrix& mu, double sigma2, int beta) {
            return shape::density_gaussian_isotropic(
                shape::ConfigurationCoordinates{to_matrix(v, beta)}, to_matrix(mu, beta),
                sigma2);
        },
        py::arg("v"), py::arg("mu"), py::arg("sigma2"), py::arg("beta"),
        "isotropic Gaussian affine shape density; mu is the reduced (N-1) x K mean");

    m.def(
        "loglik",
        [](const PyMatrix& mu, double sigma2, const std::vector<PyMatrix>& vs, int beta,
           int N, int K) {
            return inference::loglik(to_matrix(mu, beta), sigma2,
                                     make_sample(vs, beta, N, K));
        },
        py::arg("mu"), py::arg("sigma2"), py::arg("vs"), py::arg("beta"), py::arg("N"),
        py::arg("K"));

    m.def(
        "fit_mle",
        [](const std::vector<PyMatrix>& vs, int beta, int N, int K, int restarts,
           std::uint64_t seed) {
            inference::FitOptions opts;
            opts.restarts = restarts;
            opts.seed = seed;
            return fit_to_dict(inference::fit_mle(make_sample(vs, beta, N, K), opts));
        },
        py::arg("vs"), py::arg("beta"), py::arg("N"), py::arg("K"),
        py::arg("restarts") = 5, py::arg("seed") = 1);

    m.def(
        "lrt_equal_means",
        [](const std::vector<PyMatrix>& va, const std::vector<PyMatrix>& vb, int beta,
           int N, int K, int restarts, std::uint64_t seed) {
            inference::FitOptions opts;
            opts.restarts = restarts;
            opts.seed = seed;
            const auto r = inference::lrt_equal_means(make_sample(va, beta, N, K),
                                                      make_sample(vb, beta, N, K), opts);
            py::dict d;
            d["statistic"] = r.statistic;
            d["df"] = r.df;
            d["p_value"] = r.p_value;
            d["loglik_h1"] = r.loglik_h1;
            d["loglik_h0"] = r.loglik_h0;
            d["fit_a"] = fit_to_dict(r.fit_a);
            d["fit_b"] = fit_to_dict(r.fit_b);
            return d;
        },
        py::arg("vs_a"), py::arg("vs_b"), py::arg("beta"), py::arg("N"), py::arg("K"),
        py::arg("restarts") = 5, py::arg("seed") = 1);

    m.def(
        "simulate_landmarks",
        [](const PyMatrix& mean, double sigma, int n, int beta, std::uint64_t seed) {
            mc::Rng rng(mc::RngSpec{"mt19937_64", seed});
            const MatrixF mu = to_matrix(mean, beta);
            std::vector<PyMatrix> out;
            for (int i = 0; i < n; ++i) {
                MatrixF noise = rng.gaussian_matrix(mu.rows(), mu.cols(), mu.algebra());
                noise *= sigma;
                out.push_back(from_matrix(mu + noise));
            }
            return out;
        },
        py::arg("mean"), py::arg("sigma"), py::arg("n"), py::arg("beta"),
        py::arg("seed") = 1);

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
