#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "ashape/inference.hpp"
#include "ashape/io.hpp"
#include "ashape/mc.hpp"
#include "ashape/shape.hpp"

using nlohmann::json;
using namespace ashape;
using algebra::AlgebraTag;
using algebra::HermitianMatrix;
using algebra::MatrixF;
using algebra::Scalar;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitFit = 70;

struct GlobalOpts {
    std::uint64_t seed = 1;
    std::string out;
    double tol = 1e-10;
    int max_shell = 40;
    int restarts = 5;
    std::string format = "json";
};

shape::TruncationPolicy truncation(const GlobalOpts& g) {
    shape::TruncationPolicy t;
    t.tol = g.tol;
    t.max_shell = g.max_shell;
    t.max_t = g.max_shell;
    return t;
}

void emit(const json& j, const GlobalOpts& g) {
    std::cout << j.dump(2) << "\n";
    if (!g.out.empty()) io::write_json_file(j, g.out);
}

std::optional<HermitianMatrix> load_theta(const std::string& path, AlgebraTag tag) {
    if (path.empty() || path == "identity") return std::nullopt;
    return HermitianMatrix::from(io::matrix_from_json(io::read_json_file(path), tag));
}

// a fit/test input may be a landmark file or an already-extracted config file
io::ConfigFile load_as_config(const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
        return io::extract_configurations(io::landmark_from_csv(path), std::nullopt);
    const json j = io::read_json_file(path);
    if (j.contains("specimens") && !j["specimens"].empty() &&
        j["specimens"][0].contains("v"))
        return io::config_from_json(j);
    return io::extract_configurations(io::landmark_from_json(j), std::nullopt);
}

MatrixF default_mean_landmarks(int N, int K, AlgebraTag tag) {
    // landmarks on a modulated circle so no subset stays collinear
    MatrixF mu(N, K, tag);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < K; ++j) {
            const double a = 2.0 * M_PI * (i + 0.13 * j) / N;
            const double r = 1.0 + 0.25 * std::cos(3.0 * a + j);
            Scalar s;
            if (tag.beta >= 2) {
                s.c[0] = r * std::cos(a);
                s.c[1] = r * std::sin(a);
            } else {
                s.c[0] = (K >= 2 && j == 1) ? r * std::sin(a) : r * std::cos(a);
            }
            mu.at(i, j) = s;
        }
    return mu;
}

int run_config(const std::string& input, const std::string& theta_path,
               const GlobalOpts& g) {
    const io::LandmarkFile lf = io::read_landmark_file(input);
    const auto theta = load_theta(theta_path, lf.algebra);
    const io::ConfigFile cf = io::extract_configurations(lf, theta);
    for (const auto& id : cf.degenerate)
        std::cerr << "degenerate specimen: " << id << "\n";
    emit(io::config_to_json(cf), g);
    if (!lf.specimens.empty() && cf.specimens.empty()) return kExitDegenerate;
    return kExitOk;
}

inference::FitOptions fit_options(const GlobalOpts& g) {
    inference::FitOptions o;
    o.restarts = g.restarts;
    o.seed = g.seed;
    return o;
}

int run_fit(const std::string& input, const std::string& group, const GlobalOpts& g) {
    io::ConfigFile cf = load_as_config(input);
    if (!group.empty()) cf.group = group;
    if (cf.specimens.size() < 2) {
        std::cerr << "error: need at least 2 specimens to fit\n";
        return kExitData;
    }
    const auto sample = io::to_sample(cf);
    const auto opts = fit_options(g);
    const auto fit = inference::fit_mle(sample, opts);
    if (!fit.converged)
        std::cerr << "note: simplex stopped at the iteration cap (converged=false)\n";
    emit(io::fit_to_json(fit, cf, opts), g);
    return kExitOk;
}

int run_test(const std::string& input_a, const std::string& input_b, const GlobalOpts& g) {
    const io::ConfigFile ca = load_as_config(input_a);
    const io::ConfigFile cb = load_as_config(input_b);
    if (ca.specimens.size() < 2 || cb.specimens.size() < 2) {
        std::cerr << "error: need at least 2 specimens per group\n";
        return kExitData;
    }
    inference::LRTResult r;
    try {
        r = inference::lrt_equal_means(io::to_sample(ca), io::to_sample(cb),
                                       fit_options(g));
    } catch (const NumericalError& e) {
        std::cerr << "fit failure: " << e.what() << "\n";
        return kExitFit;
    }
    std::printf("-2 log Lambda = %.4f on %d df, p = %.4g\n", r.statistic, r.df, r.p_value);
    std::printf("log-likelihoods: H1 = %.4f (groups %.4f + %.4f), H0 = %.4f\n",
                r.loglik_h1, r.fit_a.loglik, r.fit_b.loglik, r.loglik_h0);
    if (!g.out.empty()) io::write_json_file(io::lrt_to_json(r), g.out);
    return kExitOk;
}

struct DensityModel {
    std::string kind = "central";
    double sigma2 = 1.0;
    std::string sigma_path, mu_path, theta_path, generator = "gaussian";
};

int run_density(const std::string& input, const std::string& inline_v, int beta_flag,
                int n_flag, int k_flag, const DensityModel& dm, const std::string& grid,
                const GlobalOpts& g) {
    std::vector<io::ConfigSpecimen> points;
    AlgebraTag tag{1};
    int N = 0, K = 0;
    if (!input.empty()) {
        const io::ConfigFile cf = load_as_config(input);
        tag = cf.algebra;
        N = cf.N;
        K = cf.K;
        points = cf.specimens;
    } else {
        if (beta_flag == 0 || n_flag == 0 || k_flag == 0) {
            std::cerr << "error: inline points need --beta, --N and --K\n";
            return kExitUsage;
        }
        tag = AlgebraTag::of(beta_flag);
        N = n_flag;
        K = k_flag;
        if (!inline_v.empty()) {
            io::ConfigSpecimen s;
            s.id = "inline";
            s.coords.v = io::matrix_from_json(json::parse(inline_v), tag);
            points.push_back(std::move(s));
        }
        if (!grid.empty()) {
            if (tag.beta != 1 || K != 1 || N - K - 1 != 1) {
                std::cerr << "error: --grid is for the real q = 1, K = 1 case\n";
                return kExitUsage;
            }
            double lo, hi;
            int steps;
            if (std::sscanf(grid.c_str(), "%lf:%lf:%d", &lo, &hi, &steps) != 3 ||
                steps < 2) {
                std::cerr << "error: --grid expects lo:hi:steps\n";
                return kExitUsage;
            }
            for (int i = 0; i < steps; ++i) {
                io::ConfigSpecimen s;
                s.id = "g" + std::to_string(i);
                MatrixF v(1, 1, tag);
                v.at(0, 0) = Scalar(lo + (hi - lo) * i / (steps - 1));
                s.coords.v = v;
                points.push_back(std::move(s));
            }
        }
    }
    if (points.empty()) {
        std::cerr << "error: no evaluation points\n";
        return kExitData;
    }

    const int q = N - K - 1;
    const auto theta = load_theta(dm.theta_path, tag);
    std::optional<HermitianMatrix> sigma;
    if (!dm.sigma_path.empty())
        sigma = HermitianMatrix::from(
            io::matrix_from_json(io::read_json_file(dm.sigma_path), tag));
    std::optional<MatrixF> mu;
    if (!dm.mu_path.empty())
        mu = io::matrix_from_json(io::read_json_file(dm.mu_path), tag);

    shape::GeneratorFamily gen;
    const int d = tag.beta * K * (N - 1);
    if (dm.generator == "gaussian") {
        gen = shape::GeneratorFamily::gaussian(tag.beta, d);
    } else if (dm.generator.rfind("kotz:", 0) == 0) {
        gen = shape::GeneratorFamily::kotz(tag.beta, d, std::stoi(dm.generator.substr(5)));
    } else {
        std::cerr << "error: unknown generator '" << dm.generator << "'\n";
        return kExitUsage;
    }
    const auto trunc = truncation(g);

    auto evaluate = [&](const shape::ConfigurationCoordinates& cc) -> double {
        if (dm.kind == "central") {
            const HermitianMatrix s =
                sigma ? *sigma
                      : HermitianMatrix::trusted(dm.sigma2 *
                                                 MatrixF::identity(N - 1, tag));
            return shape::density_central(cc, s, tag.beta, N, K);
        }
        const MatrixF mu_m = mu ? *mu : MatrixF::zero(N - 1, K, tag);
        if (dm.kind == "gaussian") {
            const HermitianMatrix s =
                sigma ? *sigma
                      : HermitianMatrix::trusted(dm.sigma2 *
                                                 MatrixF::identity(N - 1, tag));
            return shape::density_gaussian(cc, mu_m, s, theta, trunc);
        }
        if (dm.kind == "isotropic")
            return shape::density_isotropic(cc, mu_m, theta, dm.sigma2, gen, trunc);
        if (dm.kind == "general") {
            const auto model = shape::EllipticalShapeModel::make(
                N, K, tag, mu_m, sigma, dm.sigma2, theta, gen);
            return shape::density_general(cc, model, trunc);
        }
        throw std::invalid_argument("unknown density kind " + dm.kind);
    };

    json rows = json::array();
    for (const auto& p : points) {
        json row{{"id", p.id}, {"v", io::matrix_to_json(p.coords.v)}};
        try {
            const double f = evaluate(p.coords);
            row["density"] = f;
            row["log_density"] = std::log(f);
            row["status"] = "ok";
        } catch (const std::exception& e) {
            row["status"] = std::string("error: ") + e.what();
        }
        rows.push_back(std::move(row));
    }
    if (g.format == "csv") {
        std::string out = "id,density,log_density,status\n";
        for (const auto& row : rows) {
            out += row["id"].get<std::string>();
            if (row.contains("density")) {
                char buf[64];
                std::snprintf(buf, sizeof buf, ",%.17g,%.17g",
                              row["density"].get<double>(),
                              row["log_density"].get<double>());
                out += buf;
            } else {
                out += ",,";
            }
            out += "," + row["status"].get<std::string>() + "\n";
        }
        std::cout << out;
        if (!g.out.empty()) {
            std::ofstream os(g.out);
            os << out;
        }
    } else {
        emit(json{{"model", dm.kind},
                  {"beta", tag.beta},
                  {"N", N},
                  {"K", K},
                  {"q", q},
                  {"rows", rows}},
             g);
    }
    return kExitOk;
}

int run_simulate(int beta, int N, int K, int n, double sigma, const std::string& mean_path,
                 const std::string& group, const GlobalOpts& g) {
    const AlgebraTag tag = AlgebraTag::of(beta);
    MatrixF mean = mean_path.empty()
                       ? default_mean_landmarks(N, K, tag)
                       : io::matrix_from_json(io::read_json_file(mean_path), tag);
    if (mean.rows() != N || mean.cols() != K) {
        std::cerr << "error: mean landmark matrix must be N x K\n";
        return kExitData;
    }
    mc::Rng rng(mc::RngSpec{"mt19937_64", g.seed});
    io::LandmarkFile lf;
    lf.algebra = tag;
    lf.N = N;
    lf.K = K;
    if (!group.empty()) lf.group = group;
    for (int i = 0; i < n; ++i) {
        io::Specimen s;
        char buf[16];
        std::snprintf(buf, sizeof buf, "s%03d", i + 1);
        s.id = buf;
        MatrixF noise = rng.gaussian_matrix(N, K, tag);
        noise *= sigma;
        s.landmarks = mean + noise;
        lf.specimens.push_back(std::move(s));
    }
    emit(io::landmark_to_json(lf), g);
    return kExitOk;
}

int run_validate(const std::string& suite, long budget, bool negative, const GlobalOpts& g) {
    const bool all = suite == "all";
    if (!all && suite != "stiefel" && suite != "cone" && suite != "jacobian" &&
        suite != "normalization" && suite != "invariance") {
        std::cerr << "error: unknown suite '" << suite << "'\n";
        return kExitUsage;
    }
    std::vector<mc::McReport> reports;
    std::vector<std::pair<std::string, bool>> extra;  // invariance outcomes
    const AlgebraTag r1 = AlgebraTag::real();
    const AlgebraTag c2 = AlgebraTag::complex();
    auto identity_h = [](int n, AlgebraTag tag) {
        return HermitianMatrix::trusted(MatrixF::identity(n, tag));
    };

    if (all || suite == "stiefel") {
        MatrixF x12(1, 2, r1);
        x12.at(0, 0) = Scalar(0.8);
        x12.at(0, 1) = Scalar(-0.5);
        reports.push_back(
            mc::check_stiefel_moment(x12, 1, budget, {"mt19937_64", g.seed}, negative));
        MatrixF x11(1, 1, r1);
        x11.at(0, 0) = Scalar(1.3);
        reports.push_back(
            mc::check_stiefel_moment(x11, 2, budget, {"mt19937_64", g.seed + 1}, negative));
        MatrixF xc(2, 2, c2);
        xc.at(0, 0) = Scalar(0.6, 0.2);
        xc.at(0, 1) = Scalar(-0.3, 0.4);
        xc.at(1, 0) = Scalar(0.1, -0.5);
        xc.at(1, 1) = Scalar(0.7, 0.1);
        reports.push_back(
            mc::check_stiefel_moment(xc, 2, budget, {"mt19937_64", g.seed + 2}, negative));
    }
    if (all || suite == "cone") {
        const auto h_exp = [](double t) { return std::exp(-t); };
        const auto h_gauss = [](double t) { return std::exp(-0.5 * t); };
        MatrixF z(1, 1, r1);
        z.at(0, 0) = Scalar(1.7);
        reports.push_back(mc::check_cone_integral(2.3, sf::Partition{},
                                                  HermitianMatrix::trusted(z),
                                                  identity_h(1, r1), h_exp, budget,
                                                  negative));
        MatrixF u(1, 1, r1);
        u.at(0, 0) = Scalar(0.6);
        reports.push_back(mc::check_cone_integral(
            1.9, sf::Partition::parse("1"), HermitianMatrix::trusted(z),
            HermitianMatrix::trusted(u), h_exp, budget, negative));
        MatrixF z2(2, 2, r1);
        z2.at(0, 0) = Scalar(1.9);
        z2.at(0, 1) = z2.at(1, 0) = Scalar(0.4);
        z2.at(1, 1) = Scalar(1.4);
        MatrixF u2(2, 2, r1);
        u2.at(0, 0) = Scalar(0.9);
        u2.at(0, 1) = u2.at(1, 0) = Scalar(-0.2);
        u2.at(1, 1) = Scalar(0.6);
        reports.push_back(mc::check_cone_integral(
            2.4, sf::Partition::parse("1"), HermitianMatrix::trusted(z2),
            HermitianMatrix::trusted(u2), h_gauss, 6 * budget, negative));
    }
    if (all || suite == "jacobian") {
        const double off = negative ? 1.0 : 0.0;
        reports.push_back(mc::check_jacobian(r1, 1, 1, budget, {"mt19937_64", g.seed}, off));
        reports.push_back(
            mc::check_jacobian(c2, 1, 1, budget, {"mt19937_64", g.seed + 1}, off));
        reports.push_back(
            mc::check_jacobian(r1, 2, 2, budget, {"mt19937_64", g.seed + 2}, off));
    }
    if (all || suite == "normalization") {
        const double scale = negative ? 1.1 : 1.0;
        struct Case {
            int beta, N, K;
        };
        for (const Case cs : {Case{1, 3, 1}, Case{2, 3, 1}, Case{1, 4, 1}, Case{1, 4, 2}}) {
            const AlgebraTag tag = AlgebraTag::of(cs.beta);
            const int q = cs.N - cs.K - 1;
            auto dens = [tag, cs](const shape::ConfigurationCoordinates& cc) {
                return shape::density_central(
                    cc, HermitianMatrix::trusted(MatrixF::identity(cs.N - 1, tag)),
                    tag.beta, cs.N, cs.K);
            };
            reports.push_back(mc::check_density_normalization(
                dens, tag, cs.K, q, MatrixF::zero(q, cs.K, tag), 1.2, budget,
                {"mt19937_64", g.seed + cs.beta * 16 + cs.N * 2 + cs.K}, scale));
            reports.back().check += "_central_b" + std::to_string(cs.beta) + "_N" +
                                    std::to_string(cs.N) + "_K" + std::to_string(cs.K);
        }
        MatrixF mu(3, 1, r1);
        mu.at(0, 0) = Scalar(0.4);
        mu.at(1, 0) = Scalar(-0.3);
        mu.at(2, 0) = Scalar(0.2);
        auto dens = [mu](const shape::ConfigurationCoordinates& cc) {
            return shape::density_gaussian(
                cc, mu,
                HermitianMatrix::trusted(MatrixF::identity(3, AlgebraTag::real())),
                std::nullopt);
        };
        reports.push_back(mc::check_density_normalization(
            dens, r1, 1, 2, MatrixF::zero(2, 1, r1), 1.5, budget,
            {"mt19937_64", g.seed + 99}, scale));
        reports.back().check += "_gaussian_b1_N4";
    }
    if (all || suite == "invariance") {
        const long n_group = std::min<long>(budget, 5000);
        std::optional<MatrixF> shift;
        if (negative) {
            MatrixF mu(3, 1, r1);
            mu.at(0, 0) = Scalar(1.5);
            mu.at(1, 0) = Scalar(0.5);
            mu.at(2, 0) = Scalar(-0.6);
            shift = mu;
        }
        const auto rep = mc::check_central_invariance(
            mc::EllipticalSampler::gaussian(), mc::EllipticalSampler::t_mixture(4), r1, 4,
            1, identity_h(3, r1), identity_h(1, r1), n_group, {"mt19937_64", g.seed},
            shift);
        extra.emplace_back("invariance_gaussian_vs_t4_b1_N4", rep.pass);
        json j{{"check", "invariance_gaussian_vs_t4_b1_N4"},
               {"pass", rep.pass},
               {"threshold", rep.threshold},
               {"statistics", rep.statistics},
               {"discarded_a", rep.discarded_a},
               {"discarded_b", rep.discarded_b},
               {"n", rep.n_per_group},
               {"seed", rep.seed}};
        std::cout << j.dump() << "\n";
    }

    bool failed = false;
    for (const auto& rep : reports) {
        std::cout << io::report_to_json(rep).dump() << "\n";
        if (std::abs(rep.z_score) > 4.0) failed = true;
    }
    for (const auto& [name, pass] : extra)
        if (!pass) failed = true;

    std::cerr << "---\n";
    for (const auto& rep : reports)
        std::fprintf(stderr, "%-44s z = %+9.2f  %s\n", rep.check.c_str(), rep.z_score,
                     std::abs(rep.z_score) > 4.0 ? "FAIL" : "ok");
    for (const auto& [name, pass] : extra)
        std::fprintf(stderr, "%-44s %s\n", name.c_str(), pass ? "ok" : "FAIL");
    return failed ? kExitValidation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "affine (configuration) shape analysis over the real normed division algebras"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    GlobalOpts g;
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--out", g.out, "write the primary JSON output to this path");
    app.add_option("--tol", g.tol, "series truncation tolerance")->check(CLI::PositiveNumber);
    app.add_option("--max-shell", g.max_shell, "series shell cap");
    app.add_option("--restarts", g.restarts, "optimizer restarts");
    app.add_option("--format", g.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* c_config = app.add_subcommand("config", "extract configuration coordinates");
    std::string in_path, theta_path;
    c_config->add_option("input", in_path, "landmark file (.json or .csv)")->required();
    c_config->add_option("--theta", theta_path, "K x K column covariance (JSON matrix file)");

    auto* c_fit = app.add_subcommand("fit", "maximum-likelihood fit of one group");
    std::string fit_path, fit_group;
    c_fit->add_option("input", fit_path, "config or landmark file")->required();
    c_fit->add_option("--group", fit_group, "override the group label");

    auto* c_test = app.add_subcommand("test", "two-group likelihood-ratio test");
    std::string test_a, test_b;
    c_test->add_option("a", test_a, "group A file")->required();
    c_test->add_option("b", test_b, "group B file")->required();

    auto* c_density = app.add_subcommand("density", "evaluate shape densities");
    std::string dens_input, dens_inline, dens_grid;
    int dens_beta = 0, dens_n = 0, dens_k = 0;
    DensityModel dm;
    c_density->add_option("input", dens_input, "config file with evaluation points");
    c_density->add_option("--v", dens_inline, "inline V matrix (JSON)");
    c_density->add_option("--grid", dens_grid, "lo:hi:steps grid (real q=1 case)");
    c_density->add_option("--beta", dens_beta, "algebra dimension for inline points");
    c_density->add_option("--N", dens_n, "landmark count for inline points");
    c_density->add_option("--K", dens_k, "coordinate dimension for inline points");
    c_density->add_option("--model", dm.kind, "central | gaussian | isotropic | general")
        ->check(CLI::IsMember({"central", "gaussian", "isotropic", "general"}));
    c_density->add_option("--sigma2", dm.sigma2, "isotropic scale");
    c_density->add_option("--sigma-file", dm.sigma_path, "(N-1)x(N-1) Sigma (JSON matrix)");
    c_density->add_option("--mu-file", dm.mu_path, "(N-1)xK reduced mean (JSON matrix)");
    c_density->add_option("--theta-file", dm.theta_path, "K x K Theta (JSON matrix)");
    c_density->add_option("--generator", dm.generator, "gaussian | kotz:<shape>");

    auto* c_sim = app.add_subcommand("simulate", "generate a synthetic landmark file");
    int sim_beta = 2, sim_n_landmarks = 13, sim_k = 1, sim_n = 14;
    double sim_sigma = 0.1;
    std::string sim_mean, sim_group;
    c_sim->add_option("--beta", sim_beta, "algebra dimension");
    c_sim->add_option("--N", sim_n_landmarks, "landmarks per specimen");
    c_sim->add_option("--K", sim_k, "coordinate dimension");
    c_sim->add_option("--n", sim_n, "number of specimens");
    c_sim->add_option("--sigma", sim_sigma, "landmark noise scale");
    c_sim->add_option("--mean-file", sim_mean, "N x K mean landmark matrix (JSON)");
    c_sim->add_option("--group", sim_group, "group label");

    auto* c_val = app.add_subcommand("validate", "run the Monte Carlo validation suites");
    std::string suite = "all";
    long budget = 100000;
    bool negative = false;
    c_val->add_option("suite", suite,
                      "stiefel | cone | jacobian | normalization | invariance | all");
    c_val->add_option("--budget", budget, "samples (or nodes) per check");
    c_val->add_flag("--negative-control", negative,
                    "run the deliberately-broken variants (they must fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (c_config->parsed()) return run_config(in_path, theta_path, g);
        if (c_fit->parsed()) return run_fit(fit_path, fit_group, g);
        if (c_test->parsed()) return run_test(test_a, test_b, g);
        if (c_density->parsed())
            return run_density(dens_input, dens_inline, dens_beta, dens_n, dens_k, dm,
                               dens_grid, g);
        if (c_sim->parsed())
            return run_simulate(sim_beta, sim_n_landmarks, sim_k, sim_n, sim_sigma,
                                sim_mean, sim_group, g);
        if (c_val->parsed()) return run_validate(suite, budget, negative, g);
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitFit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
