#include "ashape/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ashape::io {

using algebra::Scalar;

nlohmann::json matrix_to_json(const MatrixF& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) {
            nlohmann::json comps = nlohmann::json::array();
            for (int c = 0; c < m.algebra().beta; ++c) comps.push_back(m.at(i, j).c[c]);
            row.push_back(std::move(comps));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixF matrix_from_json(const nlohmann::json& j, AlgebraTag tag) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw std::invalid_argument("matrix_from_json: expected an array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    MatrixF m(rows, cols, tag);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols)
            throw std::invalid_argument("matrix_from_json: ragged rows");
        for (int c = 0; c < cols; ++c) {
            const auto& cell = j[i][c];
            Scalar s;
            if (cell.is_number()) {
                s.c[0] = cell.get<double>();
            } else {
                if (static_cast<int>(cell.size()) > tag.beta)
                    throw std::invalid_argument(
                        "matrix_from_json: entry has more components than beta");
                for (size_t k = 0; k < cell.size(); ++k) s.c[k] = cell[k].get<double>();
            }
            m.at(i, c) = s;
        }
    }
    return m;
}

nlohmann::json landmark_to_json(const LandmarkFile& f) {
    nlohmann::json j{{"beta", f.algebra.beta}, {"N", f.N}, {"K", f.K}};
    if (f.group) j["group"] = *f.group;
    nlohmann::json specimens = nlohmann::json::array();
    for (const auto& s : f.specimens)
        specimens.push_back({{"id", s.id}, {"landmarks", matrix_to_json(s.landmarks)}});
    j["specimens"] = std::move(specimens);
    return j;
}

LandmarkFile landmark_from_json(const nlohmann::json& j) {
    LandmarkFile f;
    f.algebra = AlgebraTag::of(j.at("beta").get<int>());
    f.N = j.at("N").get<int>();
    f.K = j.at("K").get<int>();
    if (f.N < 3 || f.K < 1 || f.N < f.K + 2)
        throw std::invalid_argument("landmark file: need N >= K + 2");
    if (j.contains("group")) f.group = j["group"].get<std::string>();
    std::set<std::string> ids;
    for (const auto& sj : j.at("specimens")) {
        Specimen s;
        s.id = sj.at("id").get<std::string>();
        if (!ids.insert(s.id).second)
            throw std::invalid_argument("landmark file: duplicate specimen id " + s.id);
        s.landmarks = matrix_from_json(sj.at("landmarks"), f.algebra);
        if (s.landmarks.rows() != f.N || s.landmarks.cols() != f.K)
            throw std::invalid_argument("landmark file: specimen " + s.id +
                                        " is not N x K");
        f.specimens.push_back(std::move(s));
    }
    return f;
}

LandmarkFile landmark_from_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    LandmarkFile f;
    f.algebra = AlgebraTag::complex();
    f.K = 1;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) fields.push_back(tok);
        if (fields.empty()) continue;
        std::string id;
        size_t first = 0;
        try {
            std::stod(fields[0]);
        } catch (...) {
            id = fields[0];
            first = 1;
        }
        if (lineno == 1 && first == 1) {
            // header row if the remaining fields are not numeric either
            bool header = false;
            try {
                std::stod(fields.size() > 1 ? fields[1] : "x");
            } catch (...) {
                header = true;
            }
            if (header) continue;
        }
        const size_t ncoord = fields.size() - first;
        if (ncoord % 2 != 0)
            throw std::invalid_argument("landmark csv: odd coordinate count on line " +
                                        std::to_string(lineno));
        const int n_points = static_cast<int>(ncoord / 2);
        if (f.N == 0) f.N = n_points;
        if (n_points != f.N)
            throw std::invalid_argument("landmark csv: inconsistent landmark count on line " +
                                        std::to_string(lineno));
        Specimen s;
        s.id = id.empty() ? "s" + std::to_string(f.specimens.size() + 1) : id;
        s.landmarks = MatrixF(f.N, 1, f.algebra);
        for (int p = 0; p < f.N; ++p)
            s.landmarks.at(p, 0) = Scalar(std::stod(fields[first + 2 * p]),
                                          std::stod(fields[first + 2 * p + 1]));
        f.specimens.push_back(std::move(s));
    }
    if (f.N < 3) throw std::invalid_argument("landmark csv: need at least 3 landmarks");
    return f;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    is >> j;
    return j;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << j.dump(2) << "\n";
}

LandmarkFile read_landmark_file(const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
        return landmark_from_csv(path);
    return landmark_from_json(read_json_file(path));
}

void write_landmark_file(const LandmarkFile& f, const std::string& path) {
    write_json_file(landmark_to_json(f), path);
}

nlohmann::json config_to_json(const ConfigFile& f) {
    nlohmann::json j{{"beta", f.algebra.beta},
                     {"N", f.N},
                     {"K", f.K},
                     {"q", f.N - f.K - 1}};
    if (f.group) j["group"] = *f.group;
    nlohmann::json specimens = nlohmann::json::array();
    for (const auto& s : f.specimens)
        specimens.push_back({{"id", s.id}, {"v", matrix_to_json(s.coords.v)}});
    j["specimens"] = std::move(specimens);
    j["degenerate"] = f.degenerate;
    return j;
}

ConfigFile config_from_json(const nlohmann::json& j) {
    ConfigFile f;
    f.algebra = AlgebraTag::of(j.at("beta").get<int>());
    f.N = j.at("N").get<int>();
    f.K = j.at("K").get<int>();
    if (j.contains("group")) f.group = j["group"].get<std::string>();
    for (const auto& sj : j.at("specimens")) {
        ConfigSpecimen s;
        s.id = sj.at("id").get<std::string>();
        s.coords.v = matrix_from_json(sj.at("v"), f.algebra);
        if (s.coords.q() != f.N - f.K - 1 || s.coords.K() != f.K)
            throw std::invalid_argument("config file: specimen " + s.id + " is not q x K");
        f.specimens.push_back(std::move(s));
    }
    if (j.contains("degenerate"))
        f.degenerate = j["degenerate"].get<std::vector<std::string>>();
    return f;
}

ConfigFile read_config_file(const std::string& path) {
    return config_from_json(read_json_file(path));
}

void write_config_file(const ConfigFile& f, const std::string& path) {
    write_json_file(config_to_json(f), path);
}

ConfigFile extract_configurations(const LandmarkFile& f,
                                  const std::optional<algebra::HermitianMatrix>& theta) {
    ConfigFile out;
    out.algebra = f.algebra;
    out.N = f.N;
    out.K = f.K;
    out.group = f.group;
    for (const auto& s : f.specimens) {
        try {
            ConfigSpecimen cs;
            cs.id = s.id;
            cs.coords = theta ? shape::configuration_coords(s.landmarks, *theta)
                              : shape::configuration_coords(s.landmarks);
            out.specimens.push_back(std::move(cs));
        } catch (const SingularMatrix&) {
            out.degenerate.push_back(s.id);
        }
    }
    return out;
}

inference::ShapeSample to_sample(const ConfigFile& f) {
    std::vector<shape::ConfigurationCoordinates> coords;
    coords.reserve(f.specimens.size());
    for (const auto& s : f.specimens) coords.push_back(s.coords);
    return inference::ShapeSample::make(f.group.value_or(""), std::move(coords), f.algebra,
                                        f.N, f.K);
}

nlohmann::json fit_to_json(const inference::FitResult& fit, const ConfigFile& source,
                           const inference::FitOptions& options) {
    return nlohmann::json{{"group", source.group.value_or("")},
                          {"beta", source.algebra.beta},
                          {"N", source.N},
                          {"K", source.K},
                          {"n_specimens", source.specimens.size()},
                          {"mu_hat", matrix_to_json(fit.mu_hat)},
                          {"sigma2_hat", fit.sigma2_hat},
                          {"loglik", fit.loglik},
                          {"iterations", fit.iterations},
                          {"evaluations", fit.evaluations},
                          {"converged", fit.converged},
                          {"best_restart", fit.best_restart},
                          {"final_f_spread", fit.final_f_spread},
                          {"restarts", options.restarts},
                          {"seed", options.seed}};
}

nlohmann::json lrt_to_json(const inference::LRTResult& r) {
    return nlohmann::json{{"statistic", r.statistic},
                          {"df", r.df},
                          {"p_value", r.p_value},
                          {"loglik_h1", r.loglik_h1},
                          {"loglik_h0", r.loglik_h0},
                          {"sigma2_a", r.fit_a.sigma2_hat},
                          {"sigma2_b", r.fit_b.sigma2_hat},
                          {"mu_hat_a", matrix_to_json(r.fit_a.mu_hat)},
                          {"mu_hat_b", matrix_to_json(r.fit_b.mu_hat)},
                          {"converged_a", r.fit_a.converged},
                          {"converged_b", r.fit_b.converged},
                          {"converged_pooled", r.fit_pooled.converged}};
}

nlohmann::json report_to_json(const mc::McReport& r) {
    return nlohmann::json{{"check", r.check},   {"params", r.params},
                          {"estimate", r.estimate}, {"std_error", r.std_error},
                          {"target", r.target},     {"z_score", r.z_score},
                          {"n", r.n},               {"seed", r.seed}};
}

}  // namespace ashape::io
