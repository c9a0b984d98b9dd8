#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ashape/inference.hpp"
#include "ashape/mc.hpp"
#include "ashape/shape.hpp"

namespace ashape::io {

using algebra::AlgebraTag;
using algebra::MatrixF;

struct Specimen {
    std::string id;
    MatrixF landmarks;  // N x K
};

struct LandmarkFile {
    AlgebraTag algebra{1};
    int N = 0;
    int K = 0;
    std::optional<std::string> group;
    std::vector<Specimen> specimens;
};

struct ConfigSpecimen {
    std::string id;
    shape::ConfigurationCoordinates coords;
};

struct ConfigFile {
    AlgebraTag algebra{1};
    int N = 0;
    int K = 0;
    std::optional<std::string> group;
    std::vector<ConfigSpecimen> specimens;
    std::vector<std::string> degenerate;  // ids of specimens with singular Y1
};

// matrices serialize as rows x cols x beta-component arrays
nlohmann::json matrix_to_json(const MatrixF& m);
MatrixF matrix_from_json(const nlohmann::json& j, AlgebraTag tag);

nlohmann::json landmark_to_json(const LandmarkFile& f);
LandmarkFile landmark_from_json(const nlohmann::json& j);
LandmarkFile read_landmark_file(const std::string& path);  // .json or .csv
void write_landmark_file(const LandmarkFile& f, const std::string& path);

// CSV rows are specimens: optional leading id field, then landmark
// coordinates interleaved by component; planar data loads as beta = 2, K = 1.
LandmarkFile landmark_from_csv(const std::string& path);

nlohmann::json config_to_json(const ConfigFile& f);
ConfigFile config_from_json(const nlohmann::json& j);
ConfigFile read_config_file(const std::string& path);
void write_config_file(const ConfigFile& f, const std::string& path);

// configuration extraction over a whole file; degenerate specimens are
// recorded, not fatal
ConfigFile extract_configurations(const LandmarkFile& f,
                                  const std::optional<algebra::HermitianMatrix>& theta);

inference::ShapeSample to_sample(const ConfigFile& f);

nlohmann::json fit_to_json(const inference::FitResult& fit, const ConfigFile& source,
                           const inference::FitOptions& options);
nlohmann::json lrt_to_json(const inference::LRTResult& r);
nlohmann::json report_to_json(const mc::McReport& r);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const nlohmann::json& j, const std::string& path);

}  // namespace ashape::io
