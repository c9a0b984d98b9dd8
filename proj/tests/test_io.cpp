#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "ashape/io.hpp"
#include "test_helpers.hpp"

using namespace ashape::io;
using ashape::algebra::AlgebraTag;
using ashape::algebra::MatrixF;
using ashape::algebra::Scalar;
using ashape::mc::Rng;
using ashape::mc::RngSpec;
using testutil::matrix_diff;

namespace {

LandmarkFile small_file(Rng& rng, int n_specimens) {
    LandmarkFile lf;
    lf.algebra = AlgebraTag::complex();
    lf.N = 5;
    lf.K = 1;
    lf.group = "g1";
    for (int i = 0; i < n_specimens; ++i) {
        Specimen s;
        s.id = "s" + std::to_string(i + 1);
        s.landmarks = rng.gaussian_matrix(5, 1, lf.algebra);
        lf.specimens.push_back(std::move(s));
    }
    return lf;
}

}  // namespace

TEST_CASE("landmark json round trip") {
    Rng rng(RngSpec{"mt19937_64", 401});
    const LandmarkFile lf = small_file(rng, 3);
    const auto j = landmark_to_json(lf);
    const LandmarkFile back = landmark_from_json(j);
    CHECK(back.N == 5);
    CHECK(back.K == 1);
    CHECK(back.algebra.beta == 2);
    CHECK(back.group.value() == "g1");
    REQUIRE(back.specimens.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(back.specimens[i].id == lf.specimens[i].id);
        CHECK(matrix_diff(back.specimens[i].landmarks, lf.specimens[i].landmarks) == 0.0);
    }
}

TEST_CASE("duplicate specimen ids are rejected") {
    Rng rng(RngSpec{"mt19937_64", 403});
    LandmarkFile lf = small_file(rng, 2);
    lf.specimens[1].id = lf.specimens[0].id;
    CHECK_THROWS_AS(landmark_from_json(landmark_to_json(lf)), std::invalid_argument);
}

TEST_CASE("csv ingestion: planar data as beta 2, K 1") {
    const std::string path = "io_test.csv";
    {
        std::ofstream os(path);
        os << "id,x1,y1,x2,y2,x3,y3\n";
        os << "a,0.0,0.0,1.0,0.0,0.4,1.2\n";
        os << "b,0.1,-0.2,1.1,0.1,0.5,1.0\n";
        os << "0.2,0.0,1.3,0.2,0.3,1.4\n";  // no id: one is generated
    }
    const LandmarkFile lf = landmark_from_csv(path);
    CHECK(lf.algebra.beta == 2);
    CHECK(lf.N == 3);
    CHECK(lf.K == 1);
    REQUIRE(lf.specimens.size() == 3);
    CHECK(lf.specimens[0].id == "a");
    CHECK(lf.specimens[2].id == "s3");
    CHECK(lf.specimens[0].landmarks.at(2, 0).c[1] == doctest::Approx(1.2));
    std::remove(path.c_str());
}

TEST_CASE("configuration extraction records degenerate specimens") {
    Rng rng(RngSpec{"mt19937_64", 405});
    LandmarkFile lf = small_file(rng, 2);
    Specimen bad;
    bad.id = "flat";
    bad.landmarks = MatrixF(5, 1, lf.algebra);
    for (int i = 0; i < 5; ++i) bad.landmarks.at(i, 0) = Scalar(1.0, 2.0);
    lf.specimens.push_back(std::move(bad));

    const ConfigFile cf = extract_configurations(lf, std::nullopt);
    CHECK(cf.specimens.size() == 2);
    REQUIRE(cf.degenerate.size() == 1);
    CHECK(cf.degenerate[0] == "flat");

    const auto j = config_to_json(cf);
    const ConfigFile back = config_from_json(j);
    CHECK(back.specimens.size() == 2);
    CHECK(back.degenerate == cf.degenerate);
    CHECK(matrix_diff(back.specimens[0].coords.v, cf.specimens[0].coords.v) == 0.0);

    const auto sample = to_sample(cf);
    CHECK(sample.specimens.size() == 2);
    CHECK(sample.N == 5);
}

TEST_CASE("a sheared, translated copy yields identical configurations") {
    Rng rng(RngSpec{"mt19937_64", 407});
    const LandmarkFile lf = small_file(rng, 3);
    LandmarkFile moved = lf;
    const Scalar e(0.7, -1.1);  // invertible complex scalar, K = 1
    const Scalar shift(5.0, -2.0);
    for (auto& s : moved.specimens)
        for (int i = 0; i < s.landmarks.rows(); ++i)
            s.landmarks.at(i, 0) = s.landmarks.at(i, 0) * e + shift;

    const ConfigFile a = extract_configurations(lf, std::nullopt);
    const ConfigFile b = extract_configurations(moved, std::nullopt);
    REQUIRE(a.specimens.size() == b.specimens.size());
    for (size_t i = 0; i < a.specimens.size(); ++i)
        CHECK(matrix_diff(a.specimens[i].coords.v, b.specimens[i].coords.v) < 1e-9);
}

TEST_CASE("matrix json accepts bare reals") {
    const auto j = nlohmann::json::parse("[[1.5, 2.0], [3.0, -1.0]]");
    const MatrixF m = matrix_from_json(j, AlgebraTag::real());
    CHECK(m.rows() == 2);
    CHECK(m.at(0, 1).re() == doctest::Approx(2.0));
    CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse("[[[1,2,3]]]"),
                                     AlgebraTag::complex()),
                    std::invalid_argument);
}
