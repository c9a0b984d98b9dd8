#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "ashape/algebra.hpp"

namespace ashape::mc {

struct RngSpec {
    std::string algorithm = "mt19937_64";
    std::uint64_t seed = 0;
};

// Deterministic stream on top of mt19937_64.  normal() is a hand-rolled
// polar transform rather than std::normal_distribution so the stream does
// not depend on the standard library implementation.
class Rng {
  public:
    explicit Rng(RngSpec spec);

    const RngSpec& spec() const { return spec_; }

    double uniform();                    // [0, 1)
    double normal();                     // N(0, 1)
    double chi2(int df);                 // sum of df squared normals
    algebra::Scalar gaussian_scalar(algebra::AlgebraTag tag);  // beta N(0,1) components
    algebra::MatrixF gaussian_matrix(int rows, int cols, algebra::AlgebraTag tag);

    std::uint64_t raw() { return engine_(); }

  private:
    RngSpec spec_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ashape::mc
