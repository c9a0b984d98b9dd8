#pragma once

#include <stdexcept>
#include <string>

namespace ashape {

// Contract violations (bad dimensions, wrong algebra, domain errors) throw
// std::invalid_argument.  Numerical failures use the hierarchy below so
// callers can distinguish "your input is wrong" from "the computation broke".

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct NotHermitian : NumericalError {
    explicit NotHermitian(const std::string& what) : NumericalError(what) {}
};

struct NotPositiveDefinite : NumericalError {
    explicit NotPositiveDefinite(const std::string& what) : NumericalError(what) {}
};

struct SingularMatrix : NumericalError {
    explicit SingularMatrix(const std::string& what) : NumericalError(what) {}
};

struct ConvergenceError : NumericalError {
    explicit ConvergenceError(const std::string& what) : NumericalError(what) {}
};

struct PoleError : NumericalError {
    explicit PoleError(const std::string& what) : NumericalError(what) {}
};

}  // namespace ashape
