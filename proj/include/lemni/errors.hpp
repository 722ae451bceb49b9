#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lemni {

// Base class for numerical and domain failures raised by this library.
// Precondition violations (bad arguments) use std::invalid_argument.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Critical-point solver failed the residual tolerance within the iteration cap.
class SolverNoConvergence : public Error {
public:
    SolverNoConvergence(const std::string& msg, double worst)
        : Error(msg), worst_residual(worst) {}
    double worst_residual;
};

// Two distinct critical points share a log-modulus within 1e-12.
class DegenerateLadder : public Error {
public:
    DegenerateLadder(const std::string& msg, std::vector<double> tied)
        : Error(msg), tied_moduli(std::move(tied)) {}
    std::vector<double> tied_moduli;
};

// auto_window could not push the window boundary above the requested level.
class WindowOverflow : public Error {
public:
    using Error::Error;
};

// Ambiguous marching-squares cell at a level that sits on a critical modulus.
class SaddleAtLevel : public Error {
public:
    using Error::Error;
};

// Level requested inside the exclusion band around a critical modulus.
class LevelTooCritical : public Error {
public:
    using Error::Error;
};

// A sublevel root (or critical point) landed in no closed contour: grid too coarse.
class OrphanRoot : public Error {
public:
    OrphanRoot(const std::string& msg, int index) : Error(msg), point_index(index) {}
    int point_index;
};

// Some quadrature sample of the target fell below the zero threshold.
class ZeroOnContour : public Error {
public:
    using Error::Error;
};

// Winding quadrature did not settle near an integer.
class NonIntegerWinding : public Error {
public:
    NonIntegerWinding(const std::string& msg, double residual_)
        : Error(msg), residual(residual_) {}
    double residual;
};

// A closed polyline was required.
class OpenContour : public Error {
public:
    using Error::Error;
};

// cluster_experiment epsilon too large relative to the root separation.
class EpsilonTooLarge : public Error {
public:
    using Error::Error;
};

}  // namespace lemni
