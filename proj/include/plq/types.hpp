#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace plq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Base class for every error thrown by this library. CLI maps these to exit
// code 1 (solver/assumption failures); config/schema problems use ConfigError
// which maps to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

class ModelError : public Error {
public:
    explicit ModelError(const std::string& what) : Error(what) {}
};

class NormalizationError : public Error {
public:
    NormalizationError(const std::string& what, double singular_value)
        : Error(what), singular_value(singular_value) {}
    double singular_value;
};

class NoStabilizingSolution : public Error {
public:
    explicit NoStabilizingSolution(const std::string& what) : Error(what) {}
};

class ResidualTooLarge : public Error {
public:
    explicit ResidualTooLarge(const std::string& what) : Error(what) {}
};

class ThetaNotHurwitz : public Error {
public:
    explicit ThetaNotHurwitz(const std::string& what) : Error(what) {}
};

class SingularSystem : public Error {
public:
    explicit SingularSystem(const std::string& what) : Error(what) {}
};

class StepSizeTooCoarse : public Error {
public:
    explicit StepSizeTooCoarse(const std::string& what) : Error(what) {}
};

class Theta1Singular : public Error {
public:
    explicit Theta1Singular(const std::string& what) : Error(what) {}
};

class AssumptionViolatedAtIterate : public Error {
public:
    explicit AssumptionViolatedAtIterate(const std::string& what) : Error(what) {}
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& what) : Error(what) {}
};

class UnstablePath : public Error {
public:
    explicit UnstablePath(const std::string& what) : Error(what) {}
};

// Largest real part over the spectrum. Used for every Hurwitz decision.
double max_real_eigenvalue(const Matrix& m);

// Hurwitz = all eigenvalues strictly in the left half plane (tiny margin
// scaled by the matrix norm absorbs round-off).
bool is_hurwitz(const Matrix& m);

// Smallest eigenvalue of a symmetric matrix (input symmetrized first).
double min_symmetric_eigenvalue(const Matrix& m);

}  // namespace plq
