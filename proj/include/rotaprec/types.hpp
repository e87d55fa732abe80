#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace rotaprec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Precondition or argument problems (bad shapes, indices, non-finite input).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A documented contract on an input matrix does not hold (symmetry,
// orthonormality).
class ContractViolation : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

// An iterative routine failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace rotaprec
