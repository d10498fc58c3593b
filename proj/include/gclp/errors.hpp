#pragma once

#include <stdexcept>
#include <string>

namespace gclp {

// Malformed or inconsistent input data (files, graphs, feature tables).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Factorization failures, non-finite objectives and gradients.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gclp
