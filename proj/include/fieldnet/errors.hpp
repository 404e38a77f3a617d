#pragma once

#include <stdexcept>
#include <string>

namespace fieldnet {

// Input rows, schemas, or configuration violated a documented contract.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numeric routine failed to produce a usable result.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fieldnet
