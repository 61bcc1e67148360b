#pragma once

#include <stdexcept>

namespace bouss {

// invalid configuration (CLI exit code 2)
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Picard nonconvergence, singular systems (CLI exit code 3)
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// refinement study threshold failure (CLI exit code 4)
struct study_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace bouss
