#ifndef WITHINHOST_ERRORS_HPP
#define WITHINHOST_ERRORS_HPP

#include <stdexcept>

namespace withinhost {

/// Invalid configuration, parameters, or input data. CLI exit code 2.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure during integration or optimization (blow-up,
/// non-finite state). CLI exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace withinhost

#endif
