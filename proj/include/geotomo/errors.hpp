#ifndef GEOTOMO_ERRORS_HPP
#define GEOTOMO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace geotomo {

// bad parameters or unsupported combinations (CLI exit code 3)
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// argument outside an operation's domain
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// non-finite values, overflow
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// fiber extraction / reconstruction failures, multi-component fibers where one is required
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// near-dependent point configuration; callers resample
struct DegenerateSample : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace geotomo

#endif
