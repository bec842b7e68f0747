#pragma once

#include <stdexcept>
#include <string>

namespace cefsim {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input files (CSV, config).
class ParseError : public Error {
public:
    using Error::Error;
};

// Well-formed input whose content violates a data invariant.
class DataError : public Error {
public:
    using Error::Error;
};

// Inconsistent or missing configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace cefsim
