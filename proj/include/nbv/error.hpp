#pragma once

#include <stdexcept>
#include <string>

namespace nbv {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; the message names the line (or byte offset).
class FormatError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// Mixture fit requested with fewer samples than components.
class InfeasibleModelError : public Error {
public:
    using Error::Error;
};

/// No candidate lies in an admissible partition.
class ConstraintInfeasibleError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

}  // namespace nbv
