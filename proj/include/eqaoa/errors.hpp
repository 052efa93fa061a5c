#pragma once

#include <stdexcept>
#include <string>

namespace eqaoa {

/// Invalid argument or configuration value.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Random graph generation exhausted its retry budget.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sizes of two objects that must agree do not (state vs diagonal, bits vs nodes).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed, corrupt or version-mismatched wire packet or checkpoint.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation called in a state that forbids it (e.g. checkpoint mid-generation).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace eqaoa
