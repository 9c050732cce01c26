#pragma once

#include <stdexcept>
#include <string>

namespace wiggly {

// Bad input data or parameters (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested scale is finer than the sample can represent.
class ResolutionError : public DataError {
public:
    using DataError::DataError;
};

// Internal invariant broken or construction cannot proceed (CLI exit code 3).
class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DataError(msg);
}

}  // namespace wiggly
