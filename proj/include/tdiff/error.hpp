#pragma once

#include <stdexcept>
#include <string>

namespace tdiff {

// Bad parameters or malformed input. The CLI maps this to exit status 2.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An operation was called on an object that does not satisfy its precondition.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A configured size cap would be exceeded.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tdiff
