#pragma once

#include <stdexcept>
#include <string>

namespace gicdc {

// Base class for all failures raised by this library. Subclasses mark the
// pipeline stage so callers (the CLI in particular) can map them to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
public:
    using Error::Error;
};

class BuildError : public Error {
public:
    using Error::Error;
};

class CoupleError : public Error {
public:
    using Error::Error;
};

// Raised for singular or ill-conditioned systems; carries the offending
// node descriptions when the cause is an isolated (zero-degree) node.
class SolveError : public Error {
public:
    using Error::Error;
};

class ScenarioError : public Error {
public:
    using Error::Error;
};

} // namespace gicdc
