#pragma once

#include <stdexcept>
#include <string>

namespace bsflow {

/// Interface self-intersection, degenerate segments, failed point location,
/// refinement that does not terminate. Maps to CLI exit code 2.
class GeometricError : public std::runtime_error {
public:
    explicit GeometricError(const std::string& what) : std::runtime_error(what) {}
};

/// Singular factorization or residual above tolerance. Maps to CLI exit code 3.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bsflow
