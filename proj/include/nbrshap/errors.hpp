#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nbrshap {

// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Structural problems: mismatched schemas, wrong arities, bad arguments.
class SchemaError : public Error {
public:
    using Error::Error;
};

// All kernel weights underflowed to zero; carries the smallest observed distance.
class DegenerateNeighbourhood : public Error {
public:
    DegenerateNeighbourhood(double smallest_distance, double sigma)
        : Error("all kernel weights underflowed to zero (smallest distance " +
                std::to_string(smallest_distance) + ", sigma " + std::to_string(sigma) + ")"),
          smallest_distance(smallest_distance) {}
    double smallest_distance;
};

// Exact enumeration requested for a feature count beyond the 2^M guard.
class ExactModeUnavailable : public Error {
public:
    explicit ExactModeUnavailable(std::size_t m)
        : Error("exact enumeration unavailable for M=" + std::to_string(m) +
                " (limit M<=20)") {}
};

// The empty and full coalitions are equality constraints, not regression rows.
class AnchorsAreConstraints : public Error {
public:
    AnchorsAreConstraints()
        : Error("coalition size 0 or M has no finite regression weight; "
                "anchors enter as constraints") {}
};

class VarianceUnavailable : public Error {
public:
    using Error::Error;
};

// Black-box evaluation failed; row is the offending index within the batch.
class BlackBoxError : public Error {
public:
    BlackBoxError(const std::string& what, std::size_t row)
        : Error(what + " (row " + std::to_string(row) + ")"), row(row) {}
    std::size_t row;
};

// Subprocess adapter protocol violations.
class ProtocolError : public BlackBoxError {
public:
    using BlackBoxError::BlackBoxError;
};

class MalformedResponse : public ProtocolError {
public:
    MalformedResponse(const std::string& token, std::size_t line)
        : ProtocolError("malformed adapter response token '" + token + "'", line) {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace nbrshap
