#pragma once

#include <stdexcept>
#include <string>

namespace kempe {

// Structural problems: dangling joint references, unresolved labels.
struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string& m) : std::runtime_error(m) {}
};

// Bad call arguments (empty paths, invalid gadget parameters).
struct ArgumentError : std::runtime_error {
    explicit ArgumentError(const std::string& m) : std::runtime_error(m) {}
};

// Input outside an admissible range (driver values, gadget inputs).
struct RangeError : std::runtime_error {
    explicit RangeError(const std::string& m) : std::runtime_error(m) {}
};

// No real solution for internal joints; signals an inconsistent construction.
struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& m) : std::runtime_error(m) {}
};

// Violated operation precondition (inconsistent placement, missing data).
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& m) : std::runtime_error(m) {}
};

// Uniform-approximation target not reachable within the degree cap.
struct ApproximationError : std::runtime_error {
    ApproximationError(const std::string& m, double achieved)
        : std::runtime_error(m), best_bound(achieved) {}
    double best_bound;
};

// Radius search exhausted without a certified wedge.
struct NoCertificateError : std::runtime_error {
    NoCertificateError(const std::string& m, double margin)
        : std::runtime_error(m), best_margin(margin) {}
    double best_margin;
};

// Newton projection failed to converge; flags a compiler/gadget inconsistency.
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& m) : std::runtime_error(m) {}
};

// Malformed input text; keeps the offending position.
struct ParseError : std::runtime_error {
    ParseError(const std::string& m, int line_, int column_)
        : std::runtime_error(m), line(line_), column(column_) {}
    int line;
    int column;
};

}  // namespace kempe
