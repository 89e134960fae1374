#pragma once

#include <stdexcept>
#include <string>

#include "akvf/types.hpp"

namespace akvf {

// Invalid run configuration (unknown keys, bad values, unknown problem names).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file; carries the 1-based line number where parsing failed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    int line_number;
};

// The level-set gradient dropped below the nondegeneracy threshold.
class DegeneracyError : public std::runtime_error {
public:
    DegeneracyError(const Vec2& p, double norm, double c_min)
        : std::runtime_error("level-set gradient norm " + std::to_string(norm) +
                             " below threshold " + std::to_string(c_min) + " at (" +
                             std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")"),
          point(p), grad_norm(norm) {}
    Vec2 point;
    double grad_norm;
};

// Linear solver breakdown or residual tolerance violation.
class SolveError : public std::runtime_error {
public:
    explicit SolveError(const std::string& msg) : std::runtime_error(msg) {}
};

// A point could not be evaluated (outside the mesh beyond tolerance).
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& msg, const Vec2& p)
        : std::runtime_error(msg + " at (" + std::to_string(p.x()) + ", " +
                             std::to_string(p.y()) + ")"),
          point(p) {}
    Vec2 point;
};

} // namespace akvf
