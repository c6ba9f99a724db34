#pragma once

#include <stdexcept>
#include <string>

namespace ewd {

struct SingularMatrix : std::runtime_error {
    explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Parameter vector lies outside the feasible set of the model (e.g. the
// category ordering of a cumulative-logit model is violated at some x).
struct InfeasibleParameters : std::runtime_error {
    explicit InfeasibleParameters(const std::string& what) : std::runtime_error(what) {}
};

struct AllDrawsInfeasible : std::runtime_error {
    explicit AllDrawsInfeasible(const std::string& what) : std::runtime_error(what) {}
};

// Lift-one profile evaluates to zero everywhere: the lifted point cannot
// rescue a singular design.
struct DegenerateProfile : std::runtime_error {
    explicit DegenerateProfile(const std::string& what) : std::runtime_error(what) {}
};

struct SingularStart : std::runtime_error {
    explicit SingularStart(const std::string& what) : std::runtime_error(what) {}
};

struct ReferenceSingular : std::runtime_error {
    explicit ReferenceSingular(const std::string& what) : std::runtime_error(what) {}
};

struct AllPointsDropped : std::runtime_error {
    explicit AllPointsDropped(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::invalid_argument {
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Config / file syntax error carrying a source location.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line, int column)
        : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"),
          line(line),
          column(column) {}
    int line;
    int column;
};

}  // namespace ewd
