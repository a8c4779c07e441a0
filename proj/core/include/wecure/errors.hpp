#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wecure {

using Index = std::ptrdiff_t;

// Bad arguments: wrong lengths, out-of-range parameters, even patch sizes.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Base for failures that come from the numerics rather than from the caller.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The k-th neighbour of a vertex sits at distance zero, so its bandwidth is zero.
class DegenerateBandwidth : public NumericalError {
public:
    DegenerateBandwidth(Index vertex, const std::string& what)
        : NumericalError(what), vertex_(vertex) {}
    Index vertex() const noexcept { return vertex_; }

private:
    Index vertex_;
};

// The linear system is singular, e.g. an unlabeled component has no labeled vertex.
class SingularSystem : public NumericalError {
public:
    SingularSystem(Index vertex, const std::string& what)
        : NumericalError(what), vertex_(vertex) {}
    // An offending vertex (global id), or -1 when not attributable to one.
    Index vertex() const noexcept { return vertex_; }

private:
    Index vertex_;
};

class NonConvergence : public NumericalError {
public:
    NonConvergence(double residual, Index iterations, const std::string& what)
        : NumericalError(what), residual_(residual), iterations_(iterations) {}
    double last_residual() const noexcept { return residual_; }
    Index iterations() const noexcept { return iterations_; }

private:
    double residual_;
    Index iterations_;
};

// Malformed input files. `offset` is a byte offset or a 1-based line number,
// depending on the format.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& what)
        : std::runtime_error(what), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnsupportedFormat : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wecure
