#pragma once

#include <stdexcept>
#include <string>

namespace nhim {

// Interval operation outside its domain (division by an interval holding 0,
// sqrt of a negative interval, NaN endpoints).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// inverse_enclosure could not certify the inverse.
class NotInvertibleError : public std::runtime_error {
public:
    NotInvertibleError() : std::runtime_error("not invertible as enclosed") {}
    explicit NotInvertibleError(const std::string& what) : std::runtime_error(what) {}
};

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Two points do not share a chart of the torus.
class ChartError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failure inside the floating-point manifold constructions. The message names
// the node or orbit step that failed.
class ManifoldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularJetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nhim
