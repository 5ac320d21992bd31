#ifndef LOOPREG_ERRORS_HPP
#define LOOPREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace loopreg {

// Arguments this close to a non-positive integer count as sitting on a pole.
inline constexpr double pole_tolerance = 1e-8;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A gamma-type pole was hit. Carries which function refused, the pole
// location, and how far the offending argument was from it.
class PoleError : public Error {
public:
    PoleError(std::string function_, double location_, double distance_)
        : Error(function_ + ": argument within " + std::to_string(distance_) +
                " of pole at " + std::to_string(location_)),
          function(std::move(function_)), location(location_), distance(distance_) {}

    std::string function;
    double location;
    double distance;
};

// A series or quadrature ran out of budget with its remainder estimate
// still above tolerance. Nothing untrusted is ever returned instead.
class NonConvergence : public Error {
public:
    explicit NonConvergence(const std::string& msg) : Error(msg) {}
};

// Inputs outside an operation's stated domain.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// The requested object is a genuinely divergent integral; the failure is
// the documented behaviour (demo schemes outside their validity region).
class DivergentInput : public Error {
public:
    explicit DivergentInput(const std::string& msg) : Error(msg) {}
};

// An index-recurrence self-check failed beyond its tolerance.
class RecurrenceViolation : public Error {
public:
    explicit RecurrenceViolation(const std::string& msg) : Error(msg) {}
};

} // namespace loopreg

#endif
