#pragma once

#include <stdexcept>
#include <string>

namespace hovmerge {

/// Bad parameter set or malformed configuration input.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Controller parameters put the two-vehicle linear system in the
/// underdamped (complex eigenvalue) regime, where the closed-form
/// peak-deceleration expressions do not apply.
class UnderdampedError : public std::runtime_error {
public:
    explicit UnderdampedError(const std::string& what) : std::runtime_error(what) {}
};

/// A bumper gap reached zero. This must never happen in a valid run;
/// it aborts the simulation and is treated as a test failure.
class CollisionError : public std::runtime_error {
public:
    explicit CollisionError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hovmerge
