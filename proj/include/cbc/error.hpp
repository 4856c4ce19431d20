#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cbc {

/// Input that cannot be parsed. `locator` points at the offending row/field.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string locator, const std::string& message)
        : std::runtime_error(locator.empty() ? message : locator + ": " + message),
          locator_(std::move(locator)) {}

    const std::string& locator() const noexcept { return locator_; }

private:
    std::string locator_;
};

/// A precondition on values was violated (rating out of bounds, k > n, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Greedy constrained assignment found no admissible cluster for a must-link
/// component. This does not prove the constraint set unsatisfiable.
class AssignmentDeadlock : public std::runtime_error {
public:
    AssignmentDeadlock(std::vector<std::string> component, const std::string& message)
        : std::runtime_error(message), component_(std::move(component)) {}

    const std::vector<std::string>& component() const noexcept { return component_; }

private:
    std::vector<std::string> component_;
};

/// The brute-force oracle refuses inputs beyond its enumeration budget.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

}  // namespace cbc
