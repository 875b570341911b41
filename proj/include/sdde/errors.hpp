#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sdde {

/// Invalid argument or parameter combination (bad μ, ε ≥ γ, Δ > 1, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation (Δ ∉ (0,1], log of a nonpositive error).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A time or step size that does not sit on the required grid.
class GridAlignmentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Truncation budget fell outside the domain of Φ⁻¹.
class ProfileError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Non-finite value produced inside a time step.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(std::int64_t step, const std::string& what)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}

    std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

}  // namespace sdde
