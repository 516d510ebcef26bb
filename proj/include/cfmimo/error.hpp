#pragma once

#include <stdexcept>
#include <string>

namespace cfmimo {

/// Raised for out-of-range arguments and malformed matrices.
class InvalidInput : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised while parsing or validating a simulation/experiment configuration.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// An enumeration or iteration guard was hit. `guard` names the limit that fired.
class BudgetExceeded : public std::runtime_error
{
  public:
    BudgetExceeded(std::string guard, const std::string& what)
        : std::runtime_error(what), guard_(std::move(guard))
    {
    }

    const std::string& guard() const noexcept { return guard_; }

  private:
    std::string guard_;
};

} // namespace cfmimo
