#pragma once

#include <stdexcept>
#include <string>

namespace revgeo {

// Base of every error thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Bad input: invalid parameters, malformed samples, out-of-domain weights.
class ConfigError : public Error
{
public:
  using Error::Error;
};

// Point or coordinate outside the admissible chart.
class ChartError : public ConfigError
{
public:
  using ConfigError::ConfigError;
};

// Input that is well-formed but outside the regime an operation handles,
// e.g. weights in the vertex regime or a degenerate branch configuration.
class DomainError : public ConfigError
{
public:
  using ConfigError::ConfigError;
};

// Integration or iteration failed to produce an answer.
class NumericalError : public Error
{
public:
  using Error::Error;
};

class NoConvergence : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

// A geodesic left the chart while being integrated.
class ChartExit : public NumericalError
{
public:
  ChartExit(const std::string& what, double exit_arc_length)
    : NumericalError(what + " (exit at s=" + std::to_string(exit_arc_length) + ")")
    , exit_s(exit_arc_length)
  {
  }

  double exit_s;
};

} // namespace revgeo
