#pragma once

#include <stdexcept>
#include <string>

namespace eulerlab {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidGrid : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct GridMismatch : Error {
  using Error::Error;
};
struct NonPhysicalDensity : Error {
  using Error::Error;
};
struct NegativeTime : Error {
  using Error::Error;
};
struct ZeroMode : Error {
  using Error::Error;
};
struct BlowUp : Error {
  using Error::Error;
};
struct TimeOutOfRange : Error {
  using Error::Error;
};
struct FrameSolveError : Error {
  using Error::Error;
};
struct NonPositiveSeries : Error {
  using Error::Error;
};
struct ZeroGradient : Error {
  using Error::Error;
};
struct DegenerateDenominator : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace eulerlab
