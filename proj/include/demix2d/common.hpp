// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace demix2d {

inline constexpr const char* kVersion = "0.1.0";

using cplx = std::complex<double>;
inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Error taxonomy. Everything user-facing derives from Error so the CLI can
// map categories onto exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

// Separation constraint cannot be met within the rejection budget.
class InfeasibleSeparationError : public Error {
 public:
  explicit InfeasibleSeparationError(const std::string& what) : Error(what) {}
};

// Interpolation system singular / ill-conditioned beyond the threshold.
class ConstructionFailedError : public Error {
 public:
  explicit ConstructionFailedError(const std::string& what) : Error(what) {}
};

// Least-squares design matrix rank deficient.
class DegenerateFitError : public Error {
 public:
  explicit DegenerateFitError(const std::string& what) : Error(what) {}
};

}  // namespace demix2d
