#pragma once

#include <stdexcept>

namespace atwr {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct NullSpaceTooSmall : Error {
  using Error::Error;
};

struct RankDeficient : Error {
  using Error::Error;
};

struct IllConditioned : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace atwr
