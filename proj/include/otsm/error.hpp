#pragma once

#include <stdexcept>
#include <string>

namespace otsm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class InfeasibleProjection : public Error {
 public:
  using Error::Error;
};

class MissingGroundTruth : public Error {
 public:
  MissingGroundTruth() : Error("ground truth is not available for this instance") {}
};

}  // namespace otsm
