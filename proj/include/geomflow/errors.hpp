#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geomflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateEdge : public Error {
 public:
  DegenerateEdge(std::size_t edge, double length, double threshold);
  std::size_t edge() const noexcept { return edge_; }

 private:
  std::size_t edge_;
};

class SizeMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SamplingFailure : public Error {
 public:
  using Error::Error;
};

class SingularNormalMatrix : public Error {
 public:
  SingularNormalMatrix(double condition_estimate);
  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};

class SingularSystem : public Error {
 public:
  SingularSystem(const std::string& what, double condition_estimate);
  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};

class WellPosednessViolation : public Error {
 public:
  WellPosednessViolation(int condition, const std::string& detail);
  /// 1: edge vectors do not span the plane, 2: degenerate vertex.
  int condition() const noexcept { return condition_; }

 private:
  int condition_;
};

class ClippingFailure : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace geomflow
