#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace levy {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model or configuration parameter is outside its domain.
class ParameterError : public Error {
 public:
  ParameterError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class EmptySampleError : public Error {
 public:
  EmptySampleError() : Error("sample is empty") {}
};

class UnsupportedOrderError : public Error {
 public:
  using Error::Error;
};

/// The frequency grid does not cover (or does not align with) a requested band.
class GridCoverageError : public Error {
 public:
  using Error::Error;
};

/// Hermitian symmetry of a spectral quantity was violated beyond rounding.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Malformed tabular input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace levy
