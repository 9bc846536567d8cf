#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace apdisc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index out of range, mismatched universes or dimensions, malformed input.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Violated caller precondition (e.g. column norms above 1 for the walk).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A certificate composition whose product check failed.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Desk-scale guard exceeded; carries the count that tripped it.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::uint64_t requested, std::uint64_t limit)
      : Error(what + " (requested " + std::to_string(requested) + ", limit " +
              std::to_string(limit) + ")"),
        requested_(requested),
        limit_(limit) {}

  std::uint64_t requested() const noexcept { return requested_; }
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  std::uint64_t requested_;
  std::uint64_t limit_;
};

}  // namespace apdisc
