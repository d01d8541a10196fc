#pragma once

#include <stdexcept>
#include <string>

namespace nematic {

/// Base class of every error raised by the library. The message is prefixed
/// with the name of the module that detected the violation.
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Input violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Exact computation refused because the input exceeds its size cap.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

/// Two transfer-matrix eigenvalues coincide (or are not real).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// A geometric object produced from a configuration fails its structural
/// invariants (e.g. a hull loop whose mantle cannot be close-packed).
class StructuralError : public Error {
 public:
  using Error::Error;
};

}  // namespace nematic
