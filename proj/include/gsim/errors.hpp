#pragma once

#include <stdexcept>
#include <string>

namespace gsim {

// Bad inputs: malformed configs, contract violations, wrong call arity.
// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// The requested computation would be numerically meaningless on the given
// grid (aliased chirps, unresolved features). Exit code 2.
class NumericalGuardError : public std::runtime_error {
public:
  explicit NumericalGuardError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem and archive format failures. Exit code 3.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gsim
