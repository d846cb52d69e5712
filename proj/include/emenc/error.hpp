#pragma once

#include <stdexcept>
#include <string>

namespace emenc {

/// Failure categories. The CLI maps these onto its exit-code contract.
enum class ErrorKind {
  config,
  geometry,
  unsupported_geometry,
  invalid_material,
  invalid_pulse,
  degenerate_pulse,
  instability,
  dependency,
  incompatible,
  unsupported_medium,
  wrong_branch,
  insufficient_data,
  no_decay,
  accuracy,
  staleness,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

/// 0 success, 2 geometry, 3 staleness, 4 no-decay, 5 numerical accuracy, 1 anything else.
int exit_code_for(ErrorKind kind);

}  // namespace emenc
