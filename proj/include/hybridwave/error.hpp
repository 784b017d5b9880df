#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hybridwave {

enum class ErrorKind {
  invalid_medium,
  singular_constitutive,
  format,
  data,
  stencil_does_not_fit,
  closure_overlap,
  construction,
  size_mismatch,
  non_finite,
  mesh,
  location,
  geometry,
  singular_norm,
  unstable_run,
  placement,
  parse,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the time stepper when a non-finite value shows up.
class UnstableRunError : public Error {
 public:
  UnstableRunError(std::int64_t step, const std::string& where)
      : Error(ErrorKind::unstable_run,
              "non-finite value in " + where + " at step " + std::to_string(step)),
        step_(step) {}

  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_medium: return "invalid medium";
    case ErrorKind::singular_constitutive: return "singular constitutive relation";
    case ErrorKind::format: return "format error";
    case ErrorKind::data: return "data error";
    case ErrorKind::stencil_does_not_fit: return "stencil does not fit";
    case ErrorKind::closure_overlap: return "closure overlap";
    case ErrorKind::construction: return "construction error";
    case ErrorKind::size_mismatch: return "size mismatch";
    case ErrorKind::non_finite: return "non-finite input";
    case ErrorKind::mesh: return "mesh error";
    case ErrorKind::location: return "location error";
    case ErrorKind::geometry: return "geometry error";
    case ErrorKind::singular_norm: return "singular norm";
    case ErrorKind::unstable_run: return "unstable run";
    case ErrorKind::placement: return "placement error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::io: return "I/O error";
  }
  return "error";
}

}  // namespace hybridwave
