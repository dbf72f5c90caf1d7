#pragma once

#include <stdexcept>
#include <string>

namespace layerpot {

// Every failure raised by the library carries one of these kinds. The C API
// maps them one-to-one onto status codes.
enum class ErrorKind {
  Domain,         // point outside the admissible set (e.g. target outside Ω)
  Dimension,      // unsupported or mismatched dimension
  Singularity,    // evaluation at a kernel or field singularity
  Placement,      // target on the wrong side of / on the boundary
  Range,          // distance, interval or parameter range violated
  Exponent,       // Lebesgue exponent outside the admissible range
  Integrability,  // integrand not integrable for the requested exponent
  Catalog,        // unknown field name
  Parameter,      // malformed numeric parameter
  Capability,     // operation needs data the object does not provide
  Resolution,     // quadrature cannot resolve the request
  Budget,         // node budget exceeded
  Config,         // harness configuration error
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace layerpot
