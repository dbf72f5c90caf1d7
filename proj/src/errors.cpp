#include "layerpot/errors.hpp"

namespace layerpot {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Placement: return "placement";
    case ErrorKind::Range: return "range";
    case ErrorKind::Exponent: return "exponent";
    case ErrorKind::Integrability: return "integrability";
    case ErrorKind::Catalog: return "catalog";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Capability: return "capability";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace layerpot
